use cnsm_cli::run::{check_exponents_cmd, simulate, verify_beta_cmd};
use cnsm_cli::{exit_code_for, run, CliError, Command, RunConfig, Snapshot, EXIT_CODES};
use cnsm_core::operators::{build_grid, ScalarField, VectorField};
use proptest::prelude::*;
use std::collections::HashSet;
use std::path::Path;
use std::process::Command as Process;

fn small_config(extra: &str) -> RunConfig {
    let text = format!("[grid]\nnx = 12\nny = 12\n[solver]\nkmax = 48\n{extra}");
    RunConfig::parse(&text, "test.toml").unwrap()
}

#[test]
fn minimal_config_is_filled_with_defaults() {
    let cfg = RunConfig::parse("", "empty.toml").unwrap();
    assert_eq!(cfg, RunConfig::default());
    let again = RunConfig::parse(&cfg.dump(), "dump.toml").unwrap();
    assert_eq!(again, cfg);
    assert!(cfg.exponents.s.is_infinite());
}

#[test]
fn config_errors_name_line_and_key() {
    let err = RunConfig::parse("[model]\nchi = 1.0\nbeta1 = -2.0\n", "m.toml").unwrap_err();
    match &err {
        CliError::Config { line, message, .. } => {
            assert_eq!(*line, 3);
            assert!(message.contains("model.beta1"), "{message}");
        }
        other => panic!("unexpected {other:?}"),
    }
    let err = RunConfig::parse("[model]\nkappa1 = 2\n", "m.toml").unwrap_err();
    assert!(err.to_string().contains("switch must be 0 or 1"), "{err}");
    assert!(err.to_string().starts_with("m.toml:2:"), "{err}");
    let err = RunConfig::parse("[grid]\nnx = 8\nwidth = 3\n", "m.toml").unwrap_err();
    assert!(err.to_string().contains("unknown field `width`"), "{err}");
    assert_eq!(err.category(), "config");
}

#[test]
fn data_section_is_checked() {
    let err = RunConfig::parse("[data]\npreset = \"bump\"\nn0 = { profile = \"zero\" }\n", "d.toml").unwrap_err();
    assert!(err.to_string().contains("preset"), "{err}");
    let err = RunConfig::parse("[data]\nu0 = { profile = \"gaussian\", amplitude = 1.0, x0 = 0.5, y0 = 0.5, width = 0.1 }\n", "d.toml")
        .unwrap_err();
    assert!(err.to_string().contains("u0"), "{err}");
    let err = RunConfig::parse("[data]\nn0 = { profile = \"cosine\", amplitude = 1.0, j = 1 }\n", "d.toml").unwrap_err();
    assert!(err.to_string().contains("missing field `k`"), "{err}");
}

#[test]
fn missing_snapshot_is_rejected_at_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.toml");
    std::fs::write(&path, "[data]\nn0 = { profile = \"snapshot\", path = \"nowhere.cnsm\" }\n").unwrap();
    let err = RunConfig::load(&path).unwrap_err();
    assert!(err.to_string().contains("does not exist"), "{err}");
}

#[test]
fn exit_codes_are_unique() {
    let codes: HashSet<i32> = EXIT_CODES.iter().map(|e| e.1).collect();
    assert_eq!(codes.len(), EXIT_CODES.len());
    assert!(!codes.contains(&0) && !codes.contains(&1));
    assert_eq!(exit_code_for("diverged"), 9);
}

#[test]
fn snapshot_rejects_malformed_files() {
    let g = build_grid(1.0, 2.0, 5, 4).unwrap();
    let bytes = Snapshot::Scalar(ScalarField::constant(g, 1.5)).to_bytes();
    let origin = Path::new("x.cnsm");
    assert!(Snapshot::from_bytes(&bytes[..bytes.len() - 1], origin).is_err());
    let mut wrong = bytes.clone();
    wrong[0] = b'X';
    assert!(Snapshot::from_bytes(&wrong, origin).is_err());
    let mut kind = bytes.clone();
    kind[6] = 7;
    assert!(Snapshot::from_bytes(&kind, origin).is_err());
    assert_eq!(&bytes[..4], b"CNSM");
    assert_eq!(bytes.len(), 4 + 2 + 1 + 8 + 16 + 8 * 20);
}

fn arb_values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(any::<u64>().prop_map(f64::from_bits).prop_filter("finite", |v| v.is_finite()), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snapshot_round_trip_is_bit_exact(nx in 4usize..9, ny in 4usize..9, lx in 0.1f64..10.0, seed in arb_values(128)) {
        let g = build_grid(lx, 1.0 + lx / 3.0, nx, ny).unwrap();
        let n = nx * ny;
        let plane = |k: usize| ndarray::Array2::from_shape_fn((ny, nx), |(i, j)| seed[(k * n + i * nx + j) % seed.len()]);
        let s = Snapshot::Scalar(ScalarField::new(g, plane(0)).unwrap());
        let back = Snapshot::from_bytes(&s.to_bytes(), Path::new("p")).unwrap();
        prop_assert_eq!(back.to_bytes(), s.to_bytes());
        let v = Snapshot::Vector(VectorField::new(g, plane(0), plane(1)).unwrap());
        let back = Snapshot::from_bytes(&v.to_bytes(), Path::new("p")).unwrap();
        match (&back, &v) {
            (Snapshot::Vector(a), Snapshot::Vector(b)) => {
                prop_assert!(a.x.iter().zip(b.x.iter()).all(|(p, q)| p.to_bits() == q.to_bits()));
                prop_assert!(a.y.iter().zip(b.y.iter()).all(|(p, q)| p.to_bits() == q.to_bits()));
                prop_assert_eq!(a.grid, b.grid);
            }
            _ => prop_assert!(false, "kind changed"),
        }
    }
}

#[test]
fn check_exponents_subcommand_passes_case_two() {
    let cfg = RunConfig::parse(
        "[exponents]\np = 4.0\nq = 2.0\nr = 4.0\n[check]\ntheorem = \"T2\"\ncase = \"ii\"\n",
        "c.toml",
    )
    .unwrap();
    let rep = check_exponents_cmd(&cfg, None).unwrap();
    assert!(rep.verdict().pass);
    let dir = tempfile::tempdir().unwrap();
    let v = run(Command::CheckExponents, &cfg, dir.path()).unwrap();
    assert!(v.pass);
    let text = std::fs::read_to_string(dir.path().join("verdict.txt")).unwrap();
    assert!(text.starts_with("PASS\n"));
}

#[test]
fn zero_data_simulation_is_one_iteration_of_zeros() {
    let cfg = small_config("");
    let dir = tempfile::tempdir().unwrap();
    let rep = simulate(&cfg, Some(dir.path())).unwrap();
    assert_eq!(rep.diagnostics.iterations(), 1);
    let csv = std::fs::read_to_string(dir.path().join("norms.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,component,weighted_norm"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 6 * rep.trajectory.len());
    assert!(rows.iter().all(|r| r.ends_with(",0e0")));
}

#[test]
fn snapshot_data_round_trips_through_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(
        "[data]\nn0 = { profile = \"gaussian\", amplitude = 0.5, x0 = 0.4, y0 = 0.5, width = 0.2 }\n\
         u0 = { profile = \"vortex\", amplitude = 0.3, x0 = 0.5, y0 = 0.5, width = 0.2 }\n\
         [output]\nsnapshot_times = [0.05]\n",
    );
    let first = simulate(&cfg, Some(dir.path())).unwrap();
    let snap = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.file_name().unwrap().to_string_lossy().starts_with("n_t"))
        .unwrap();
    let Snapshot::Scalar(f) = Snapshot::read(&snap).unwrap() else { panic!("scalar expected") };
    let idx: usize = snap.file_stem().unwrap().to_string_lossy()[3..].parse().unwrap();
    assert_eq!(f, first.trajectory.n[idx]);

    let cfg_path = dir.path().join("from_snapshot.toml");
    std::fs::write(
        &cfg_path,
        format!(
            "[grid]\nnx = 12\nny = 12\n[solver]\nkmax = 48\n[data]\nn0 = {{ profile = \"snapshot\", path = \"{}\" }}\n",
            snap.file_name().unwrap().to_string_lossy()
        ),
    )
    .unwrap();
    let loaded = RunConfig::load(&cfg_path).unwrap();
    let rep = simulate(&loaded, None).unwrap();
    assert!(rep.diagnostics.converged);
}

#[test]
fn beta_subcommand_small_grid() {
    let cfg = RunConfig::parse("seed = 5\n[beta]\npoints = 12\n", "b.toml").unwrap();
    let rep = verify_beta_cmd(&cfg, None).unwrap();
    assert_eq!(rep.checks.len(), 12);
    assert!(rep.verdict().pass);
}

#[test]
fn binary_exit_status_contract() {
    let exe = env!("CARGO_BIN_EXE_cnsm");
    let dir = tempfile::tempdir().unwrap();
    let ok = dir.path().join("ok.toml");
    std::fs::write(&ok, "[exponents]\np = 4.0\nq = 2.0\nr = 4.0\n[check]\ntheorem = \"T2\"\ncase = \"ii\"\n").unwrap();
    let out = dir.path().join("out");
    let st = Process::new(exe).args(["check-exponents", "--config"]).arg(&ok).arg("--out").arg(&out).output().unwrap().status;
    assert_eq!(st.code(), Some(0));

    let fail = dir.path().join("fail.toml");
    std::fs::write(&fail, "[exponents]\np = 4.0\nq = 1.5\nr = 5.0\n[check]\ntheorem = \"T2\"\ncase = \"i\"\n").unwrap();
    let st = Process::new(exe).args(["check-exponents", "--config"]).arg(&fail).arg("--out").arg(&out).output().unwrap().status;
    assert_eq!(st.code(), Some(1));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[model]\nkappa1 = 2\n").unwrap();
    let res = Process::new(exe).args(["simulate", "--config"]).arg(&bad).arg("--out").arg(&out).output().unwrap();
    assert_eq!(res.status.code(), Some(exit_code_for("config")));
    assert!(String::from_utf8_lossy(&res.stderr).contains("switch must be 0 or 1"));

    let tag = dir.path().join("tag.toml");
    std::fs::write(&tag, "[check]\ntheorem = \"T9\"\n").unwrap();
    let st = Process::new(exe).args(["check-exponents", "--config"]).arg(&tag).arg("--out").arg(&out).output().unwrap().status;
    assert_eq!(st.code(), Some(exit_code_for("unknown-tag")));
}
