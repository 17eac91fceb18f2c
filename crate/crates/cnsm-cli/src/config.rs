//! Strict TOML run configuration.

use crate::error::{CliError, CliResult};
use cnsm_core::norms::ExponentTuple;
use serde::{Deserialize, Deserializer, Serialize};
use std::path::{Path, PathBuf};

fn nonneg<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    let v = f64::deserialize(d)?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(serde::de::Error::custom(format!("value must be finite and >= 0, got {v}")))
    }
}

fn positive<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    let v = f64::deserialize(d)?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(serde::de::Error::custom(format!("value must be finite and > 0, got {v}")))
    }
}

fn opt_positive<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
    positive(d).map(Some)
}

fn finite<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    let v = f64::deserialize(d)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(serde::de::Error::custom(format!("value must be finite, got {v}")))
    }
}

fn switch<'de, D: Deserializer<'de>>(d: D) -> Result<u8, D::Error> {
    let v = i64::deserialize(d)?;
    match v {
        0 | 1 => Ok(v as u8),
        _ => Err(serde::de::Error::custom(format!("switch must be 0 or 1, got {v}"))),
    }
}

fn lebesgue<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    let v = f64::deserialize(d)?;
    if v >= 1.0 {
        Ok(v)
    } else {
        Err(serde::de::Error::custom(format!("Lebesgue exponent must be >= 1 (or inf), got {v}")))
    }
}

fn cells<'de, D: Deserializer<'de>>(d: D) -> Result<usize, D::Error> {
    let v = usize::deserialize(d)?;
    if v >= 2 {
        Ok(v)
    } else {
        Err(serde::de::Error::custom(format!("cell count must be >= 2, got {v}")))
    }
}

fn counting<'de, D: Deserializer<'de>>(d: D) -> Result<usize, D::Error> {
    let v = usize::deserialize(d)?;
    if v >= 1 {
        Ok(v)
    } else {
        Err(serde::de::Error::custom("count must be >= 1"))
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    #[serde(deserialize_with = "positive")]
    pub lx: f64,
    #[serde(deserialize_with = "positive")]
    pub ly: f64,
    #[serde(deserialize_with = "cells")]
    pub nx: usize,
    #[serde(deserialize_with = "cells")]
    pub ny: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { lx: 1.0, ly: 1.0, nx: 32, ny: 32 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ExponentSpec {
    pub dim: usize,
    #[serde(deserialize_with = "lebesgue")]
    pub p: f64,
    #[serde(deserialize_with = "lebesgue")]
    pub q: f64,
    #[serde(deserialize_with = "lebesgue")]
    pub r: f64,
    #[serde(deserialize_with = "lebesgue")]
    pub s: f64,
    /// Finite horizon; in decay mode an absent horizon becomes `20 / slowest rate`.
    #[serde(deserialize_with = "opt_positive", skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
}

impl Default for ExponentSpec {
    fn default() -> Self {
        Self { dim: 2, p: 4.0, q: 1.5, r: 3.0, s: f64::INFINITY, horizon: None }
    }
}

impl ExponentSpec {
    pub fn tuple(&self, horizon: f64, infinite_horizon: bool) -> ExponentTuple {
        ExponentTuple { dim: self.dim, p: self.p, q: self.q, r: self.r, s: self.s, horizon, infinite_horizon }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ModelMode {
    /// Logistic source `sigma n - mu n^2` on a finite horizon.
    Logistic,
    /// Pure decay `-sigma_tilde n` with exponentially weighted norms.
    Decay,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSpec {
    pub mode: ModelMode,
    #[serde(deserialize_with = "nonneg")]
    pub chi: f64,
    #[serde(deserialize_with = "nonneg")]
    pub xi: f64,
    #[serde(deserialize_with = "nonneg")]
    pub alpha1: f64,
    #[serde(deserialize_with = "nonneg")]
    pub alpha2: f64,
    #[serde(deserialize_with = "nonneg")]
    pub beta1: f64,
    #[serde(deserialize_with = "nonneg")]
    pub beta2: f64,
    #[serde(deserialize_with = "nonneg")]
    pub gamma: f64,
    #[serde(deserialize_with = "finite")]
    pub sigma: f64,
    #[serde(deserialize_with = "nonneg")]
    pub mu: f64,
    #[serde(deserialize_with = "nonneg")]
    pub sigma_tilde: f64,
    #[serde(deserialize_with = "switch")]
    pub kappa1: u8,
    #[serde(deserialize_with = "switch")]
    pub kappa2: u8,
    /// Constant potential gradient `(gx, gy)`.
    #[serde(deserialize_with = "finite")]
    pub gx: f64,
    #[serde(deserialize_with = "finite")]
    pub gy: f64,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            mode: ModelMode::Logistic,
            chi: 1.0,
            xi: 1.0,
            alpha1: 1.0,
            alpha2: 1.0,
            beta1: 1.0,
            beta2: 1.0,
            gamma: 1.0,
            sigma: 1.0,
            mu: 1.0,
            sigma_tilde: 0.5,
            kappa1: 1,
            kappa2: 1,
            gx: 0.0,
            gy: -1.0,
        }
    }
}

/// Named analytic profile or a snapshot file. Coordinates are fractions of
/// the domain lengths so a profile means the same field at every resolution.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(tag = "profile", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProfileSpec {
    Zero,
    Constant {
        amplitude: f64,
    },
    /// `amplitude cos(j pi x / lx) cos(k pi y / ly)`.
    Cosine {
        amplitude: f64,
        j: usize,
        k: usize,
    },
    Gaussian {
        amplitude: f64,
        x0: f64,
        y0: f64,
        width: f64,
    },
    /// Projected rotation `amplitude (-dy, dx) exp(-|d|^2 / width^2)` about `(x0, y0)`.
    Vortex {
        amplitude: f64,
        x0: f64,
        y0: f64,
        width: f64,
    },
    Snapshot {
        path: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum DataPreset {
    /// Smooth-bump direction with unit X norm.
    Bump,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct DataSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<DataPreset>,
    /// Rescale the assembled data to this X norm.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_norm: Option<f64>,
    pub n0: ProfileSpec,
    pub c0: ProfileSpec,
    pub v0: ProfileSpec,
    pub u0: ProfileSpec,
}

fn opt_nonneg<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
    nonneg(d).map(Some)
}

impl Default for DataSpec {
    fn default() -> Self {
        Self {
            preset: None,
            x_norm: None,
            n0: ProfileSpec::Zero,
            c0: ProfileSpec::Zero,
            v0: ProfileSpec::Zero,
            u0: ProfileSpec::Zero,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDataSpec {
    preset: Option<DataPreset>,
    #[serde(deserialize_with = "opt_nonneg", default)]
    x_norm: Option<f64>,
    n0: Option<ProfileSpec>,
    c0: Option<ProfileSpec>,
    v0: Option<ProfileSpec>,
    u0: Option<ProfileSpec>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSpec {
    #[serde(deserialize_with = "positive")]
    pub tol: f64,
    #[serde(deserialize_with = "counting")]
    pub maxiter: usize,
    #[serde(deserialize_with = "positive")]
    pub guard: f64,
    #[serde(deserialize_with = "counting")]
    pub kmax: usize,
    /// Time-grid refinement factor (multiplied by `--refine`).
    #[serde(deserialize_with = "counting")]
    pub time_refine: usize,
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self { tol: 1e-6, maxiter: 40, guard: 1e6, kmax: 256, time_refine: 1 }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    /// Times at which field snapshots are written (nearest sample).
    pub snapshot_times: Vec<f64>,
    /// Record measured wall time per iteration; off keeps CSVs reproducible.
    pub wall_clock: bool,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct DecaySpec {
    pub estimates: Vec<String>,
    /// `(p, q)` pairs; each estimate runs on the pairs it admits.
    pub pairs: Vec<[f64; 2]>,
    #[serde(deserialize_with = "counting")]
    pub corpus_size: usize,
}

impl Default for DecaySpec {
    fn default() -> Self {
        Self {
            estimates: ["C0", "C0q", "C1", "C2", "C3", "C4", "C5", "C6"].map(String::from).to_vec(),
            pairs: vec![[2.0, 2.0], [f64::INFINITY, 2.0], [2.0, 1.0]],
            corpus_size: 50,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct BetaSpec {
    #[serde(deserialize_with = "counting")]
    pub points: usize,
    #[serde(deserialize_with = "positive")]
    pub quad_tol: f64,
}

impl Default for BetaSpec {
    fn default() -> Self {
        Self { points: 200, quad_tol: 1e-8 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct CheckSpec {
    pub theorem: String,
    pub case: String,
}

impl Default for CheckSpec {
    fn default() -> Self {
        Self { theorem: "T1".into(), case: "iii".into() }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ThresholdSpec {
    #[serde(deserialize_with = "nonneg")]
    pub lo: f64,
    #[serde(deserialize_with = "positive")]
    pub hi: f64,
    pub steps: usize,
}

impl Default for ThresholdSpec {
    fn default() -> Self {
        Self { lo: 0.0, hi: 64.0, steps: 10 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RatesSpec {
    /// Allowed relative shortfall of a fitted rate below its weight rate.
    #[serde(deserialize_with = "nonneg")]
    pub margin: f64,
}

impl Default for RatesSpec {
    fn default() -> Self {
        Self { margin: 0.1 }
    }
}

/// A fully defaulted, validated configuration.
#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub grid: GridSpec,
    pub exponents: ExponentSpec,
    pub model: ModelSpec,
    #[serde(deserialize_with = "data_section")]
    pub data: DataSpec,
    pub solver: SolverSpec,
    pub output: OutputSpec,
    pub decay: DecaySpec,
    pub beta: BetaSpec,
    pub check: CheckSpec,
    pub threshold: ThresholdSpec,
    pub rates: RatesSpec,
}

fn data_section<'de, D: Deserializer<'de>>(d: D) -> Result<DataSpec, D::Error> {
    let raw = RawDataSpec::deserialize(d)?;
    let explicit = raw.n0.is_some() || raw.c0.is_some() || raw.v0.is_some() || raw.u0.is_some();
    if raw.preset.is_some() && explicit {
        return Err(serde::de::Error::custom("data.preset excludes explicit n0/c0/v0/u0 profiles"));
    }
    Ok(DataSpec {
        preset: raw.preset,
        x_norm: raw.x_norm,
        n0: raw.n0.unwrap_or(ProfileSpec::Zero),
        c0: raw.c0.unwrap_or(ProfileSpec::Zero),
        v0: raw.v0.unwrap_or(ProfileSpec::Zero),
        u0: raw.u0.unwrap_or(ProfileSpec::Zero),
    })
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

/// Dotted key assigned on `line`, qualified by the enclosing table header.
fn key_at(text: &str, line: usize) -> Option<String> {
    let lines: Vec<&str> = text.lines().collect();
    let (key, _) = lines.get(line.checked_sub(1)?)?.split_once('=')?;
    let key = key.trim();
    let section = lines[..line - 1]
        .iter()
        .rev()
        .map(|l| l.trim())
        .find(|l| l.starts_with('[') && l.ends_with(']'))
        .map(|l| l.trim_matches(|c| c == '[' || c == ']').trim());
    Some(match section {
        Some(sec) => format!("{sec}.{key}"),
        None => key.to_string(),
    })
}

impl RunConfig {
    /// Parses and validates TOML text; `origin` names the source in messages.
    pub fn parse(text: &str, origin: &str) -> CliResult<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map_or(0, |s| line_of(text, s.start));
            let message = e.message().trim();
            let message = match key_at(text, line) {
                Some(key) if !message.starts_with("unknown field") => format!("{key}: {message}"),
                _ => message.to_string(),
            };
            CliError::Config { path: origin.to_string(), line, message }
        })?;
        cfg.validate(origin)?;
        Ok(cfg)
    }

    /// Reads a config file; snapshot paths are resolved against its directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg = Self::parse(&text, &path.display().to_string())?;
        let base = path.parent().unwrap_or(Path::new("."));
        for spec in cfg.profiles_mut() {
            if let ProfileSpec::Snapshot { path: p } = spec {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
                if !p.exists() {
                    return Err(CliError::Invalid(format!("snapshot file {} does not exist", p.display())));
                }
            }
        }
        Ok(cfg)
    }

    fn profiles_mut(&mut self) -> [&mut ProfileSpec; 4] {
        let d = &mut self.data;
        [&mut d.n0, &mut d.c0, &mut d.v0, &mut d.u0]
    }

    fn validate(&self, origin: &str) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Invalid(format!("{origin}: {m}")));
        if self.exponents.dim != 2 && self.exponents.dim != 3 {
            return bad(format!("exponents.dim must be 2 or 3, got {}", self.exponents.dim));
        }
        for (name, spec) in [("n0", &self.data.n0), ("c0", &self.data.c0), ("v0", &self.data.v0)] {
            if matches!(spec, ProfileSpec::Vortex { .. }) {
                return bad(format!("data.{name}: vortex is a velocity profile"));
            }
        }
        if matches!(self.data.u0, ProfileSpec::Constant { .. } | ProfileSpec::Cosine { .. } | ProfileSpec::Gaussian { .. })
        {
            return bad("data.u0: only zero, vortex or snapshot profiles are solenoidal".into());
        }
        for spec in [&self.data.n0, &self.data.c0, &self.data.v0, &self.data.u0] {
            match spec {
                ProfileSpec::Gaussian { width, .. } | ProfileSpec::Vortex { width, .. } if !(*width > 0.0) => {
                    return bad(format!("profile width must be > 0, got {width}"));
                }
                _ => {}
            }
        }
        if self.threshold.lo >= self.threshold.hi {
            return bad(format!("threshold.lo = {} must be below threshold.hi = {}", self.threshold.lo, self.threshold.hi));
        }
        if self.output.snapshot_times.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return bad("output.snapshot_times must be positive".into());
        }
        for [p, q] in &self.decay.pairs {
            if !(*p >= 1.0 && *q >= 1.0) {
                return bad(format!("decay.pairs entry ({p}, {q}) needs exponents >= 1"));
            }
        }
        Ok(())
    }

    /// Applies `--refine`: grid cells and time samples both scale by `factor`.
    pub fn refined(&self, factor: usize) -> CliResult<Self> {
        if factor == 0 {
            return Err(CliError::Invalid("--refine must be >= 1".into()));
        }
        let mut out = self.clone();
        out.grid.nx *= factor;
        out.grid.ny *= factor;
        out.solver.time_refine *= factor;
        Ok(out)
    }

    /// Normalized TOML echo of every setting.
    pub fn dump(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
