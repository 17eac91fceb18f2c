use crate::error::{CoreError, Result};
use crate::norms::ExponentTuple;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Theorem {
    /// Local-in-data existence on a finite horizon with logistic growth.
    T1,
    /// Global existence with exponential decay for the pure-decay variant.
    T2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Case {
    I,
    II,
    III,
}

impl FromStr for Theorem {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "T1" | "1" => Ok(Theorem::T1),
            "T2" | "2" => Ok(Theorem::T2),
            _ => Err(CoreError::UnknownTag(format!("theorem '{s}'"))),
        }
    }
}

impl FromStr for Case {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "i" | "1" => Ok(Case::I),
            "ii" | "2" => Ok(Case::II),
            "iii" | "3" => Ok(Case::III),
            _ => Err(CoreError::UnknownTag(format!("case '{s}'"))),
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::T1 => "T1",
            Theorem::T2 => "T2",
        })
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::I => "i",
            Case::II => "ii",
            Case::III => "iii",
        })
    }
}

/// One inequality of the decay-variant estimate chain and the estimate it feeds.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemCheck {
    pub inequality: String,
    pub estimate: &'static str,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionVerdict {
    pub theorem: Theorem,
    pub case: Case,
    pub tuple: ExponentTuple,
    pub pass: bool,
    pub violations: Vec<String>,
    /// Every inequality of the estimate chain, with the estimate it would break.
    pub system: Vec<SystemCheck>,
}

impl ConditionVerdict {
    pub fn system_violations(&self) -> impl Iterator<Item = &SystemCheck> {
        self.system.iter().filter(|c| !c.holds)
    }
}

fn fmt_num(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v}")
    }
}

/// Reciprocal with the convention `1/inf = 0`.
fn inv(v: f64) -> f64 {
    if v.is_infinite() {
        0.0
    } else {
        1.0 / v
    }
}

struct Collector {
    violations: Vec<String>,
}

impl Collector {
    fn check(&mut self, holds: bool, text: impl FnOnce() -> String) {
        if !holds {
            self.violations.push(text());
        }
    }

    fn lt(&mut self, name: &str, lo: f64, v: f64) {
        self.check(lo < v, || format!("{name} = {} must exceed {}", fmt_num(v), fmt_num(lo)));
    }

    fn le(&mut self, name: &str, lo: f64, v: f64) {
        self.check(lo <= v, || format!("{name} = {} must be at least {}", fmt_num(v), fmt_num(lo)));
    }

    fn below(&mut self, name: &str, v: f64, hi: f64) {
        self.check(v < hi, || format!("{name} = {} must be below {}", fmt_num(v), fmt_num(hi)));
    }

    fn dim(&mut self, want: usize, got: usize, case: &str) {
        self.check(want == got, || format!("case ({case}) requires N = {want}, got N = {got}"));
    }
}

fn case_violations(e: &ExponentTuple, theorem: Theorem, case: Case) -> Vec<String> {
    let n = e.dim as f64;
    let (p, q, r, s) = (e.p, e.q, e.r, e.s);
    let mut c = Collector { violations: Vec::new() };
    match (theorem, case) {
        (Theorem::T1, Case::I) => {
            c.dim(3, e.dim, "i");
            c.le("s", n, s);
            c.lt("q", n / 2.0, q);
            c.below("q", q, n);
            c.lt("p", n, p);
            // Nqs / (Ns + Nq - 2sq), divided through by s so that s = inf is the limit.
            let denom = n + n * q * inv(s) - 2.0 * q;
            if denom > 0.0 {
                c.below("p", p, n * q / denom);
            }
            c.lt("r", n, r);
            c.below("r", r, n * q / (n - q));
        }
        (Theorem::T1, Case::II) => {
            c.dim(2, e.dim, "ii");
            c.lt("s", n, s);
            c.below("s", s, f64::INFINITY);
            c.le("q", s / (s - 1.0), q);
            c.below("q", q, n);
            c.le("p", q / (q - 1.0), p);
            c.below("p", p, f64::INFINITY);
            c.lt("r", n, r);
            c.below("r", r, n * q / (n - q));
        }
        (Theorem::T1, Case::III) => {
            c.dim(2, e.dim, "iii");
            c.check(s.is_infinite(), || format!("case (iii) requires s = inf, got s = {}", fmt_num(s)));
            c.lt("q", n / 2.0, q);
            c.below("q", q, n);
            c.le("p", q / (q - 1.0), p);
            c.below("p", p, f64::INFINITY);
            c.lt("r", n, r);
            c.below("r", r, n * q / (n - q));
        }
        (Theorem::T2, Case::I) => {
            if e.dim == 2 {
                c.violations.push("case (i) unavailable for N=2".into());
            }
            c.lt("q", n / 2.0, q);
            c.below("q", q, n);
            c.lt("p", n, p);
            c.below("p", p, n * q / (n - q));
            c.lt("r", n, r);
            c.below("r", r, n * q / (n - q));
        }
        (Theorem::T2, Case::II) => {
            c.check(q == n, || format!("q = {} must equal N = {}", fmt_num(q), e.dim));
            c.lt("p", n, p);
            c.below("p", p, f64::INFINITY);
            c.lt("r", n, r);
            c.below("r", r, f64::INFINITY);
        }
        (Theorem::T2, Case::III) => {
            c.lt("q", n, q);
            c.below("q", q, 2.0 * n);
            c.lt("p", n, p);
            c.below("p", p, n * q / (q - n));
            c.le("r", q, r);
            c.below("r", r, n * q / (q - n));
        }
    }
    if ![2, 3].contains(&e.dim) {
        c.violations.push(format!("dimension N = {} is not 2 or 3", e.dim));
    }
    c.violations
}

/// The inequalities behind the decay-variant estimates, each tagged with the
/// estimate it feeds.
fn system_checks(e: &ExponentTuple) -> Vec<SystemCheck> {
    let n = e.dim as f64;
    let (ip, iq, ir) = (inv(e.p), inv(e.q), inv(e.r));
    let check = |inequality: &str, estimate: &'static str, holds: bool| SystemCheck {
        inequality: inequality.to_string(),
        estimate,
        holds,
    };
    const TRANSPORT: &str = "density transport";
    const CHEMOTAXIS: &str = "density chemotaxis";
    const SIGNAL: &str = "signal sup";
    const SIGNAL_GRAD: &str = "signal gradient";
    const VELOCITY: &str = "velocity";
    vec![
        check("1/p + 1/q <= 1", TRANSPORT, ip + iq <= 1.0),
        check("1/2 > N/(2p)", TRANSPORT, 0.5 > n / 2.0 * ip),
        check("N/2 (1/p + 1/q) > 1/2", TRANSPORT, n / 2.0 * (ip + iq) > 0.5),
        check("1/q + 1/r <= 1", CHEMOTAXIS, iq + ir <= 1.0),
        check("1/2 - N/(2r) > 0", CHEMOTAXIS, 0.5 - n / 2.0 * ir > 0.0),
        check("N/2 (1/q + 1/r - 1/N) > 0", CHEMOTAXIS, n / 2.0 * (iq + ir - 1.0 / n) > 0.0),
        check("1 - N/(2q) > 0", SIGNAL, 1.0 - n / 2.0 * iq > 0.0),
        check("1/2 - N/(2p) > 0", SIGNAL, 0.5 - n / 2.0 * ip > 0.0),
        check("1/2 - N/(2p) > 0", SIGNAL_GRAD, 0.5 - n / 2.0 * ip > 0.0),
        check("1/2 - N/2 (1/q - 1/r) > 0", SIGNAL_GRAD, 0.5 - n / 2.0 * (iq - ir) > 0.0),
        check("q <= r", SIGNAL_GRAD, e.q <= e.r),
        check("1/N + 1/q <= 1", VELOCITY, 1.0 / n + iq <= 1.0),
        check("1/2 - N/(2p) > 0", VELOCITY, 0.5 - n / 2.0 * ip > 0.0),
        check("1 - N/2 (1/N + 1/q - 1/p) > 0", VELOCITY, 1.0 - n / 2.0 * (1.0 / n + iq - ip) > 0.0),
    ]
}

/// Evaluates the exponent conditions of one theorem case. Pure and total: every
/// tuple, including NaN entries, yields a verdict.
pub fn check_exponents(e: &ExponentTuple, theorem: Theorem, case: Case) -> ConditionVerdict {
    let mut violations = case_violations(e, theorem, case);
    for (name, v) in [("p", e.p), ("q", e.q), ("r", e.r), ("s", e.s)] {
        if v.is_nan() {
            violations.push(format!("{name} is NaN"));
        }
    }
    ConditionVerdict {
        theorem,
        case,
        tuple: *e,
        pass: violations.is_empty(),
        violations,
        system: system_checks(e),
    }
}

/// Tag-based entry point.
pub fn check_exponents_tagged(e: &ExponentTuple, theorem: &str, case: &str) -> Result<ConditionVerdict> {
    Ok(check_exponents(e, theorem.parse()?, case.parse()?))
}
