//! Built-in target distributions and ingestion of user-supplied targets.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};
use crate::evolve::{evolve_qw_complex, HomogeneousCoinParams};
use crate::formats;
use crate::lattice::{from_storage_index, ProbabilitySequence};
use crate::scalar::Scalar;
use crate::sum::compensated_sum;

/// Which distribution to generate.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetKind {
    Uniform,
    Binomial { p: f64 },
    /// Probability function of a homogeneous walk on the complex plane.
    Hadamard(HomogeneousCoinParams<f64>),
    File(PathBuf),
}

/// A target distribution together with its horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSpec {
    pub kind: TargetKind,
    pub horizon: usize,
}

impl TargetSpec {
    pub fn new(kind: TargetKind, horizon: usize) -> Result<Self> {
        match &kind {
            TargetKind::Binomial { p } if !(*p > 0.0 && *p < 1.0) => {
                return Err(Error::Domain(format!("binomial p must lie in (0, 1), got {p}")));
            }
            TargetKind::Hadamard(params) => params.validate()?,
            _ => {}
        }
        Ok(Self { kind, horizon })
    }

    /// Materializes the target. File targets are truncated to the horizon
    /// and must extend at least that far.
    pub fn build<T: Scalar>(&self) -> Result<ProbabilitySequence<T>> {
        match &self.kind {
            TargetKind::Uniform => uniform_target(self.horizon),
            TargetKind::Binomial { p } => binomial_target(T::lit(*p), self.horizon),
            TargetKind::Hadamard(params) => {
                evolve_qw_complex(&params.cast::<T>(), self.horizon)?.probability()
            }
            TargetKind::File(path) => load_target::<T>(path)?.truncated(self.horizon),
        }
    }
}

impl FromStr for TargetKind {
    type Err = Error;

    /// `uniform`, `binomial:p`, `hadamard:theta,eta,gamma[,alpha,beta,chi]`, `file:path`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h.trim(), Some(r)),
            None => (s.trim(), None),
        };
        let bad = |msg: &str| Error::Parse { location: format!("target '{s}'"), message: msg.into() };
        let numbers = |r: &str| -> Result<Vec<f64>> {
            r.split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|e| bad(&e.to_string())))
                .collect()
        };
        match (head, rest) {
            ("uniform", None) => Ok(TargetKind::Uniform),
            ("binomial", Some(r)) => {
                let v = numbers(r)?;
                if v.len() != 1 {
                    return Err(bad("binomial takes exactly one probability"));
                }
                Ok(TargetKind::Binomial { p: v[0] })
            }
            ("hadamard", Some(r)) => {
                let v = numbers(r)?;
                if v.len() != 3 && v.len() != 6 {
                    return Err(bad("hadamard takes theta,eta,gamma[,alpha,beta,chi]"));
                }
                let mut params = HomogeneousCoinParams::new(v[0], v[1], v[2]);
                if v.len() == 6 {
                    params = params.with_phases(v[5], v[3], v[4]);
                }
                Ok(TargetKind::Hadamard(params))
            }
            ("file", Some(r)) if !r.is_empty() => Ok(TargetKind::File(PathBuf::from(r))),
            _ => Err(bad("expected uniform | binomial:p | hadamard:theta,eta,gamma | file:path")),
        }
    }
}

impl fmt::Display for TargetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetKind::Uniform => write!(f, "uniform"),
            TargetKind::Binomial { p } => write!(f, "binomial:{p}"),
            TargetKind::Hadamard(c) => write!(
                f,
                "hadamard:{},{},{},{},{},{}",
                c.theta, c.eta, c.gamma, c.alpha, c.beta, c.chi
            ),
            TargetKind::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// rho(n, t) = 1 / (t + 1) on every reachable site.
pub fn uniform_target<T: Scalar>(horizon: usize) -> Result<ProbabilitySequence<T>> {
    let slices = (0..=horizon)
        .map(|t| vec![T::one() / T::lit((t + 1) as f64); t + 1])
        .collect();
    ProbabilitySequence::new(slices)
}

/// Binomial law of a walk stepping right with constant probability `p`.
///
/// Coefficients are evaluated in log space so horizons far beyond 170 do not
/// overflow; each slice is then rescaled by its compensated sum.
pub fn binomial_target<T: Scalar>(p: T, horizon: usize) -> Result<ProbabilitySequence<T>> {
    let pf = p.as_f64();
    if !(pf > 0.0 && pf < 1.0) {
        return Err(Error::Domain(format!("binomial p must lie in (0, 1), got {pf}")));
    }
    let ln_p = pf.ln();
    let ln_q = (-pf).ln_1p();
    let slices = (0..=horizon)
        .map(|t| {
            let raw: Vec<f64> = (0..=t as u64)
                .map(|k| (ln_binomial(t as u64, k) + k as f64 * ln_p + (t as u64 - k) as f64 * ln_q).exp())
                .collect();
            let sum = compensated_sum(raw.iter().copied());
            raw.into_iter().map(|v| T::lit(v / sum)).collect()
        })
        .collect();
    ProbabilitySequence::new(slices)
}

/// Reads a target from a CSV (`t,n,value`) or JSON (`{"horizon", "slices"}`) file.
///
/// Slices must be normalized within `1e-9`; accepted slices are rescaled to
/// unit mass.
pub fn load_target<T: Scalar>(path: impl AsRef<Path>) -> Result<ProbabilitySequence<T>> {
    formats::read_probability(path)
}

/// Sanity helper used by tests and the CLI: the position of the largest entry of slice `t`.
pub fn mode_position<T: Scalar>(rho: &ProbabilitySequence<T>, t: usize) -> i64 {
    let s = rho.slice(t);
    let mut best = 0;
    for (k, v) in s.iter().enumerate() {
        if *v > s[best] {
            best = k;
        }
    }
    from_storage_index(best, t)
}
