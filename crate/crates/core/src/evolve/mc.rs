//! Seeded Monte Carlo trajectories of the inhomogeneous random walk.
//!
//! Trajectory `i` draws from ChaCha8 stream `i` of the master seed, so the
//! sampled set is fixed by `(seed, trajectories, horizon)` alone and is
//! identical for any thread count or batching.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{JumpSchedule, Lattice, ProbabilitySequence};
use crate::scalar::Scalar;

const BATCH: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub trajectories: u64,
    pub seed: u64,
    pub horizon: usize,
}

impl McConfig {
    pub fn new(trajectories: u64, seed: u64, horizon: usize) -> Result<Self> {
        if trajectories == 0 {
            return Err(Error::Domain("at least one trajectory is required".into()));
        }
        Ok(Self { trajectories, seed, horizon })
    }
}

/// Per-site standard error sqrt(rho_hat (1 - rho_hat) / N) of an estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct StdErrField<T> {
    values: Lattice<T>,
}

impl<T: Scalar> StdErrField<T> {
    pub fn stderr(&self, n: i64, t: usize) -> T {
        self.values.value(n, t)
    }

    pub fn lattice(&self) -> &Lattice<T> {
        &self.values
    }
}

type Counts = Vec<Vec<u64>>;

fn empty_counts(horizon: usize) -> Counts {
    (0..=horizon).map(|t| vec![0; t + 1]).collect()
}

fn run_batch<T: Scalar>(schedule: &JumpSchedule<T>, cfg: &McConfig, batch: u64) -> Result<Counts> {
    let mut counts = empty_counts(cfg.horizon);
    let start = batch * BATCH;
    let end = (start + BATCH).min(cfg.trajectories);
    for i in start..end {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(i);
        let mut k = 0usize;
        counts[0][0] += 1;
        for t in 0..cfg.horizon {
            let n = 2 * k as i64 - t as i64;
            let p = schedule
                .probability(n, t)
                .ok_or(Error::Coverage { n, t, weight: 1.0 / cfg.trajectories as f64 })?;
            if rng.random::<f64>() < p.as_f64() {
                k += 1;
            }
            counts[t + 1][k] += 1;
        }
    }
    Ok(counts)
}

fn merge(mut a: Counts, b: Counts) -> Counts {
    for (x, y) in a.iter_mut().zip(b) {
        for (u, v) in x.iter_mut().zip(y) {
            *u += v;
        }
    }
    a
}

/// Empirical occupation frequencies of `cfg.trajectories` independent walkers
/// and their standard errors.
pub fn simulate_rw<T: Scalar>(
    schedule: &JumpSchedule<T>,
    cfg: &McConfig,
) -> Result<(ProbabilitySequence<T>, StdErrField<T>)> {
    if cfg.trajectories == 0 {
        return Err(Error::Domain("at least one trajectory is required".into()));
    }
    if cfg.horizon > schedule.horizon() {
        return Err(Error::Horizon { requested: cfg.horizon, available: schedule.horizon() });
    }
    let batches = cfg.trajectories.div_ceil(BATCH);
    let counts = (0..batches)
        .into_par_iter()
        .map(|b| run_batch(schedule, cfg, b))
        .try_reduce(|| empty_counts(cfg.horizon), |a, b| Ok(merge(a, b)))?;

    let total = T::lit(cfg.trajectories as f64);
    let freq: Vec<Vec<T>> = counts
        .iter()
        .map(|s| s.iter().map(|&c| T::lit(c as f64) / total).collect())
        .collect();
    let stderr = freq
        .iter()
        .map(|s| s.iter().map(|&r| (r * (T::one() - r) / total).sqrt()).collect())
        .collect();
    Ok((
        ProbabilitySequence::new(freq)?,
        StdErrField { values: Lattice::from_slices(stderr)? },
    ))
}

/// Fraction of the sites of slice `t` where the estimate lies within
/// `sigmas` standard errors of the exact value.
///
/// Where no walker (or every walker) landed, the estimated standard error is
/// zero and the band degenerates; those sites use the binomial standard
/// error of the exact value, sqrt(rho (1 - rho) / N), instead.
pub fn agreement_fraction<T: Scalar>(
    exact: &ProbabilitySequence<T>,
    estimate: &ProbabilitySequence<T>,
    stderr: &StdErrField<T>,
    trajectories: u64,
    t: usize,
    sigmas: f64,
) -> f64 {
    let total = trajectories as f64;
    let mut inside = 0usize;
    for k in 0..=t {
        let n = 2 * k as i64 - t as i64;
        let rho = exact.rho(n, t).as_f64();
        let hat = estimate.rho(n, t).as_f64();
        let mut se = stderr.stderr(n, t).as_f64();
        if se == 0.0 {
            se = (rho * (1.0 - rho) / total).max(0.0).sqrt();
        }
        if (hat - rho).abs() <= sigmas * se {
            inside += 1;
        }
    }
    inside as f64 / (t + 1) as f64
}
