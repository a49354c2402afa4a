//! Inverse problem: coin angles and jump probabilities that realize a
//! prescribed probability sequence.
//!
//! For a real quantum walker started in `(1, 0)` the amplitudes are fixed
//! by rho alone (for t >= 1):
//!
//! ```text
//! psi_plus^2(n, t)  = sum_{m>=n} rho(m, t) - sum_{m>=n+1} rho(m, t-1) = (rho(n-1, t-1) + J(n-1, t-1)) / 2
//! psi_minus^2(n, t) = sum_{m>=n+1} rho(m, t-1) - sum_{m>=n+2} rho(m, t) = (rho(n+1, t-1) - J(n+1, t-1)) / 2
//! ```
//!
//! The partial sums are accumulated inward from the nearer cone edge, where
//! they stay accurate relative to the amplitudes they produce.
//! The coin at `(n, t)` is then the reflection that maps
//! `(psi_plus, psi_minus)(n, t)` onto `(psi_plus(n+1, t+1), psi_minus(n-1, t+1))`.

use crate::error::{Error, Result};
use crate::feasibility::{flux_from_rho, validate};
use crate::sum::NeumaierSum;
use crate::lattice::{
    CoinSchedule, ComplexWaveField, FluxField, JumpSchedule, Lattice, ProbabilitySequence, WaveField,
};
use crate::scalar::{tol, Scalar};

/// Squared amplitudes of slice `t >= 1` as `(plus, minus)`, indexed by storage index.
///
/// Each pass runs one compensated sum over the interleaved terms
/// `rho(., t)` and `-rho(., t-1)` from its cone edge inward; its partial
/// values alternate between `psi_plus^2` and `-psi_minus^2` (right edge) or
/// `psi_minus^2` and `-psi_plus^2` (left edge). Sites left of the slice
/// maximum take the left pass.
fn squared_amplitudes<T: Scalar>(rho: &ProbabilitySequence<T>, t: usize) -> (Vec<T>, Vec<T>) {
    let ti = t as i64;
    let mut right_plus = vec![T::zero(); t + 1];
    let mut right_minus = vec![T::zero(); t + 1];
    let mut acc = NeumaierSum::<T>::new();
    for k in (0..=t).rev() {
        let n = 2 * k as i64 - ti;
        right_minus[k] = -acc.value();
        acc.add(rho.rho(n, t));
        right_plus[k] = acc.value();
        acc.add(-rho.rho(n - 1, t - 1));
    }
    let mut left_plus = vec![T::zero(); t + 1];
    let mut left_minus = vec![T::zero(); t + 1];
    let mut acc = NeumaierSum::<T>::new();
    for k in 0..=t {
        let n = 2 * k as i64 - ti;
        left_plus[k] = -acc.value();
        acc.add(rho.rho(n, t));
        left_minus[k] = acc.value();
        acc.add(-rho.rho(n + 1, t - 1));
    }
    let slice = rho.slice(t);
    let mut pivot = 0;
    for (k, v) in slice.iter().enumerate() {
        if *v > slice[pivot] {
            pivot = k;
        }
    }
    // each edge site comes from its own pass, where it is exact
    let use_left = |k: usize| k == 0 || (k < pivot && k != t);
    let pick = |left: Vec<T>, right: Vec<T>| -> Vec<T> {
        left.into_iter().zip(right).enumerate().map(|(k, (l, r))| if use_left(k) { l } else { r }).collect()
    };
    (pick(left_plus, right_plus), pick(left_minus, right_minus))
}

/// Real wave field whose density is `rho`, with `psi(0, 0) = (1, 0)`.
pub fn reconstruct_wavefield<T: Scalar>(rho: &ProbabilitySequence<T>) -> Result<WaveField<T>> {
    let clamp = T::tol(tol::CLAMP);
    let amplitude = |sq: T, n: i64, t: usize, which: &str| -> Result<T> {
        if sq < -clamp {
            return Err(Error::Infeasible {
                n,
                t,
                detail: format!("{which}^2 = {} is negative", sq.as_f64()),
            });
        }
        Ok(sq.max(T::zero()).sqrt())
    };
    let mut plus = vec![vec![T::one()]];
    let mut minus = vec![vec![T::zero()]];
    for t in 1..=rho.horizon() {
        let (sq_plus, sq_minus) = squared_amplitudes(rho, t);
        let mut p = Vec::with_capacity(t + 1);
        let mut m = Vec::with_capacity(t + 1);
        for k in 0..=t {
            let n = 2 * k as i64 - t as i64;
            p.push(amplitude(sq_plus[k], n, t, "psi_plus")?);
            m.push(amplitude(sq_minus[k], n, t, "psi_minus")?);
        }
        plus.push(p);
        minus.push(m);
    }
    WaveField::new(Lattice::from_slices(plus)?, Lattice::from_slices(minus)?)
}

/// Coin angles mapping each slice of `w` onto the next; `rho_at(n, t)` is
/// the density the field carries at `(n, t)`.
fn coins_for_field<T: Scalar>(
    w: &WaveField<T>,
    steps: usize,
    rho_at: impl Fn(i64, usize) -> T,
) -> Result<CoinSchedule<T>> {
    let unit = T::tol(tol::UNIT_NORM);
    let sin_noise = T::tol(tol::PROBABILITY);
    let mut slices = Vec::with_capacity(steps);
    for t in 0..steps {
        let mut slice = Vec::with_capacity(t + 1);
        for k in 0..=t {
            let n = 2 * k as i64 - t as i64;
            let r = rho_at(n, t);
            if r == T::zero() {
                slice.push(None);
                continue;
            }
            let (a, b) = (w.plus(n, t), w.minus(n, t));
            let (x, y) = (w.plus(n + 1, t + 1), w.minus(n - 1, t + 1));
            let cos = (a * x - b * y) / r;
            let sin = (b * x + a * y) / r;
            let defect = (cos * cos + sin * sin - T::one()).abs();
            if !(defect <= unit) {
                return Err(Error::Integrity {
                    n,
                    t,
                    detail: format!("cos^2 + sin^2 - 1 = {:e}", defect.as_f64()),
                });
            }
            if sin < -sin_noise {
                return Err(Error::Integrity {
                    n,
                    t,
                    detail: format!("sin(theta) = {} is negative", sin.as_f64()),
                });
            }
            let theta = sin.max(T::zero()).atan2(cos).max(T::zero()).min(T::PI());
            slice.push(Some(theta));
        }
        slices.push(slice);
    }
    CoinSchedule::new(Lattice::from_slices(slices)?)
}

/// Coin schedule that drives `w = reconstruct_wavefield(rho)` from slice to
/// slice. Sites with rho = 0 are left undefined.
pub fn synthesize_coins<T: Scalar>(rho: &ProbabilitySequence<T>, w: &WaveField<T>) -> Result<CoinSchedule<T>> {
    if w.horizon() != rho.horizon() {
        return Err(Error::Horizon { requested: rho.horizon(), available: w.horizon() });
    }
    coins_for_field(w, rho.horizon(), |n, t| rho.rho(n, t))
}

fn jump_probability<T: Scalar>(numerator: T, rho: T, n: i64, t: usize) -> Result<T> {
    let slack = T::tol(tol::PROBABILITY);
    let p = numerator / rho;
    if !(p >= -slack && p <= T::one() + slack) {
        return Err(Error::Infeasible {
            n,
            t,
            detail: format!("jump probability {} outside [0, 1]", p.as_f64()),
        });
    }
    Ok(p.max(T::zero()).min(T::one()))
}

/// p(n, t) = (rho + J) / (2 rho); undefined where rho = 0.
pub fn synthesize_jumps<T: Scalar>(rho: &ProbabilitySequence<T>, flux: &FluxField<T>) -> Result<JumpSchedule<T>> {
    if flux.horizon() != rho.horizon() {
        return Err(Error::Horizon { requested: rho.horizon(), available: flux.horizon() });
    }
    let two = T::lit(2.0);
    let mut slices = Vec::with_capacity(rho.horizon());
    for t in 0..rho.horizon() {
        let mut slice = Vec::with_capacity(t + 1);
        for k in 0..=t {
            let n = 2 * k as i64 - t as i64;
            let r = rho.rho(n, t);
            if r == T::zero() {
                slice.push(None);
            } else {
                slice.push(Some(jump_probability(r + flux.flux(n, t), two * r, n, t)?));
            }
        }
        slices.push(slice);
    }
    JumpSchedule::new(Lattice::from_slices(slices)?)
}

/// Random walk with the same density as a quantum walk:
/// p(n, t) = |psi_plus(n+1, t+1)|^2 / rho(n, t).
pub fn mimic_quantum_walk<T: Scalar>(qw: &ComplexWaveField<T>) -> Result<JumpSchedule<T>> {
    let rho = qw.probability()?;
    let mut slices = Vec::with_capacity(qw.horizon());
    for t in 0..qw.horizon() {
        let mut slice = Vec::with_capacity(t + 1);
        for k in 0..=t {
            let n = 2 * k as i64 - t as i64;
            let r = rho.rho(n, t);
            if r == T::zero() {
                slice.push(None);
            } else {
                slice.push(Some(jump_probability(qw.plus(n + 1, t + 1).norm_sqr(), r, n, t)?));
            }
        }
        slices.push(slice);
    }
    JumpSchedule::new(Lattice::from_slices(slices)?)
}

/// Real inhomogeneous quantum walk with the density of a complex one:
/// amplitudes are replaced by their moduli and the coins re-derived.
pub fn realify_quantum_walk<T: Scalar>(qw: &ComplexWaveField<T>) -> Result<(WaveField<T>, CoinSchedule<T>)> {
    let rho = qw.probability_lattice();
    let real = WaveField::new(qw.plus_lattice().map(|c| c.norm()), qw.minus_lattice().map(|c| c.norm()))?;
    let coins = coins_for_field(&real, qw.horizon(), |n, t| rho.value(n, t))?;
    Ok((real, coins))
}

fn ensure_feasible<T: Scalar>(rho: &ProbabilitySequence<T>) -> Result<()> {
    let report = validate(rho);
    if let Some(v) = report.violations.first() {
        return Err(Error::Infeasible {
            n: v.n,
            t: v.t,
            detail: format!("|J| = {} exceeds rho = {}", v.flux.abs(), v.rho),
        });
    }
    if !report.feasible {
        return Err(Error::Integrity {
            n: 0,
            t: 0,
            detail: format!("flux recursions disagree by {:e}", report.pass_disagreement),
        });
    }
    Ok(())
}

/// Validates `rho` and returns the quantum-walk coin schedule realizing it
/// from the initial state `(1, 0)`.
pub fn synthesize_qw<T: Scalar>(rho: &ProbabilitySequence<T>) -> Result<CoinSchedule<T>> {
    ensure_feasible(rho)?;
    let w = reconstruct_wavefield(rho)?;
    synthesize_coins(rho, &w)
}

/// Validates `rho` and returns the random-walk jump schedule realizing it.
pub fn synthesize_rw<T: Scalar>(rho: &ProbabilitySequence<T>) -> Result<JumpSchedule<T>> {
    ensure_feasible(rho)?;
    synthesize_jumps(rho, &flux_from_rho(rho))
}
