//! Feasibility of a probability sequence under nearest-neighbour dynamics.
//!
//! Conservation ties every slice to the next through the net flux J(n, t):
//!
//! ```text
//! J(n+2, t) = J(n, t) + rho(n, t) + rho(n+2, t) - 2 rho(n+1, t+1)
//! ```
//!
//! anchored either at the left cone edge, `J(-t, t) = rho(-t, t) - 2 rho(-t-1, t+1)`,
//! or at the right one, `J(t, t) = 2 rho(t+1, t+1) - rho(t, t)`. A sequence
//! is realizable by some walk exactly when `|J| <= rho` everywhere.
//!
//! Both recursions are run with compensated accumulation. Each one is exact
//! in relative terms near its own anchor and loses relative accuracy in the
//! far tail, so the published flux takes every site from the pass anchored
//! on its side of the slice's dominant site.

use rayon::prelude::*;
use serde::Serialize;

use crate::lattice::{from_storage_index, Lattice, LatticeIndex, ProbabilitySequence};
use crate::lattice::FluxField;
use crate::scalar::{tol, Scalar};
use crate::sum::NeumaierSum;

/// Flux of slice `t` from the left-edge recursion.
pub fn flux_left_to_right<T: Scalar>(rho: &ProbabilitySequence<T>, t: usize) -> Vec<T> {
    let ti = t as i64;
    let two = T::lit(2.0);
    let mut out = Vec::with_capacity(t + 1);
    let mut acc = NeumaierSum::starting_at(rho.rho(-ti, t));
    acc.add(-two * rho.rho(-ti - 1, t + 1));
    out.push(acc.value());
    for k in 1..=t {
        let n = from_storage_index(k - 1, t);
        acc.add(rho.rho(n, t));
        acc.add(rho.rho(n + 2, t));
        acc.add(-two * rho.rho(n + 1, t + 1));
        out.push(acc.value());
    }
    out
}

/// Flux of slice `t` from the right-edge recursion.
pub fn flux_right_to_left<T: Scalar>(rho: &ProbabilitySequence<T>, t: usize) -> Vec<T> {
    let ti = t as i64;
    let two = T::lit(2.0);
    let mut out = vec![T::zero(); t + 1];
    let mut acc = NeumaierSum::starting_at(two * rho.rho(ti + 1, t + 1));
    acc.add(-rho.rho(ti, t));
    out[t] = acc.value();
    for k in (0..t).rev() {
        let n = from_storage_index(k, t);
        acc.add(-rho.rho(n, t));
        acc.add(-rho.rho(n + 2, t));
        acc.add(two * rho.rho(n + 1, t + 1));
        out[k] = acc.value();
    }
    out
}

/// Combines both passes for slice `t`: sites left of the most probable site
/// of slice `t + 1` come from the left pass, the rest from the right pass.
fn stitch<T: Scalar>(rho: &ProbabilitySequence<T>, t: usize, left: &[T], right: &[T]) -> Vec<T> {
    let next = rho.slice(t + 1);
    let mut pivot = 0;
    for (k, v) in next.iter().enumerate() {
        if *v > next[pivot] {
            pivot = k;
        }
    }
    // slice-(t+1) site k sits between slice-t sites k-1 and k
    (0..=t).map(|k| if k < pivot { left[k] } else { right[k] }).collect()
}

/// Net flux J(n, t) for t = 0..horizon-1.
pub fn flux_from_rho<T: Scalar>(rho: &ProbabilitySequence<T>) -> FluxField<T> {
    let slices: Vec<Vec<T>> = (0..rho.horizon())
        .into_par_iter()
        .map(|t| {
            let left = flux_left_to_right(rho, t);
            let right = flux_right_to_left(rho, t);
            stitch(rho, t, &left, &right)
        })
        .collect();
    FluxField::new(Lattice::from_slices(slices).expect("triangular by construction"))
}

/// A site where the flux bound |J| <= rho + tol fails.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub n: i64,
    pub t: usize,
    #[serde(rename = "J")]
    pub flux: f64,
    pub rho: f64,
}

/// Outcome of [`validate_sequence`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// Every site with |J| > rho + tol, in (t, n) order.
    pub violations: Vec<Violation>,
    /// Sites where the walker is pushed deterministically (|J| = rho within tol, rho > 0).
    pub saturated: Vec<LatticeIndex>,
    /// Sites with rho = 0 and |J| <= tol: feasible, local dynamics undefined.
    pub undefined: Vec<LatticeIndex>,
    /// Largest disagreement between the left and right flux recursions.
    pub pass_disagreement: f64,
    pub tolerance: f64,
}

#[derive(Default)]
struct SliceReport {
    violations: Vec<Violation>,
    saturated: Vec<LatticeIndex>,
    undefined: Vec<LatticeIndex>,
    disagreement: f64,
}

/// Checks the bound |J(n, t)| <= rho(n, t) + tol on every site with t < horizon.
///
/// The two recursions must also agree within `1e-10`; a larger gap means
/// the input does not conserve probability and the sequence is reported
/// infeasible even when the bound holds.
pub fn validate_sequence<T: Scalar>(rho: &ProbabilitySequence<T>, tolerance: T) -> FeasibilityReport {
    let parts: Vec<SliceReport> = (0..rho.horizon())
        .into_par_iter()
        .map(|t| {
            let left = flux_left_to_right(rho, t);
            let right = flux_right_to_left(rho, t);
            let flux = stitch(rho, t, &left, &right);
            let mut part = SliceReport::default();
            for k in 0..=t {
                let n = from_storage_index(k, t);
                part.disagreement = part.disagreement.max((left[k] - right[k]).abs().as_f64());
                let r = rho.rho(n, t);
                let j = flux[k].abs();
                if j > r + tolerance {
                    part.violations.push(Violation { n, t, flux: flux[k].as_f64(), rho: r.as_f64() });
                } else if r == T::zero() {
                    part.undefined.push(LatticeIndex { n, t });
                } else if j >= r - tolerance {
                    part.saturated.push(LatticeIndex { n, t });
                }
            }
            part
        })
        .collect();

    let mut report = FeasibilityReport {
        feasible: true,
        violations: Vec::new(),
        saturated: Vec::new(),
        undefined: Vec::new(),
        pass_disagreement: 0.0,
        tolerance: tolerance.as_f64(),
    };
    for part in parts {
        report.violations.extend(part.violations);
        report.saturated.extend(part.saturated);
        report.undefined.extend(part.undefined);
        report.pass_disagreement = report.pass_disagreement.max(part.disagreement);
    }
    report.feasible =
        report.violations.is_empty() && report.pass_disagreement <= T::tol(tol::FLUX_PASSES).as_f64();
    report
}

/// [`validate_sequence`] with the default tolerance `1e-10`.
pub fn validate<T: Scalar>(rho: &ProbabilitySequence<T>) -> FeasibilityReport {
    validate_sequence(rho, T::tol(tol::FEASIBILITY))
}
