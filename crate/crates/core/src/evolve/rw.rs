use crate::error::{Error, Result};
use crate::lattice::{JumpSchedule, ProbabilitySequence};
use crate::scalar::{tol, Scalar};

/// Master equation of the inhomogeneous walk,
/// `rho(n, t) = p(n-1, t-1) rho(n-1, t-1) + (1 - p(n+1, t-1)) rho(n+1, t-1)`,
/// run for `steps` steps from a walker at the origin.
pub fn evolve_rw_exact<T: Scalar>(schedule: &JumpSchedule<T>, steps: usize) -> Result<ProbabilitySequence<T>> {
    if steps > schedule.horizon() {
        return Err(Error::Horizon { requested: steps, available: schedule.horizon() });
    }
    let coverage = T::tol(tol::COVERAGE);
    let mut slices: Vec<Vec<T>> = Vec::with_capacity(steps + 1);
    slices.push(vec![T::one()]);
    for t in 0..steps {
        let cur = &slices[t];
        let mut next = vec![T::zero(); t + 2];
        for (k, &mass) in cur.iter().enumerate() {
            let n = 2 * k as i64 - t as i64;
            match schedule.probability(n, t) {
                Some(p) => {
                    let right = p * mass;
                    next[k + 1] = next[k + 1] + right;
                    next[k] = next[k] + (mass - right);
                }
                None if mass <= coverage => {}
                None => return Err(Error::Coverage { n, t, weight: mass.as_f64() }),
            }
        }
        slices.push(next);
    }
    ProbabilitySequence::new(slices)
}
