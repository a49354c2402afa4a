use crate::error::{Error, Result};
use crate::lattice::{CoinSchedule, FluxField, Lattice, WaveField};
use crate::scalar::{tol, Scalar};

/// Evolves a real walker from `init = (psi_plus(0,0), psi_minus(0,0))`
/// through every step of `schedule`:
///
/// ```text
/// psi_plus(n+1, t+1)  = cos(theta) psi_plus(n, t) + sin(theta) psi_minus(n, t)
/// psi_minus(n-1, t+1) = sin(theta) psi_plus(n, t) - cos(theta) psi_minus(n, t)
/// ```
///
/// Undefined sites may only be visited with amplitudes below `1e-12`; they
/// pass nothing on.
pub fn evolve_qw<T: Scalar>(schedule: &CoinSchedule<T>, init: (T, T)) -> Result<WaveField<T>> {
    let (a0, b0) = init;
    let norm = a0 * a0 + b0 * b0;
    if !((norm - T::one()).abs() <= T::tol(tol::NORM)) {
        return Err(Error::Domain(format!("initial state has norm {}", norm.as_f64())));
    }
    let steps = schedule.horizon();
    let coverage = T::tol(tol::COVERAGE);
    let mut plus = Vec::with_capacity(steps + 1);
    let mut minus = Vec::with_capacity(steps + 1);
    plus.push(vec![a0]);
    minus.push(vec![b0]);
    for t in 0..steps {
        let (cur_p, cur_m) = (&plus[t], &minus[t]);
        let mut next_p = vec![T::zero(); t + 2];
        let mut next_m = vec![T::zero(); t + 2];
        for (k, (&a, &b)) in cur_p.iter().zip(cur_m.iter()).enumerate() {
            let n = 2 * k as i64 - t as i64;
            match schedule.angle(n, t) {
                Some(theta) => {
                    let (s, c) = theta.sin_cos();
                    next_p[k + 1] = c * a + s * b;
                    next_m[k] = s * a - c * b;
                }
                None if a.abs() <= coverage && b.abs() <= coverage => {}
                None => {
                    return Err(Error::Coverage { n, t, weight: (a * a + b * b).as_f64() });
                }
            }
        }
        plus.push(next_p);
        minus.push(next_m);
    }
    WaveField::new(Lattice::from_slices(plus)?, Lattice::from_slices(minus)?)
}

/// J(n, t) = psi_plus^2(n+1, t+1) - psi_minus^2(n-1, t+1) read off a wave field.
pub fn qw_flux<T: Scalar>(w: &WaveField<T>) -> FluxField<T> {
    let lattice = Lattice::from_fn(w.horizon(), |n, t| {
        let p = w.plus(n + 1, t + 1);
        let m = w.minus(n - 1, t + 1);
        p * p - m * m
    });
    FluxField::new(lattice)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::probability_from_wavefield;

    #[test]
    fn ballistic_coin_moves_right() {
        let schedule = CoinSchedule::homogeneous(0.0f64, 12).unwrap();
        let w = evolve_qw(&schedule, (1.0, 0.0)).unwrap();
        let rho = probability_from_wavefield(&w).unwrap();
        for t in 0..=12 {
            assert_eq!(w.plus(t as i64, t).abs(), 1.0);
            assert_eq!(rho.rho(t as i64, t), 1.0);
        }
    }

    #[test]
    fn rejects_unnormalized_initial_state() {
        let schedule = CoinSchedule::homogeneous(0.3f64, 2).unwrap();
        assert!(evolve_qw(&schedule, (1.0, 0.5)).is_err());
    }

    #[test]
    fn undefined_site_with_weight_is_a_coverage_error() {
        let angles = Lattice::from_slices(vec![vec![Some(std::f64::consts::FRAC_PI_4)], vec![None, Some(0.2)]]).unwrap();
        let schedule = CoinSchedule::new(angles).unwrap();
        match evolve_qw(&schedule, (1.0, 0.0)) {
            Err(Error::Coverage { n: -1, t: 1, weight }) => assert!((weight - 0.5).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn undefined_site_without_weight_is_skipped() {
        // theta = 0 sends everything right; the left site at t=1 is empty
        let angles = Lattice::from_slices(vec![vec![Some(0.0f64)], vec![None, Some(0.2)]]).unwrap();
        let schedule = CoinSchedule::new(angles).unwrap();
        let w = evolve_qw(&schedule, (1.0, 0.0)).unwrap();
        assert!((w.norm_squared(2) - 1.0).abs() < 1e-15);
    }
}
