use num_complex::Complex;

use crate::error::{Error, Result};
use crate::lattice::{ComplexWaveField, Lattice};
use crate::scalar::Scalar;

/// The most general homogeneous coin,
///
/// ```text
/// U = e^{i chi} [[ e^{i alpha} cos(theta),  e^{-i beta} sin(theta) ],
///                [ e^{i beta}  sin(theta), -e^{-i alpha} cos(theta) ]]
/// ```
///
/// together with the initial chirality `(cos(eta), e^{i gamma} sin(eta))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneousCoinParams<T> {
    pub theta: T,
    pub eta: T,
    pub gamma: T,
    pub chi: T,
    pub alpha: T,
    pub beta: T,
}

impl<T: Scalar> HomogeneousCoinParams<T> {
    /// A coin with `chi = alpha = beta = 0`.
    pub fn new(theta: T, eta: T, gamma: T) -> Self {
        Self { theta, eta, gamma, chi: T::zero(), alpha: T::zero(), beta: T::zero() }
    }

    pub fn with_phases(self, chi: T, alpha: T, beta: T) -> Self {
        Self { chi, alpha, beta, ..self }
    }

    /// Hadamard coin with the real initial state `(sqrt(2-sqrt2)/2, sqrt(2+sqrt2)/2)`,
    /// i.e. `eta = 3 pi / 8`: its density is nearly symmetric.
    pub fn quasi_symmetric_hadamard() -> Self {
        Self::new(T::FRAC_PI_4(), T::lit(3.0) * T::FRAC_PI_8(), T::zero())
    }

    /// Hadamard coin with `eta = pi / 4`, `gamma = pi / 2`: exactly symmetric density.
    pub fn symmetric_hadamard() -> Self {
        Self::new(T::FRAC_PI_4(), T::FRAC_PI_4(), T::FRAC_PI_2())
    }

    /// The only combination of `alpha`, `beta`, `gamma` the density depends on.
    pub fn varphi(&self) -> T {
        self.alpha + self.beta - self.gamma
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.theta, self.eta, self.gamma, self.chi, self.alpha, self.beta];
        if all.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::Domain("coin angles must be finite".into()))
        }
    }

    /// Coin matrix, row-major.
    pub fn coin(&self) -> [[Complex<T>; 2]; 2] {
        let (s, c) = self.theta.sin_cos();
        let phase = |x: T| Complex::from_polar(T::one(), self.chi + x);
        [
            [phase(self.alpha) * c, phase(-self.beta) * s],
            [phase(self.beta) * s, -phase(-self.alpha) * c],
        ]
    }

    pub fn initial_state(&self) -> (Complex<T>, Complex<T>) {
        let (s, c) = self.eta.sin_cos();
        (Complex::new(c, T::zero()), Complex::from_polar(s, self.gamma))
    }

    /// The two non-zero amplitudes after one step: `(psi_plus(1, 1), psi_minus(-1, 1))`.
    pub fn first_step(&self) -> (Complex<T>, Complex<T>) {
        let u = self.coin();
        let (p, m) = self.initial_state();
        (u[0][0] * p + u[0][1] * m, u[1][0] * p + u[1][1] * m)
    }

    pub fn cast<U: Scalar>(&self) -> HomogeneousCoinParams<U> {
        let c = |x: T| U::lit(x.as_f64());
        HomogeneousCoinParams {
            theta: c(self.theta),
            eta: c(self.eta),
            gamma: c(self.gamma),
            chi: c(self.chi),
            alpha: c(self.alpha),
            beta: c(self.beta),
        }
    }
}

/// Step-by-step evolution of the homogeneous complex walk up to `horizon`.
pub fn evolve_qw_complex<T: Scalar>(params: &HomogeneousCoinParams<T>, horizon: usize) -> Result<ComplexWaveField<T>> {
    params.validate()?;
    let u = params.coin();
    let zero = Complex::new(T::zero(), T::zero());
    let (p0, m0) = params.initial_state();
    let mut plus = vec![vec![p0]];
    let mut minus = vec![vec![m0]];
    for t in 0..horizon {
        let mut next_p = vec![zero; t + 2];
        let mut next_m = vec![zero; t + 2];
        for (k, (&a, &b)) in plus[t].iter().zip(minus[t].iter()).enumerate() {
            next_p[k + 1] = u[0][0] * a + u[0][1] * b;
            next_m[k] = u[1][0] * a + u[1][1] * b;
        }
        plus.push(next_p);
        minus.push(next_m);
    }
    ComplexWaveField::new(Lattice::from_slices(plus)?, Lattice::from_slices(minus)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn coin_is_unitary() {
        let params = HomogeneousCoinParams::new(0.7f64, 0.3, 1.1).with_phases(0.4, -1.2, 2.5);
        let u = params.coin();
        for i in 0..2 {
            for j in 0..2 {
                let dot = u[0][i].conj() * u[0][j] + u[1][i].conj() * u[1][j];
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((dot.re - expected).abs() < 1e-12 && dot.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eta_zero_starts_in_plus_state() {
        let w = evolve_qw_complex(&HomogeneousCoinParams::new(FRAC_PI_4, 0.0, 0.3), 0).unwrap();
        assert_eq!(w.plus(0, 0), Complex::new(1.0, 0.0));
        assert_eq!(w.minus(0, 0).norm(), 0.0);
    }

    #[test]
    fn first_step_matches_displayed_components() {
        let p = HomogeneousCoinParams::new(0.9f64, 0.4, 1.3).with_phases(0.2, 0.7, -0.5);
        let (plus, minus) = p.first_step();
        let e = |x: f64| Complex::from_polar(1.0, x);
        let expected_plus = e(p.chi)
            * (e(p.alpha) * p.eta.cos() * p.theta.cos() + e(p.gamma - p.beta) * p.eta.sin() * p.theta.sin());
        let expected_minus = e(p.chi)
            * (e(p.beta) * p.eta.cos() * p.theta.sin() - e(p.gamma - p.alpha) * p.eta.sin() * p.theta.cos());
        assert!((plus - expected_plus).norm() < 1e-15);
        assert!((minus - expected_minus).norm() < 1e-15);
        let w = evolve_qw_complex(&p, 1).unwrap();
        assert_eq!(w.plus(1, 1), plus);
        assert_eq!(w.minus(-1, 1), minus);
        assert_eq!(w.plus(-1, 1).norm(), 0.0);
        assert_eq!(w.minus(1, 1).norm(), 0.0);
    }

    #[test]
    fn global_phase_does_not_change_density() {
        let a = evolve_qw_complex(&HomogeneousCoinParams::new(1.0f64, 0.6, 0.2), 40).unwrap();
        let b = evolve_qw_complex(&HomogeneousCoinParams::new(1.0f64, 0.6, 0.2).with_phases(1.3, 0.0, 0.0), 40)
            .unwrap();
        let (ra, rb) = (a.probability().unwrap(), b.probability().unwrap());
        assert!(ra.max_abs_diff(&rb) < 1e-14);
    }

    #[test]
    fn norm_is_preserved() {
        let w = evolve_qw_complex(&HomogeneousCoinParams::new(PI / 3.0, 0.2, 0.9).with_phases(0.1, 0.2, 0.3), 300)
            .unwrap();
        for t in 0..=300 {
            assert!((w.norm_squared(t) - 1.0).abs() < 1e-12);
        }
    }
}
