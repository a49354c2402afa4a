//! Closed-form solution of the homogeneous walk through the kernel
//!
//! ```text
//! Lambda(n, t) = 1/(t+1) { (1 + (-1)^t)/2
//!                + sum_{r=1..t} cos[(t-1) w_r - pi r n/(t+1)] / cos(w_r) },
//! w_r = arcsin(cos(theta) sin(pi r/(t+1))).
//! ```

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::lattice::{ComplexWaveField, Lattice};
use crate::scalar::{tol, Scalar};
use crate::sum::NeumaierSum;

use super::complex::{evolve_qw_complex, HomogeneousCoinParams};

/// Mode angles of the kernel for a fixed `(theta, t)`, reusable across `n`.
#[derive(Debug, Clone)]
pub struct LambdaTable<T> {
    t: usize,
    /// `(t - 1) w_r` and `1 / cos(w_r)` for r = 1..=t.
    modes: Vec<(T, T)>,
}

impl<T: Scalar> LambdaTable<T> {
    pub fn new(theta: T, t: usize) -> Result<Self> {
        if !theta.is_finite() || theta.sin().abs() < T::tol(tol::DEGENERATE_SIN) {
            return Err(Error::Domain(format!(
                "kernel degenerates for theta = {} (|sin theta| < 1e-9)",
                theta.as_f64()
            )));
        }
        let cos_theta = theta.cos();
        let denom = T::lit((t + 1) as f64);
        let tm1 = T::lit(t as f64 - 1.0);
        let modes = (1..=t)
            .map(|r| {
                let w = (cos_theta * (T::PI() * T::lit(r as f64) / denom).sin()).asin();
                (tm1 * w, T::one() / w.cos())
            })
            .collect();
        Ok(Self { t, modes })
    }

    pub fn eval(&self, n: i64) -> T {
        let denom = T::lit((self.t + 1) as f64);
        let mut acc = NeumaierSum::new();
        if self.t.is_multiple_of(2) {
            acc.add(T::one());
        }
        for (r, &(phase, sec)) in self.modes.iter().enumerate() {
            let arg = phase - T::PI() * T::lit((r + 1) as f64 * n as f64) / denom;
            acc.add(sec * arg.cos());
        }
        acc.value() / denom
    }
}

/// Lambda(n, t) for `|n| <= t`.
pub fn lambda_kernel<T: Scalar>(n: i64, t: usize, theta: T) -> Result<T> {
    if n.unsigned_abs() as usize > t {
        return Err(Error::Cone { n, t: t as i64 });
    }
    Ok(LambdaTable::new(theta, t)?.eval(n))
}

/// Kernel values for every `t` in `0..=max_t` and `|n| <= t`, indexed `[t][n + t]`.
struct KernelGrid<T> {
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> KernelGrid<T> {
    fn new(theta: T, max_t: usize) -> Result<Self> {
        let rows = (0..=max_t)
            .map(|t| {
                let table = LambdaTable::new(theta, t)?;
                Ok((-(t as i64)..=t as i64).map(|n| table.eval(n)).collect())
            })
            .collect::<Result<_>>()?;
        Ok(Self { rows })
    }

    fn get(&self, n: i64, t: usize) -> T {
        let ti = t as i64;
        if n.abs() > ti {
            return T::zero();
        }
        self.rows[t][(n + ti) as usize]
    }
}

/// Wave function of the homogeneous walk assembled from the kernel:
///
/// ```text
/// psi_plus(n, t)  = e^{i(chi t + alpha n)} [psi_plus(0,0)  Lambda(n, t) + e^{-i(chi+alpha)} psi_plus(1,1)   Lambda(n-1, t+1)]
/// psi_minus(n, t) = e^{i(chi t + alpha n)} [psi_minus(0,0) Lambda(n, t) + e^{-i(chi-alpha)} psi_minus(-1,1) Lambda(n+1, t+1)]
/// ```
///
/// Coins with `|sin theta| < 1e-9` fall back to [`evolve_qw_complex`].
pub fn closed_form_wavefield<T: Scalar>(params: &HomogeneousCoinParams<T>, horizon: usize) -> Result<ComplexWaveField<T>> {
    params.validate()?;
    if params.theta.sin().abs() < T::tol(tol::DEGENERATE_SIN) {
        return evolve_qw_complex(params, horizon);
    }
    let grid = KernelGrid::new(params.theta, horizon + 1)?;
    let (p00, m00) = params.initial_state();
    let (p11, m11) = params.first_step();
    let p11 = p11 * Complex::from_polar(T::one(), -(params.chi + params.alpha));
    let m11 = m11 * Complex::from_polar(T::one(), -(params.chi - params.alpha));
    let phase = |n: i64, t: usize| {
        Complex::from_polar(T::one(), params.chi * T::lit(t as f64) + params.alpha * T::lit(n as f64))
    };
    let plus = Lattice::from_fn(horizon + 1, |n, t| {
        phase(n, t) * (p00 * grid.get(n, t) + p11 * grid.get(n - 1, t + 1))
    });
    let minus = Lattice::from_fn(horizon + 1, |n, t| {
        phase(n, t) * (m00 * grid.get(n, t) + m11 * grid.get(n + 1, t + 1))
    });
    ComplexWaveField::new(plus, minus)
}

/// Large-t envelope of the density inside the bulk `|n| < t |cos theta|`.
///
/// The envelope gives the probability per occupied site; it does not
/// resolve the interference oscillations of the exact density.
pub fn asymptotic_density<T: Scalar>(params: &HomogeneousCoinParams<T>, n: i64, t: usize) -> Result<T> {
    params.validate()?;
    let (nf, tf) = (T::lit(n as f64), T::lit(t as f64));
    let (sin_t, cos_t) = params.theta.sin_cos();
    if t == 0 || nf.abs() >= tf * cos_t.abs() {
        return Err(Error::Domain(format!(
            "site n={n} at t={t} lies outside the bulk |n| < t |cos theta|"
        )));
    }
    let two_eta = params.eta + params.eta;
    let drift = two_eta.cos() + two_eta.sin() * params.theta.tan() * params.varphi().cos();
    let radicand = tf * tf * cos_t * cos_t - nf * nf;
    Ok(T::lit(2.0) / T::PI() * tf / (tf * tf - nf * nf) * sin_t / radicand.sqrt() * (tf + nf * drift))
}

/// The two conditions for an exactly symmetric density; both vanish for symmetric walks.
///
/// `a = cos 2eta cos theta + sin 2eta sin theta cos varphi`,
/// `b = cos 2eta cos 2theta + sin 2eta sin 2theta cos varphi`.
pub fn symmetry_conditions<T: Scalar>(params: &HomogeneousCoinParams<T>) -> (T, T) {
    let two_eta = params.eta + params.eta;
    let two_theta = params.theta + params.theta;
    let cos_phi = params.varphi().cos();
    let a = two_eta.cos() * params.theta.cos() + two_eta.sin() * params.theta.sin() * cos_phi;
    let b = two_eta.cos() * two_theta.cos() + two_eta.sin() * two_theta.sin() * cos_phi;
    (a, b)
}

/// Density of the symmetric walk (`eta = pi/4`, `varphi = -pi/2`):
/// `rho = Lambda^2(n+1,t+1)/2 + Lambda^2(n-1,t+1)/2 + Lambda(n,t) Lambda(n,t+2)`.
pub fn symmetric_hadamard_density<T: Scalar>(n: i64, t: usize, theta: T) -> Result<T> {
    if n.unsigned_abs() as usize > t {
        return Err(Error::Cone { n, t: t as i64 });
    }
    let next = LambdaTable::new(theta, t + 1)?;
    let here = LambdaTable::new(theta, t)?.eval(n);
    let later = LambdaTable::new(theta, t + 2)?.eval(n);
    let half = T::lit(0.5);
    let (right, left) = (next.eval(n + 1), next.eval(n - 1));
    Ok(half * right * right + half * left * left + here * later)
}

/// Jump probability that lets a random walk follow the symmetric walk:
/// `p(n, t) = |psi_plus(n+1, t+1)|^2 / rho(n, t)` with
/// `|psi_plus(n+1, t+1)|^2 = Lambda^2(n+1,t+1)/2 + Lambda^2(n,t+2)/2 + cos(theta) Lambda(n+1,t+1) Lambda(n,t+2)`.
pub fn symmetric_hadamard_jump<T: Scalar>(n: i64, t: usize, theta: T) -> Result<T> {
    let rho = symmetric_hadamard_density(n, t, theta)?;
    let a = LambdaTable::new(theta, t + 1)?.eval(n + 1);
    let b = LambdaTable::new(theta, t + 2)?.eval(n);
    let half = T::lit(0.5);
    Ok((half * a * a + half * b * b + theta.cos() * a * b) / rho)
}
