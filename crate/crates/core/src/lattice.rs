//! Parity-respecting index arithmetic and the field containers.
//!
//! A walker started at the origin occupies only sites with `|n| <= t` and
//! `n + t` even. Every container stores exactly those sites: slice `t` is a
//! dense vector of `t + 1` entries indexed by `k = (n + t) / 2`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{tol, Scalar};
use crate::sum::compensated_sum;

/// A site of the space-time lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct LatticeIndex {
    pub n: i64,
    pub t: usize,
}

impl LatticeIndex {
    pub fn new(n: i64, t: i64) -> Result<Self> {
        to_storage_index(n, t)?;
        Ok(Self { n, t: t as usize })
    }

    pub fn storage_index(&self) -> usize {
        ((self.n + self.t as i64) / 2) as usize
    }
}

/// Whether `(n, t)` is reachable from the origin.
#[inline]
pub fn on_support(n: i64, t: i64) -> bool {
    t >= 0 && n.abs() <= t && (n + t).rem_euclid(2) == 0
}

/// Maps an on-support site to its position `k = (n + t) / 2` inside slice `t`.
pub fn to_storage_index(n: i64, t: i64) -> Result<usize> {
    if (n + t).rem_euclid(2) != 0 {
        return Err(Error::Parity { n, t });
    }
    if t < 0 || n.abs() > t {
        return Err(Error::Cone { n, t });
    }
    Ok(((n + t) / 2) as usize)
}

/// Inverse of [`to_storage_index`]: `n = 2k - t`.
#[inline]
pub fn from_storage_index(k: usize, t: usize) -> i64 {
    2 * k as i64 - t as i64
}

#[inline]
fn slot(n: i64, t: usize) -> Option<usize> {
    let ti = t as i64;
    if n.abs() > ti || (n + ti).rem_euclid(2) != 0 {
        None
    } else {
        Some(((n + ti) / 2) as usize)
    }
}

/// Dense triangular storage: slice `t` holds `t + 1` values.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice<V> {
    slices: Vec<Vec<V>>,
}

impl<V> Lattice<V> {
    pub fn from_slices(slices: Vec<Vec<V>>) -> Result<Self> {
        for (t, s) in slices.iter().enumerate() {
            if s.len() != t + 1 {
                return Err(Error::Shape { t, found: s.len(), expected: t + 1 });
            }
        }
        Ok(Self { slices })
    }

    /// Builds `count` slices by evaluating `f(n, t)` on every site.
    pub fn from_fn(count: usize, mut f: impl FnMut(i64, usize) -> V) -> Self {
        let slices = (0..count)
            .map(|t| (0..=t).map(|k| f(from_storage_index(k, t), t)).collect())
            .collect();
        Self { slices }
    }

    /// Number of stored slices.
    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn slice(&self, t: usize) -> &[V] {
        &self.slices[t]
    }

    pub fn slices(&self) -> &[Vec<V>] {
        &self.slices
    }

    pub fn into_slices(self) -> Vec<Vec<V>> {
        self.slices
    }

    /// Value at `(n, t)`, or `None` off-support or past the last slice.
    pub fn get(&self, n: i64, t: usize) -> Option<&V> {
        let k = slot(n, t)?;
        self.slices.get(t).map(|s| &s[k])
    }

    /// Iterates `(t, n, value)` in time-major, left-to-right order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, &V)> + '_ {
        self.slices.iter().enumerate().flat_map(|(t, s)| {
            s.iter().enumerate().map(move |(k, v)| (t, from_storage_index(k, t), v))
        })
    }

    pub fn map<W>(&self, mut f: impl FnMut(&V) -> W) -> Lattice<W> {
        Lattice {
            slices: self.slices.iter().map(|s| s.iter().map(&mut f).collect()).collect(),
        }
    }

    pub fn truncated(&self, count: usize) -> Self
    where
        V: Clone,
    {
        Self { slices: self.slices[..count.min(self.slices.len())].to_vec() }
    }
}

impl<T: Scalar> Lattice<T> {
    /// Value at `(n, t)`, zero anywhere outside the stored support.
    #[inline]
    pub fn value(&self, n: i64, t: usize) -> T {
        self.get(n, t).copied().unwrap_or_else(T::zero)
    }
}

/// Probability function rho(n, t) for t = 0..=horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilitySequence<T> {
    values: Lattice<T>,
}

impl<T: Scalar> ProbabilitySequence<T> {
    /// Validates slices produced by the library: each slice must sum to one
    /// within `1e-12`. Entries in `[-1e-12, 0)` are clamped to zero.
    pub fn new(slices: Vec<Vec<T>>) -> Result<Self> {
        Self::with_tolerance(slices, T::tol(tol::NORM))
    }

    /// Like [`Self::new`] with a caller-chosen normalization tolerance.
    pub fn with_tolerance(slices: Vec<Vec<T>>, norm_tol: T) -> Result<Self> {
        let mut values = Lattice::from_slices(slices)?;
        if values.is_empty() {
            return Err(Error::Domain("probability sequence needs at least one slice".into()));
        }
        let clamp = T::tol(tol::CLAMP);
        for (t, slice) in values.slices.iter_mut().enumerate() {
            for (k, v) in slice.iter_mut().enumerate() {
                if !v.is_finite() {
                    return Err(Error::Negative {
                        n: from_storage_index(k, t),
                        t,
                        value: v.as_f64(),
                    });
                }
                if *v < T::zero() {
                    if *v < -clamp {
                        return Err(Error::Negative {
                            n: from_storage_index(k, t),
                            t,
                            value: v.as_f64(),
                        });
                    }
                    *v = T::zero();
                }
            }
            let sum = compensated_sum(slice.iter().copied());
            if (sum - T::one()).abs() > norm_tol {
                return Err(Error::Normalization { t, sum: sum.as_f64() });
            }
        }
        Ok(Self { values })
    }

    /// Accepts slices normalized within `accept_tol`, then rescales every
    /// slice whose compensated sum is off by more than `1e-15`. Slices
    /// already at unit mass are left bit-for-bit untouched.
    pub fn renormalized(slices: Vec<Vec<T>>, accept_tol: T) -> Result<Self> {
        let checked = Self::with_tolerance(slices, accept_tol)?;
        let mut slices = checked.values.into_slices();
        let exact = T::tol(1e-15);
        for s in slices.iter_mut() {
            let sum = compensated_sum(s.iter().copied());
            if (sum - T::one()).abs() > exact {
                for v in s.iter_mut() {
                    *v = *v / sum;
                }
            }
        }
        Ok(Self { values: Lattice { slices } })
    }

    /// Largest time index stored.
    pub fn horizon(&self) -> usize {
        self.values.len() - 1
    }

    /// rho(n, t); zero off-support and beyond the horizon.
    #[inline]
    pub fn rho(&self, n: i64, t: usize) -> T {
        self.values.value(n, t)
    }

    pub fn slice(&self, t: usize) -> &[T] {
        self.values.slice(t)
    }

    pub fn lattice(&self) -> &Lattice<T> {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, T)> + '_ {
        self.values.iter().map(|(t, n, v)| (t, n, *v))
    }

    pub fn slice_sum(&self, t: usize) -> T {
        compensated_sum(self.slice(t).iter().copied())
    }

    /// Expected position at time `t`.
    pub fn mean_position(&self, t: usize) -> T {
        compensated_sum(
            self.slice(t)
                .iter()
                .enumerate()
                .map(|(k, &v)| T::lit(from_storage_index(k, t) as f64) * v),
        )
    }

    /// The sequence restricted to `t <= horizon`.
    pub fn truncated(&self, horizon: usize) -> Result<Self> {
        if horizon > self.horizon() {
            return Err(Error::Horizon { requested: horizon, available: self.horizon() });
        }
        Ok(Self { values: self.values.truncated(horizon + 1) })
    }

    /// Largest absolute per-entry difference; sequences of different horizon
    /// are compared over their common range.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let common = self.horizon().min(other.horizon());
        let mut worst = T::zero();
        for t in 0..=common {
            for (a, b) in self.slice(t).iter().zip(other.slice(t)) {
                worst = worst.max((*a - *b).abs());
            }
        }
        worst
    }

    pub(crate) fn from_lattice_unchecked(values: Lattice<T>) -> Self {
        Self { values }
    }
}

/// Real chiral components psi_plus(n, t), psi_minus(n, t).
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField<T> {
    plus: Lattice<T>,
    minus: Lattice<T>,
}

impl<T: Scalar> WaveField<T> {
    /// Both components must have the same triangular shape, and the cone
    /// edges that no amplitude can reach (psi_minus(t, t), psi_plus(-t, t)
    /// for t >= 1) must vanish.
    pub fn new(plus: Lattice<T>, minus: Lattice<T>) -> Result<Self> {
        check_pair_shape(plus.len(), minus.len())?;
        let edge = T::tol(tol::CLAMP);
        for t in 1..plus.len() {
            let ti = t as i64;
            if plus.value(-ti, t).abs() > edge {
                return Err(Error::Integrity {
                    n: -ti,
                    t,
                    detail: "psi_plus must vanish at the left cone edge".into(),
                });
            }
            if minus.value(ti, t).abs() > edge {
                return Err(Error::Integrity {
                    n: ti,
                    t,
                    detail: "psi_minus must vanish at the right cone edge".into(),
                });
            }
        }
        Ok(Self { plus, minus })
    }

    pub fn horizon(&self) -> usize {
        self.plus.len() - 1
    }

    #[inline]
    pub fn plus(&self, n: i64, t: usize) -> T {
        self.plus.value(n, t)
    }

    #[inline]
    pub fn minus(&self, n: i64, t: usize) -> T {
        self.minus.value(n, t)
    }

    pub fn plus_lattice(&self) -> &Lattice<T> {
        &self.plus
    }

    pub fn minus_lattice(&self) -> &Lattice<T> {
        &self.minus
    }

    /// Sum over the slice of psi_plus^2 + psi_minus^2.
    pub fn norm_squared(&self, t: usize) -> T {
        compensated_sum(
            self.plus
                .slice(t)
                .iter()
                .zip(self.minus.slice(t))
                .map(|(&p, &m)| p * p + m * m),
        )
    }
}

/// Complex chiral components of a general homogeneous walk.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexWaveField<T> {
    plus: Lattice<Complex<T>>,
    minus: Lattice<Complex<T>>,
}

impl<T: Scalar> ComplexWaveField<T> {
    pub fn new(plus: Lattice<Complex<T>>, minus: Lattice<Complex<T>>) -> Result<Self> {
        check_pair_shape(plus.len(), minus.len())?;
        Ok(Self { plus, minus })
    }

    pub fn horizon(&self) -> usize {
        self.plus.len() - 1
    }

    #[inline]
    pub fn plus(&self, n: i64, t: usize) -> Complex<T> {
        self.plus.get(n, t).copied().unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    #[inline]
    pub fn minus(&self, n: i64, t: usize) -> Complex<T> {
        self.minus.get(n, t).copied().unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn plus_lattice(&self) -> &Lattice<Complex<T>> {
        &self.plus
    }

    pub fn minus_lattice(&self) -> &Lattice<Complex<T>> {
        &self.minus
    }

    pub fn norm_squared(&self, t: usize) -> T {
        compensated_sum(
            self.plus
                .slice(t)
                .iter()
                .zip(self.minus.slice(t))
                .map(|(p, m)| p.norm_sqr() + m.norm_sqr()),
        )
    }

    /// rho(n, t) = |psi_plus|^2 + |psi_minus|^2 on every site.
    pub fn probability_lattice(&self) -> Lattice<T> {
        let slices = self
            .plus
            .slices()
            .iter()
            .zip(self.minus.slices())
            .map(|(p, m)| p.iter().zip(m).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect())
            .collect();
        Lattice { slices }
    }

    /// The probability function, checked for normalization within `1e-9`.
    pub fn probability(&self) -> Result<ProbabilitySequence<T>> {
        let rho = self.probability_lattice();
        check_unit_slices(&rho)?;
        Ok(ProbabilitySequence::from_lattice_unchecked(rho))
    }
}

fn check_pair_shape(plus: usize, minus: usize) -> Result<()> {
    if plus != minus {
        return Err(Error::Shape { t: plus.min(minus), found: minus, expected: plus });
    }
    if plus == 0 {
        return Err(Error::Domain("wave field needs at least one slice".into()));
    }
    Ok(())
}

fn check_unit_slices<T: Scalar>(rho: &Lattice<T>) -> Result<()> {
    let limit = T::tol(tol::INGEST);
    for (t, s) in rho.slices().iter().enumerate() {
        let sum = compensated_sum(s.iter().copied());
        if (sum - T::one()).abs() > limit {
            return Err(Error::Integrity {
                n: 0,
                t,
                detail: format!("wave field slice has norm {}", sum.as_f64()),
            });
        }
    }
    Ok(())
}

/// rho = psi_plus^2 + psi_minus^2 at every site.
pub fn probability_from_wavefield<T: Scalar>(w: &WaveField<T>) -> Result<ProbabilitySequence<T>> {
    let slices: Vec<Vec<T>> = w
        .plus
        .slices()
        .iter()
        .zip(w.minus.slices())
        .map(|(p, m)| p.iter().zip(m).map(|(&a, &b)| a * a + b * b).collect())
        .collect();
    let rho = Lattice { slices };
    check_unit_slices(&rho)?;
    Ok(ProbabilitySequence::from_lattice_unchecked(rho))
}

/// Net probability flux J(n, t) for t = 0..horizon-1.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxField<T> {
    values: Lattice<T>,
}

impl<T: Scalar> FluxField<T> {
    pub fn new(values: Lattice<T>) -> Self {
        Self { values }
    }

    /// Horizon of the probability sequence this flux belongs to; the flux
    /// itself has one slice fewer.
    pub fn horizon(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn flux(&self, n: i64, t: usize) -> T {
        self.values.value(n, t)
    }

    pub fn lattice(&self) -> &Lattice<T> {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, T)> + '_ {
        self.values.iter().map(|(t, n, v)| (t, n, *v))
    }

    pub fn slice_sum(&self, t: usize) -> T {
        compensated_sum(self.values.slice(t).iter().copied())
    }
}

/// Coin angles theta(n, t) in [0, pi] for the steps t = 0..horizon-1.
/// `None` marks sites where the local dynamics is undefined (rho = 0).
#[derive(Debug, Clone, PartialEq)]
pub struct CoinSchedule<T> {
    angles: Lattice<Option<T>>,
}

impl<T: Scalar> CoinSchedule<T> {
    pub fn new(angles: Lattice<Option<T>>) -> Result<Self> {
        for (t, n, a) in angles.iter() {
            if let Some(theta) = a {
                if !(theta.is_finite() && *theta >= T::zero() && *theta <= T::PI()) {
                    return Err(Error::Domain(format!(
                        "coin angle {} at (n={n}, t={t}) outside [0, pi]",
                        theta.as_f64()
                    )));
                }
            }
        }
        Ok(Self { angles })
    }

    /// The same angle on every site of `steps` steps.
    pub fn homogeneous(theta: T, steps: usize) -> Result<Self> {
        Self::new(Lattice::from_fn(steps, |_, _| Some(theta)))
    }

    /// Number of evolution steps the schedule covers.
    pub fn horizon(&self) -> usize {
        self.angles.len()
    }

    pub fn angle(&self, n: i64, t: usize) -> Option<T> {
        self.angles.get(n, t).copied().flatten()
    }

    pub fn lattice(&self) -> &Lattice<Option<T>> {
        &self.angles
    }

    pub fn truncated(&self, steps: usize) -> Result<Self> {
        if steps > self.horizon() {
            return Err(Error::Horizon { requested: steps, available: self.horizon() });
        }
        Ok(Self { angles: self.angles.truncated(steps) })
    }
}

/// Rightward jump probabilities p(n, t) for the steps t = 0..horizon-1.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpSchedule<T> {
    probabilities: Lattice<Option<T>>,
}

impl<T: Scalar> JumpSchedule<T> {
    pub fn new(probabilities: Lattice<Option<T>>) -> Result<Self> {
        for (t, n, p) in probabilities.iter() {
            if let Some(p) = p {
                if !(p.is_finite() && *p >= T::zero() && *p <= T::one()) {
                    return Err(Error::Domain(format!(
                        "jump probability {} at (n={n}, t={t}) outside [0, 1]",
                        p.as_f64()
                    )));
                }
            }
        }
        Ok(Self { probabilities })
    }

    pub fn homogeneous(p: T, steps: usize) -> Result<Self> {
        Self::new(Lattice::from_fn(steps, |_, _| Some(p)))
    }

    pub fn horizon(&self) -> usize {
        self.probabilities.len()
    }

    pub fn probability(&self, n: i64, t: usize) -> Option<T> {
        self.probabilities.get(n, t).copied().flatten()
    }

    pub fn lattice(&self) -> &Lattice<Option<T>> {
        &self.probabilities
    }

    pub fn truncated(&self, steps: usize) -> Result<Self> {
        if steps > self.horizon() {
            return Err(Error::Horizon { requested: steps, available: self.horizon() });
        }
        Ok(Self { probabilities: self.probabilities.truncated(steps) })
    }
}
