//! Forward engines checked against independently built references.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use walkforge::evolve::{evolve_qw, evolve_rw_exact};
use walkforge::feasibility::flux_from_rho;
use walkforge::lattice::{CoinSchedule, JumpSchedule, Lattice, ProbabilitySequence};
use walkforge::targets::{binomial_target, uniform_target};

type Matrix = Vec<Vec<f64>>;

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] != 0.0 {
                for j in 0..n {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
    }
    c
}

/// Coin-then-shift on positions -span..=span, state index 2 (n + span) + chirality.
fn step_matrix(schedule: &CoinSchedule<f64>, t: usize, span: i64) -> Matrix {
    let dim = 2 * (2 * span as usize + 1);
    let idx = |n: i64, c: usize| 2 * (n + span) as usize + c;
    let mut m = vec![vec![0.0; dim]; dim];
    for n in -span..=span {
        let theta = schedule.angle(n, t).unwrap_or(0.0);
        let (s, c) = theta.sin_cos();
        // + component moves right, - component moves left
        if n < span {
            m[idx(n + 1, 0)][idx(n, 0)] = c;
            m[idx(n + 1, 0)][idx(n, 1)] = s;
        }
        if n > -span {
            m[idx(n - 1, 1)][idx(n, 0)] = s;
            m[idx(n - 1, 1)][idx(n, 1)] = -c;
        }
    }
    m
}

fn check_against_dense(schedule: &CoinSchedule<f64>, init: (f64, f64)) {
    let steps = schedule.horizon();
    let span = steps as i64;
    let dim = 2 * (2 * span as usize + 1);
    let w = evolve_qw(schedule, init).unwrap();
    let mut product: Matrix = (0..dim).map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for t in 0..steps {
        product = matmul(&step_matrix(schedule, t, span), &product);
        let origin = 2 * span as usize;
        for n in -span..=span {
            let i = 2 * (n + span) as usize;
            let plus = product[i][origin] * init.0 + product[i][origin + 1] * init.1;
            let minus = product[i + 1][origin] * init.0 + product[i + 1][origin + 1] * init.1;
            assert!((plus - w.plus(n, t + 1)).abs() < 1e-14, "plus({n},{})", t + 1);
            assert!((minus - w.minus(n, t + 1)).abs() < 1e-14, "minus({n},{})", t + 1);
        }
    }
}

#[test]
fn flipping_coin_matches_dense_unitary() {
    let schedule = CoinSchedule::homogeneous(FRAC_PI_2, 4).unwrap();
    check_against_dense(&schedule, (1.0, 0.0));
    check_against_dense(&schedule, (0.6, 0.8));
}

#[test]
fn random_coins_match_dense_unitary() {
    let mut rng = common::rng(17);
    for steps in 1..=4 {
        for _ in 0..5 {
            let schedule = common::random_coins(&mut rng, steps);
            check_against_dense(&schedule, (1.0, 0.0));
            check_against_dense(&schedule, (FRAC_PI_2.cos(), 1.0));
        }
    }
}

/// Pascal's triangle, built by addition only.
fn pascal(horizon: usize) -> Vec<Vec<f64>> {
    let mut rows = vec![vec![1.0]];
    for t in 1..=horizon {
        let prev = &rows[t - 1];
        let row = (0..=t)
            .map(|k| if k == 0 || k == t { 1.0 } else { prev[k - 1] + prev[k] })
            .collect();
        rows.push(row);
    }
    rows
}

#[test]
fn binomial_target_matches_pascal_triangle() {
    let rows = pascal(60);
    for &p in &[0.3f64, 0.5, 0.7] {
        let rho = binomial_target(p, 60).unwrap();
        for (t, n, value) in rho.iter() {
            let k = ((n + t as i64) / 2) as usize;
            let exact = rows[t][k] * p.powi(k as i32) * (1.0 - p).powi((t - k) as i32);
            assert!((value - exact).abs() <= 1e-12 * exact.max(1e-300), "p={p} ({n},{t})");
        }
    }
}

#[test]
fn fair_and_biased_walks_match_binomial() {
    for &p in &[0.5, 0.3] {
        let schedule = JumpSchedule::homogeneous(p, 40).unwrap();
        let rho = evolve_rw_exact(&schedule, 40).unwrap();
        assert!(rho.max_abs_diff(&binomial_target(p, 40).unwrap()) < 1e-14);
    }
}

/// Laurent polynomial in z keyed by exponent.
type Poly = BTreeMap<i64, f64>;

fn slice_poly(values: impl Iterator<Item = (i64, f64)>) -> Poly {
    // paper convention: sum_n f(n) z^{-n}
    values.map(|(n, v)| (-n, v)).collect()
}

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (&ea, &ca) in a {
        for (&eb, &cb) in b {
            *out.entry(ea + eb).or_default() += ca * cb;
        }
    }
    out
}

fn sub(a: &Poly, b: &Poly) -> Poly {
    let mut out = a.clone();
    for (&e, &c) in b {
        *out.entry(e).or_default() -= c;
    }
    out
}

fn check_transform_identity(rho: &ProbabilitySequence<f64>) {
    let flux = flux_from_rho(rho);
    let one_minus_z2: Poly = [(0, 1.0), (2, -1.0)].into_iter().collect();
    let one_plus_z2: Poly = [(0, 1.0), (2, 1.0)].into_iter().collect();
    let two_z: Poly = [(1, 2.0)].into_iter().collect();
    for t in 0..rho.horizon() {
        let j = slice_poly(flux.lattice().slice(t).iter().enumerate().map(|(k, &v)| (2 * k as i64 - t as i64, v)));
        let now = slice_poly(rho.iter().filter(|e| e.0 == t).map(|(_, n, v)| (n, v)));
        let next = slice_poly(rho.iter().filter(|e| e.0 == t + 1).map(|(_, n, v)| (n, v)));
        let lhs = mul(&j, &one_minus_z2);
        let rhs = sub(&mul(&two_z, &next), &mul(&one_plus_z2, &now));
        let diff = sub(&lhs, &rhs);
        for (e, c) in diff {
            assert!(c.abs() < 1e-14, "t={t} coefficient of z^{e}: {c}");
        }
    }
}

#[test]
fn flux_satisfies_transform_identity_for_short_horizons() {
    for horizon in 1..=6 {
        check_transform_identity(&uniform_target(horizon).unwrap());
        check_transform_identity(&binomial_target(0.3, horizon).unwrap());
    }
    let mut rng = common::rng(5);
    for horizon in 1..=6 {
        for _ in 0..10 {
            check_transform_identity(&common::random_feasible(&mut rng, horizon));
        }
    }
}

#[test]
fn hand_built_infeasible_sequence_still_satisfies_transform_identity() {
    // the identity is pure conservation; feasibility is a separate bound
    let rho = ProbabilitySequence::new(vec![vec![1.0], vec![0.5, 0.5], vec![0.05, 0.05, 0.9]]).unwrap();
    check_transform_identity(&rho);
}

#[test]
fn ballistic_coin_matches_dense_unitary() {
    check_against_dense(&CoinSchedule::homogeneous(0.0, 4).unwrap(), (1.0, 0.0));
    // a reflecting coin on one sublattice only
    let mixed = Lattice::from_fn(4, |n, _| Some(if n % 4 == 0 { PI } else { 1.1 }));
    check_against_dense(&CoinSchedule::new(mixed).unwrap(), (0.8, -0.6));
}
