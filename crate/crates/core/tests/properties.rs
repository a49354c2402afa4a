//! Invariants that hold for every input, exercised on random and named targets.

mod common;

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

use proptest::prelude::*;
use rand::Rng;
use walkforge::evolve::{
    closed_form_wavefield, evolve_qw, evolve_qw_complex, evolve_rw_exact, lambda_kernel, qw_flux,
    HomogeneousCoinParams,
};
use walkforge::feasibility::{flux_from_rho, validate};
use walkforge::lattice::{probability_from_wavefield, JumpSchedule, Lattice, ProbabilitySequence};
use walkforge::synthesis::{reconstruct_wavefield, synthesize_coins, synthesize_jumps, synthesize_qw, synthesize_rw};
use walkforge::targets::{binomial_target, uniform_target};

fn named_targets() -> Vec<ProbabilitySequence<f64>> {
    vec![
        uniform_target(60).unwrap(),
        binomial_target(0.3, 60).unwrap(),
        binomial_target(0.5, 60).unwrap(),
        evolve_qw_complex(&HomogeneousCoinParams::quasi_symmetric_hadamard(), 60).unwrap().probability().unwrap(),
    ]
}

fn check_conservation(rho: &ProbabilitySequence<f64>) {
    let flux = flux_from_rho(rho);
    for t in 1..=rho.horizon() {
        for k in 0..=t {
            let n = 2 * k as i64 - t as i64;
            let inflow = 0.5
                * (rho.rho(n - 1, t - 1) + flux.flux(n - 1, t - 1) + rho.rho(n + 1, t - 1)
                    - flux.flux(n + 1, t - 1));
            assert!((inflow - rho.rho(n, t)).abs() < 1e-12, "({n},{t})");
        }
    }
    for t in 0..rho.horizon() {
        let drift = rho.mean_position(t + 1) - rho.mean_position(t);
        assert!((flux.slice_sum(t) - drift).abs() < 1e-12, "t={t}");
    }
}

#[test]
fn flux_conserves_probability() {
    for rho in named_targets() {
        check_conservation(&rho);
    }
    let mut rng = common::rng(1);
    for _ in 0..20 {
        let horizon = rng.random_range(1..60);
        check_conservation(&common::random_feasible(&mut rng, horizon));
    }
}

#[test]
fn forward_evolutions_are_feasible() {
    let mut rng = common::rng(2);
    for _ in 0..20 {
        let horizon = rng.random_range(1..80);
        let rho = common::random_feasible(&mut rng, horizon);
        assert!(validate(&rho).feasible);

        let jumps = JumpSchedule::new(Lattice::from_fn(horizon, |_, _| Some(rng.random::<f64>()))).unwrap();
        let rho = evolve_rw_exact(&jumps, horizon).unwrap();
        let report = validate(&rho);
        assert!(report.feasible, "{:?}", report.violations.first());
    }
}

#[test]
fn quantum_flux_matches_density_flux() {
    let mut rng = common::rng(3);
    for _ in 0..20 {
        let horizon = rng.random_range(1..80);
        let coins = common::random_coins(&mut rng, horizon);
        let w = evolve_qw(&coins, (1.0, 0.0)).unwrap();
        let rho = probability_from_wavefield(&w).unwrap();
        let bridge = qw_flux(&w);
        let from_rho = flux_from_rho(&rho);
        for (t, n, j) in bridge.iter() {
            assert!((j - from_rho.flux(n, t)).abs() < 1e-10, "({n},{t})");
            let theta = coins.angle(n, t).unwrap();
            let (a, b) = (w.plus(n, t), w.minus(n, t));
            let local = (2.0 * theta).cos() * (a * a - b * b) + 2.0 * (2.0 * theta).sin() * a * b;
            assert!((j - local).abs() < 1e-12, "({n},{t})");
        }
    }
}

#[test]
fn reconstruction_is_consistent_with_its_density() {
    let mut targets = named_targets();
    let mut rng = common::rng(4);
    for _ in 0..10 {
        targets.push(common::random_feasible(&mut rng, 50));
    }
    for rho in targets {
        let w = reconstruct_wavefield(&rho).unwrap();
        assert!(probability_from_wavefield(&w).unwrap().max_abs_diff(&rho) < 1e-12);
        for t in 0..rho.horizon() {
            for k in 0..=t {
                let n = 2 * k as i64 - t as i64;
                let out = w.plus(n + 1, t + 1).powi(2) + w.minus(n - 1, t + 1).powi(2);
                assert!((out - rho.rho(n, t)).abs() < 1e-12, "({n},{t})");
            }
        }
    }
}

fn quantum_round_trip(rho: &ProbabilitySequence<f64>) -> f64 {
    let w = reconstruct_wavefield(rho).unwrap();
    let coins = synthesize_coins(rho, &w).unwrap();
    let back = evolve_qw(&coins, (1.0, 0.0)).unwrap();
    probability_from_wavefield(&back).unwrap().max_abs_diff(rho)
}

fn classical_round_trip(rho: &ProbabilitySequence<f64>) -> f64 {
    let jumps = synthesize_jumps(rho, &flux_from_rho(rho)).unwrap();
    evolve_rw_exact(&jumps, rho.horizon()).unwrap().max_abs_diff(rho)
}

#[test]
fn named_targets_round_trip() {
    for rho in named_targets() {
        assert!(quantum_round_trip(&rho) < 1e-10);
        assert!(classical_round_trip(&rho) < 1e-10);
    }
}

#[test]
fn random_feasible_sequences_round_trip() {
    let mut rng = common::rng(20);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let horizon = rng.random_range(1..=60);
        let rho = common::random_feasible(&mut rng, horizon);
        let coins = synthesize_qw(&rho).unwrap();
        let back = probability_from_wavefield(&evolve_qw(&coins, (1.0, 0.0)).unwrap()).unwrap();
        worst = worst.max(back.max_abs_diff(&rho));
        let jumps = synthesize_rw(&rho).unwrap();
        worst = worst.max(evolve_rw_exact(&jumps, horizon).unwrap().max_abs_diff(&rho));
    }
    assert!(worst < 1e-9, "worst deviation {worst:e}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn any_seeded_walk_round_trips(seed in any::<u64>(), horizon in 1usize..40) {
        let mut rng = common::rng(seed);
        let rho = common::random_feasible(&mut rng, horizon);
        prop_assert!(quantum_round_trip(&rho) < 1e-9);
        prop_assert!(classical_round_trip(&rho) < 1e-9);
    }

    #[test]
    fn density_ignores_phases_that_keep_varphi(
        theta in 0.2f64..2.9,
        eta in 0.0f64..3.1,
        gamma in 0.0f64..6.2,
        alpha in 0.0f64..6.2,
        beta in 0.0f64..6.2,
        shift in -3.0f64..3.0,
        chi in 0.0f64..6.2,
    ) {
        let base = HomogeneousCoinParams::new(theta, eta, gamma).with_phases(0.0, alpha, beta);
        // same varphi = alpha + beta - gamma, different individual phases
        let moved = HomogeneousCoinParams::new(theta, eta, gamma + shift).with_phases(chi, alpha + 0.5 * shift, beta + 0.5 * shift);
        let a = closed_form_wavefield(&base, 25).unwrap().probability().unwrap();
        let b = closed_form_wavefield(&moved, 25).unwrap().probability().unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-12);
    }
}

#[test]
fn global_phase_leaves_density_unchanged() {
    let mut rng = common::rng(6);
    for _ in 0..20 {
        let p = HomogeneousCoinParams::new(rng.random_range(0.2..2.9), rng.random_range(0.0..3.1), rng.random_range(0.0..6.2))
            .with_phases(0.0, rng.random_range(0.0..6.2), rng.random_range(0.0..6.2));
        let q = HomogeneousCoinParams { chi: 1.3, ..p };
        for engine in [evolve_qw_complex::<f64>, closed_form_wavefield::<f64>] {
            let a = engine(&p, 30).unwrap().probability().unwrap();
            let b = engine(&q, 30).unwrap().probability().unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12);
        }
    }
}

#[test]
fn norm_and_mass_survive_long_horizons() {
    let horizon = 1000;
    let mut rng = common::rng(7);
    let coins = common::random_coins(&mut rng, horizon);
    let w = evolve_qw(&coins, (0.6, 0.8)).unwrap();
    for t in 0..=horizon {
        assert!((w.norm_squared(t) - 1.0).abs() < 1e-12, "real t={t}");
    }
    let qw = evolve_qw_complex(&HomogeneousCoinParams::new(0.7f64, 1.1, 0.3).with_phases(0.2, 0.4, 0.9), horizon).unwrap();
    for t in 0..=horizon {
        assert!((qw.norm_squared(t) - 1.0).abs() < 1e-12, "complex t={t}");
    }
    let jumps = JumpSchedule::new(Lattice::from_fn(horizon, |_, _| Some(rng.random::<f64>()))).unwrap();
    let rho = evolve_rw_exact(&jumps, horizon).unwrap();
    for t in 0..=horizon {
        assert!((rho.slice_sum(t) - 1.0).abs() < 1e-12, "rw t={t}");
    }
}

#[test]
fn kernel_recursion_holds() {
    for theta in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
        for t in 0..=40usize {
            for n in (-(t as i64)..=t as i64).step_by(2) {
                let lhs = lambda_kernel(n, t, theta).unwrap();
                let rhs = theta.cos()
                    * (lambda_kernel(n + 1, t + 1, theta).unwrap() - lambda_kernel(n - 1, t + 1, theta).unwrap())
                    + lambda_kernel(n, t + 2, theta).unwrap();
                assert!((lhs - rhs).abs() < 1e-10, "theta={theta} ({n},{t})");
            }
        }
    }
}

#[test]
fn closed_form_agrees_with_recursion_for_random_parameters() {
    let mut rng = common::rng(8);
    for _ in 0..30 {
        let p = HomogeneousCoinParams::new(
            rng.random_range(0.2..std::f64::consts::PI - 0.2),
            rng.random_range(0.0..std::f64::consts::TAU),
            rng.random_range(0.0..std::f64::consts::TAU),
        )
        .with_phases(
            rng.random_range(0.0..std::f64::consts::TAU),
            rng.random_range(0.0..std::f64::consts::TAU),
            rng.random_range(0.0..std::f64::consts::TAU),
        );
        let horizon = rng.random_range(0..=40);
        let a = closed_form_wavefield(&p, horizon).unwrap();
        let b = evolve_qw_complex(&p, horizon).unwrap();
        for t in 0..=horizon {
            for k in 0..=t {
                let n = 2 * k as i64 - t as i64;
                assert!((a.plus(n, t) - b.plus(n, t)).norm() < 1e-10);
                assert!((a.minus(n, t) - b.minus(n, t)).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn single_precision_round_trip() {
    let rho = uniform_target::<f32>(30).unwrap();
    let coins = synthesize_qw(&rho).unwrap();
    let back = probability_from_wavefield(&evolve_qw(&coins, (1.0f32, 0.0)).unwrap()).unwrap();
    assert!(back.max_abs_diff(&rho) < 1e-5);
    let jumps = synthesize_rw(&rho).unwrap();
    assert!(evolve_rw_exact(&jumps, 30).unwrap().max_abs_diff(&rho) < 1e-5);
}
