#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use walkforge::evolve::evolve_qw;
use walkforge::lattice::{probability_from_wavefield, CoinSchedule, Lattice, ProbabilitySequence};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Coin schedule with independent uniform angles in [0, pi].
pub fn random_coins(rng: &mut ChaCha8Rng, steps: usize) -> CoinSchedule<f64> {
    let angles = Lattice::from_fn(steps, |_, _| Some(rng.random_range(0.0..std::f64::consts::PI)));
    CoinSchedule::new(angles).unwrap()
}

/// Density of a random real walk: feasible by construction.
pub fn random_feasible(rng: &mut ChaCha8Rng, horizon: usize) -> ProbabilitySequence<f64> {
    let coins = random_coins(rng, horizon);
    let w = evolve_qw(&coins, (1.0, 0.0)).unwrap();
    probability_from_wavefield(&w).unwrap()
}
