use alloc::vec::Vec;

use num_traits::{One, Zero};
use rand::Rng;

use crate::rational::{ratio, BigRational};
use crate::rng::seeded;

/// Probability of moving from `k` to `k + 1`.
pub fn up_probability(k: u64) -> BigRational {
    match k {
        0 => BigRational::zero(),
        1 => BigRational::one(),
        2 => ratio(1, 2),
        _ => ratio(1, 4),
    }
}

/// Probability of moving from `k` to `k - 1`.
pub fn down_probability(k: u64) -> BigRational {
    BigRational::one() - up_probability(k)
}

/// One transition of the walk. `k` must be at least 1.
pub fn chain_step<R: Rng + ?Sized>(k: u64, rng: &mut R) -> u64 {
    assert!(k >= 1, "the walk lives on the positive integers");
    match k {
        1 => 2,
        2 => {
            if rng.random_range(0..2u32) == 0 {
                1
            } else {
                3
            }
        }
        _ => {
            if rng.random_range(0..4u32) == 0 {
                k + 1
            } else {
                k - 1
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkRunStats {
    pub steps: u64,
    /// Number of returns to state 1 within `steps` steps.
    pub returns: u64,
    /// Duration of each completed excursion from 1, when requested.
    pub return_times: Option<Vec<u64>>,
    pub final_state: u64,
}

impl WalkRunStats {
    pub fn return_rate(&self) -> f64 {
        self.returns as f64 / self.steps as f64
    }
}

/// Runs the walk from state 1 for `steps` steps.
pub fn simulate_walk(steps: u64, seed: u64, record_returns: bool) -> WalkRunStats {
    let mut rng = seeded(seed);
    let mut k = 1u64;
    let mut returns = 0;
    let mut last_visit = 0u64;
    let mut durations = record_returns.then(Vec::new);
    for t in 1..=steps {
        k = chain_step(k, &mut rng);
        if k == 1 {
            returns += 1;
            if let Some(d) = durations.as_mut() {
                d.push(t - last_visit);
            }
            last_visit = t;
        }
    }
    WalkRunStats {
        steps,
        returns,
        return_times: durations,
        final_state: k,
    }
}
