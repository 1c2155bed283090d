//! Mean return time to state 1, by two independent routes.

use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::pmf::closed_pmf_values;
use super::walk::{down_probability, up_probability};
use crate::error::DomainError;
use crate::rational::{int, powi, ratio, BigRational};

/// The mean return time stated alongside the printed closed form.
pub const PRINTED_MEAN_RETURN_TIME: u64 = 19;

/// A partial sum with a certified upper bound on what remains:
/// the true value lies in `[value, value + tail_bound]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesEstimate {
    pub value: BigRational,
    pub tail_bound: BigRational,
}

impl SeriesEstimate {
    pub fn upper(&self) -> BigRational {
        &self.value + &self.tail_bound
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.value <= x && x <= &self.upper()
    }
}

/// `E[T] = 1 + sum_{s >= 1} (1 - F(s))`, summed exactly for
/// `s <= 2 t_max` where `t_max` is the horizon in return-time index
/// (returns at times `2, 4, ..., 2 t_max` are resolved exactly).
///
/// The tail uses `f(2j) <= (1/2)(3/4)^(j-1)`, hence
/// `1 - F(s) <= 2 (3/4)^floor(s/2)`, and summing over `s > 2 t_max` gives
/// `14 (3/4)^t_max`.
pub fn mean_return_time_series(t_max: u64) -> Result<SeriesEstimate, DomainError> {
    if t_max < 2 {
        return Err(DomainError::OutOfRange {
            what: "mean return time series",
            requirement: "t_max >= 2",
            got: t_max,
        });
    }
    let pmf = closed_pmf_values(t_max);
    let mut value = BigRational::one();
    let mut cdf = BigRational::zero();
    for s in 1..=2 * t_max {
        if s % 2 == 0 {
            cdf += &pmf[(s / 2 - 1) as usize];
        }
        value += BigRational::one() - &cdf;
    }
    let tail_bound = int(14) * powi(&ratio(3, 4), t_max as i64);
    Ok(SeriesEstimate { value, tail_bound })
}

/// Stationary distribution truncated at `k_max`, with the exact mass of the
/// geometric tail beyond it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StationaryDist {
    /// `pi[k - 1]` is the stationary probability of state `k`.
    pub pi: Vec<BigRational>,
    pub k_max: u64,
    /// `sum_{k > k_max} pi_k`.
    pub tail: BigRational,
}

impl StationaryDist {
    pub fn get(&self, k: u64) -> BigRational {
        self.pi
            .get((k as usize).wrapping_sub(1))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// `pi_k = sum_j pi_j P(j -> k)` holds exactly at every state `k < k_max`.
    pub fn balance_holds(&self) -> bool {
        (1..self.k_max).all(|k| {
            let from_below = if k >= 2 {
                self.get(k - 1) * up_probability(k - 1)
            } else {
                BigRational::zero()
            };
            let from_above = self.get(k + 1) * down_probability(k + 1);
            from_below + from_above == self.get(k)
        })
    }
}

/// Detailed balance `pi_{k+1} = pi_k P(k -> k+1) / P(k+1 -> k)` gives
/// weights `1, 2, 4/3` and then a geometric decay with ratio 1/3, so the
/// normalizer has a closed form. `k_max` is raised to at least 3.
pub fn stationary_distribution(k_max: u64) -> StationaryDist {
    let k_max = k_max.max(3);
    let mut weights = Vec::with_capacity(k_max as usize);
    let mut w = BigRational::one();
    weights.push(w.clone());
    for k in 1..k_max {
        w = w * up_probability(k) / down_probability(k + 1);
        weights.push(w.clone());
    }
    // beyond state 3 the ratio up(k)/down(k+1) is constant
    let r = up_probability(3) / down_probability(4);
    let tail_weight = &w * &r / (BigRational::one() - &r);
    let z = weights.iter().fold(tail_weight.clone(), |acc, x| acc + x);
    StationaryDist {
        pi: weights.into_iter().map(|x| x / &z).collect(),
        k_max,
        tail: tail_weight / z,
    }
}

/// `1 / pi_1` for the positive recurrent walk.
pub fn mean_return_time_stationary() -> BigRational {
    stationary_distribution(3).get(1).recip()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_value() {
        let d = stationary_distribution(20);
        assert_eq!(d.get(1), ratio(1, 5));
        assert_eq!(d.get(2), ratio(2, 5));
        assert_eq!(d.get(3), ratio(4, 15));
        assert_eq!(d.get(4), ratio(4, 45));
        let total = d.pi.iter().fold(d.tail.clone(), |a, x| a + x);
        assert_eq!(total, BigRational::one());
        assert!(d.balance_holds());
        assert_eq!(mean_return_time_stationary(), int(5));
        // normalization pi_1 (1 + 2 + (4/3)(3/2)) = 1
        assert_eq!(ratio(1, 5) * (int(3) + ratio(4, 3) * ratio(3, 2)), BigRational::one());
    }

    #[test]
    fn series_brackets_stationary_value() {
        let est = mean_return_time_series(200).unwrap();
        assert!(est.contains(&mean_return_time_stationary()));
        assert!(est.tail_bound < ratio(1, 1_000_000_000_000_000));
        assert!(mean_return_time_series(1).is_err());
    }

    #[test]
    fn first_two_terms_contribute_two() {
        // Pr(T >= 1) + Pr(T >= 2) = 1 + (1 - F(1)) = 2
        let est = mean_return_time_series(2).unwrap();
        let first_terms = BigRational::one() + (BigRational::one() - super::super::first_return_cdf(1));
        assert_eq!(first_terms, int(2));
        assert!(est.value > int(2));
    }
}
