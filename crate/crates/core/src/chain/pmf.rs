//! First-return law of the auxiliary walk.
//!
//! The forward DP in [`first_return_pmf_dp`] is the ground truth. The closed
//! form and the Catalan convolution sum are checked against it; the printed
//! variants (`printed_*`) are kept only so the discrepancy can be reported.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};

use crate::error::DomainError;
use crate::rational::{binomial, from_uint, int, powi, ratio, BigRational};

/// Exact probabilities of first returning to 1 at even times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReturnTimePMF {
    /// Return time `2t` mapped to its probability.
    pub entries: BTreeMap<u64, BigRational>,
    /// Largest return time covered.
    pub horizon: u64,
}

impl ReturnTimePMF {
    /// `f(2t)`, zero when `2t` is past the horizon or has no mass.
    pub fn f(&self, t: u64) -> BigRational {
        self.entries.get(&(2 * t)).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Probability of a return within the first `steps` steps.
    pub fn cdf(&self, steps: u64) -> BigRational {
        self.entries
            .range(..=steps)
            .fold(BigRational::zero(), |acc, (_, p)| acc + p)
    }
}

/// Exact `f(2t)` for all `t <= t_max` by forward propagation of the walk
/// started at 1, with state 1 absorbing.
///
/// Probabilities after `s` steps are kept as integers over `4^s`. A walk that
/// still has to return by step `2 t_max` never climbs above `t_max + 1`, so
/// mass leaving the state window `1..=t_max + 2` can be dropped exactly.
pub fn first_return_pmf_dp(t_max: u64) -> ReturnTimePMF {
    let top = (t_max + 2) as usize;
    let mut entries = BTreeMap::new();
    if t_max == 0 {
        return ReturnTimePMF { entries, horizon: 0 };
    }
    // step 1: 1 -> 2 with weight 4/4
    let mut mass = vec![BigUint::zero(); top + 1];
    mass[2] = BigUint::from(4u32);
    let mut denom = BigUint::from(4u32);
    for s in 2..=2 * t_max {
        let mut next = vec![BigUint::zero(); top + 1];
        let absorbed = &mass[2] * 2u32;
        if top >= 3 {
            next[3] += &mass[2] * 2u32;
        }
        for k in 3..=top {
            if mass[k].is_zero() {
                continue;
            }
            next[k - 1] += &mass[k] * 3u32;
            if k < top {
                next[k + 1] += &mass[k];
            }
        }
        denom *= 4u32;
        if s % 2 == 1 {
            debug_assert!(absorbed.is_zero(), "odd return time");
        } else {
            entries.insert(
                s,
                BigRational::new(
                    BigInt::from_biguint(Sign::Plus, absorbed),
                    BigInt::from_biguint(Sign::Plus, denom.clone()),
                ),
            );
        }
        mass = next;
    }
    ReturnTimePMF {
        entries,
        horizon: 2 * t_max,
    }
}

/// `f(2) = 1/2` and `f(2t) = K (3/16)^(t-1) C(2t-3, t-1)` for `t >= 2`.
pub fn closed_form_with_constant(t: u64, constant: &BigRational) -> Result<BigRational, DomainError> {
    match t {
        0 => Err(DomainError::OutOfRange {
            what: "first-return closed form",
            requirement: "t >= 1",
            got: t,
        }),
        1 => Ok(ratio(1, 2)),
        _ => Ok(constant * powi(&ratio(3, 16), t as i64 - 1) * from_uint(binomial(2 * t - 3, t - 1))),
    }
}

/// Closed form `f(2t) = (3/16)^(t-1) C(2t-3, t-1)` with `f(2) = 1/2`.
pub fn first_return_pmf_closed(t: u64) -> Result<BigRational, DomainError> {
    closed_form_with_constant(t, &BigRational::one())
}

/// The printed form `4 (3/16)^(t-1) C(2t-3, t-1)`, defined for `t >= 2`.
pub fn printed_first_return_pmf(t: u64) -> Result<BigRational, DomainError> {
    if t < 2 {
        return Err(DomainError::OutOfRange {
            what: "printed first-return closed form",
            requirement: "t >= 2",
            got: t,
        });
    }
    closed_form_with_constant(t, &int(4))
}

/// How `C(-1, 0)` is read when the printed form is evaluated at `t = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitConvention {
    /// `C(-1, 0) = 1`, the generalized binomial coefficient.
    Generalized,
    /// `C(-1, 0) = 0`.
    Zero,
}

/// The printed form at `t = 1` under a convention for `C(-1, 0)`.
pub fn printed_first_return_pmf_at_one(convention: UnitConvention) -> BigRational {
    match convention {
        UnitConvention::Generalized => int(4),
        UnitConvention::Zero => BigRational::zero(),
    }
}

/// Sum over the number `i + 1` of visits to state 2 of the Catalan
/// convolution count times the path weight
/// `(1/2)^(i+1) (1/4)^e (3/4)^(t-1)`.
fn convolution_sum(t: u64, olive_free_exponent: impl Fn(u64, u64) -> i64) -> BigRational {
    let mut total = BigRational::zero();
    for i in 1..t {
        let top = 2 * t - i - 2;
        let count = int(i) / int(top) * from_uint(binomial(top, t - 1));
        let weight = powi(&ratio(1, 2), i as i64 + 1)
            * powi(&ratio(1, 4), olive_free_exponent(t, i))
            * powi(&ratio(3, 4), t as i64 - 1);
        total += count * weight;
    }
    total
}

fn require_t_ge_2(t: u64, what: &'static str) -> Result<(), DomainError> {
    if t < 2 {
        Err(DomainError::OutOfRange {
            what,
            requirement: "t >= 2",
            got: t,
        })
    } else {
        Ok(())
    }
}

/// Convolution form with up-step exponent `t - i - 1`: each of the `i`
/// excursions above 2 of length `2 a_j` takes `a_j - 1` up-steps at
/// probability 1/4, and these total `t - 1 - i`.
pub fn first_return_pmf_convolution(t: u64) -> Result<BigRational, DomainError> {
    require_t_ge_2(t, "first-return convolution sum")?;
    Ok(convolution_sum(t, |t, i| t as i64 - i as i64 - 1))
}

/// Convolution form with the printed exponent `t - i - 2`.
pub fn printed_convolution_pmf(t: u64) -> Result<BigRational, DomainError> {
    require_t_ge_2(t, "printed convolution sum")?;
    Ok(convolution_sum(t, |t, i| t as i64 - i as i64 - 2))
}

/// `F(steps) = sum_{j <= steps/2} f(2j)` from the validated closed form.
pub fn first_return_cdf(steps: u64) -> BigRational {
    (1..=steps / 2).fold(BigRational::zero(), |acc, j| {
        acc + first_return_pmf_closed(j).expect("j >= 1")
    })
}

/// Vector `[f(2), f(4), ..., f(2 t_max)]` from the validated closed form.
pub(crate) fn closed_pmf_values(t_max: u64) -> Vec<BigRational> {
    (1..=t_max)
        .map(|t| first_return_pmf_closed(t).expect("t >= 1"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dp_small_values() {
        let pmf = first_return_pmf_dp(3);
        assert_eq!(pmf.f(1), ratio(1, 2));
        assert_eq!(pmf.f(2), ratio(3, 16));
        assert_eq!(pmf.f(3), ratio(27, 256));
        assert_eq!(pmf.horizon, 6);
        assert!(pmf.entries.keys().all(|k| k % 2 == 0));
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(first_return_pmf_closed(1).unwrap(), ratio(1, 2));
        assert_eq!(first_return_pmf_closed(2).unwrap(), ratio(3, 16));
        assert_eq!(first_return_pmf_closed(3).unwrap(), ratio(27, 256));
        assert!(first_return_pmf_closed(0).is_err());
    }

    #[test]
    fn printed_values_and_ratio() {
        assert_eq!(printed_first_return_pmf(2).unwrap(), ratio(3, 4));
        assert_eq!(printed_first_return_pmf(3).unwrap(), ratio(27, 64));
        assert!(printed_first_return_pmf(1).is_err());
        for t in 2..=30 {
            assert_eq!(
                printed_first_return_pmf(t).unwrap() / first_return_pmf_closed(t).unwrap(),
                int(4)
            );
            assert_eq!(
                printed_convolution_pmf(t).unwrap() / first_return_pmf_convolution(t).unwrap(),
                int(4)
            );
        }
        assert_eq!(printed_first_return_pmf_at_one(UnitConvention::Generalized), int(4));
    }

    #[test]
    fn triple_agreement() {
        let dp = first_return_pmf_dp(30);
        for t in 2..=30 {
            let closed = first_return_pmf_closed(t).unwrap();
            assert_eq!(dp.f(t), closed, "t={t}");
            assert_eq!(first_return_pmf_convolution(t).unwrap(), closed, "t={t}");
        }
    }

    #[test]
    fn cdf_values() {
        assert_eq!(first_return_cdf(0), BigRational::zero());
        assert_eq!(first_return_cdf(1), BigRational::zero());
        assert_eq!(first_return_cdf(2), ratio(1, 2));
        assert_eq!(first_return_cdf(6), ratio(203, 256));
        assert_eq!(first_return_cdf(7), ratio(203, 256));
        assert_eq!(first_return_pmf_dp(3).cdf(6), ratio(203, 256));
    }

    #[test]
    fn mass_is_normalized_up_to_the_tail() {
        let horizon = 200;
        let f = first_return_cdf(2 * horizon);
        assert!(f <= BigRational::one());
        // f(2t) <= (1/2)(3/4)^(t-1), so the mass past the horizon is at most 2 (3/4)^horizon
        let tail = int(2) * powi(&ratio(3, 4), horizon as i64);
        assert!(f + tail >= BigRational::one());
    }
}
