use alloc::collections::BTreeMap;

use num_traits::Zero;

use crate::chain::{down_probability, up_probability, ReturnTimePMF};
use crate::error::DomainError;
use crate::rational::BigRational;

/// Largest return-time index accepted by [`enumerate_chain_paths`].
pub const MAX_PATH_HORIZON: u64 = 10;

/// First-return pmf by summing the probability of every individual path
/// `1 -> 2 -> ... -> 2 -> 1` of length `2t <= 2 t_max` that avoids 1 in
/// between. Exponential in `t_max`.
pub fn enumerate_chain_paths(t_max: u64) -> Result<ReturnTimePMF, DomainError> {
    if t_max > MAX_PATH_HORIZON {
        return Err(DomainError::OutOfRange {
            what: "path enumeration",
            requirement: "t_max <= 10",
            got: t_max,
        });
    }
    let mut entries: BTreeMap<u64, BigRational> = BTreeMap::new();
    let max_len = 2 * t_max;
    if max_len >= 2 {
        // the first step from 1 is forced
        let p = up_probability(1);
        walk(2, 1, &p, max_len, &mut entries);
    }
    for len in (2..=max_len).step_by(2) {
        entries.entry(len).or_insert_with(BigRational::zero);
    }
    entries.retain(|_, p| !p.is_zero());
    Ok(ReturnTimePMF {
        entries,
        horizon: max_len,
    })
}

fn walk(state: u64, len: u64, prob: &BigRational, max_len: u64, out: &mut BTreeMap<u64, BigRational>) {
    // cannot reach 1 in the remaining steps
    if state - 1 > max_len - len {
        return;
    }
    let down = prob * down_probability(state);
    if state == 2 {
        *out.entry(len + 1).or_insert_with(BigRational::zero) += &down;
    } else {
        walk(state - 1, len + 1, &down, max_len, out);
    }
    let up = prob * up_probability(state);
    walk(state + 1, len + 1, &up, max_len, out);
}
