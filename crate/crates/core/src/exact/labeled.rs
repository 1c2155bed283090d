use alloc::collections::BTreeMap;

use num_traits::One;

use crate::error::DomainError;
use crate::process::TableState;
use crate::rational::{int, BigRational};

/// Largest horizon accepted by [`labeled_olive_distribution`].
pub const MAX_LABELED_HORIZON: u64 = 7;

/// Exact pmf of the olive count after `t` moves by walking the full tree of
/// labeled move sequences through [`TableState::available_moves`] and
/// [`TableState::apply_move`], with no lumping of states.
pub fn labeled_olive_distribution(t: u64) -> Result<BTreeMap<u64, BigRational>, DomainError> {
    if t > MAX_LABELED_HORIZON {
        return Err(DomainError::OutOfRange {
            what: "labeled tree enumeration",
            requirement: "t <= 7",
            got: t,
        });
    }
    let mut out = BTreeMap::new();
    descend(&TableState::new(), t, &BigRational::one(), &mut out);
    Ok(out)
}

fn descend(state: &TableState, remaining: u64, p: &BigRational, out: &mut BTreeMap<u64, BigRational>) {
    if remaining == 0 {
        *out.entry(state.total_olives()).or_insert_with(|| int(0)) += p;
        return;
    }
    let moves = state.available_moves();
    let share = p / int(moves.len() as u64);
    for mv in moves {
        let mut next = state.clone();
        next.apply_move(mv).expect("listed moves are valid");
        descend(&next, remaining - 1, &share, out);
    }
}
