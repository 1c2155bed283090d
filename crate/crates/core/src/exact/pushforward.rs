use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::DomainError;
use crate::process::{PlateId, TableState};
use crate::rational::{int, BigRational};

/// Default cap on state expansions for one exact computation.
pub const DEFAULT_STATE_BUDGET: usize = 10_000_000;

/// Process state up to relabeling of the plates other than plate 1.
///
/// Plates other than plate 1 are exchangeable under uniform move selection,
/// so states that agree on plate 1 and on the multiset of the others have the
/// same future law.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalState {
    /// `None` only for the empty table.
    pub first_plate_olives: Option<u64>,
    /// Olive counts of the other plates, ascending.
    pub other_plates: Vec<u64>,
}

impl CanonicalState {
    pub fn empty() -> Self {
        CanonicalState {
            first_plate_olives: None,
            other_plates: Vec::new(),
        }
    }

    pub fn new(first_plate_olives: Option<u64>, mut other_plates: Vec<u64>) -> Self {
        debug_assert!(first_plate_olives.is_some() || other_plates.is_empty());
        other_plates.sort_unstable();
        CanonicalState {
            first_plate_olives,
            other_plates,
        }
    }

    pub fn from_table(state: &TableState) -> Self {
        let first = state.olives_on(PlateId::FIRST);
        let others = state
            .plates()
            .iter()
            .filter(|p| p.id != PlateId::FIRST)
            .map(|p| p.olives)
            .collect();
        CanonicalState::new(first, others)
    }

    pub fn num_plates(&self) -> u64 {
        self.first_plate_olives
            .map_or(0, |_| 1 + self.other_plates.len() as u64)
    }

    pub fn num_nonempty(&self) -> u64 {
        self.positions().iter().filter(|&&o| o > 0).count() as u64
    }

    pub fn total_olives(&self) -> u64 {
        self.positions().iter().sum()
    }

    /// Olive counts by position, plate 1 first.
    fn positions(&self) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.num_plates() as usize);
        if let Some(f) = self.first_plate_olives {
            v.push(f);
            v.extend_from_slice(&self.other_plates);
        }
        v
    }

    fn from_positions(mut plates: Vec<u64>) -> Self {
        if plates.is_empty() {
            return CanonicalState::empty();
        }
        let first = plates.remove(0);
        CanonicalState::new(Some(first), plates)
    }
}

/// Every successor reached by one move, with multiplicity, and the total
/// number of available moves.
///
/// Merges are enumerated over unordered pairs of plate positions, so equal
/// olive counts on different plates give separate moves.
pub fn successors(state: &CanonicalState) -> (BTreeMap<CanonicalState, u64>, u64) {
    let plates = state.positions();
    let mut out: BTreeMap<CanonicalState, u64> = BTreeMap::new();
    let mut total = 0u64;
    let mut emit = |p: Vec<u64>| {
        *out.entry(CanonicalState::from_positions(p)).or_default() += 1;
        total += 1;
    };

    let mut added = plates.clone();
    added.push(0);
    emit(added);

    for i in 0..plates.len() {
        for j in i + 1..plates.len() {
            // position 0 is plate 1, which always survives; otherwise the
            // survivor is another non-first plate and only the sum matters
            let mut merged = plates.clone();
            merged[i] += plates[j];
            merged.remove(j);
            emit(merged);
        }
    }
    for i in 0..plates.len() {
        let mut p = plates.clone();
        p[i] += 1;
        emit(p);
    }
    for i in 0..plates.len() {
        if plates[i] > 0 {
            let mut p = plates.clone();
            p[i] -= 1;
            emit(p);
        }
    }
    (out, total)
}

/// Exact law over canonical states after `step` moves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateDistribution {
    pub entries: BTreeMap<CanonicalState, BigRational>,
    pub step: u64,
}

impl StateDistribution {
    pub fn initial() -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(CanonicalState::empty(), BigRational::one());
        StateDistribution { entries, step: 0 }
    }

    pub fn total_mass(&self) -> BigRational {
        self.entries.values().fold(BigRational::zero(), |a, p| a + p)
    }

    /// One exact pushforward step. Fails as soon as the successor map grows
    /// past `budget` states.
    pub fn advance(&self, budget: usize) -> Result<StateDistribution, DomainError> {
        let mut next: BTreeMap<CanonicalState, BigRational> = BTreeMap::new();
        for (state, p) in &self.entries {
            let (succ, total) = successors(state);
            let share = p / int(total);
            for (s, mult) in succ {
                let w = &share * int(mult);
                match next.get_mut(&s) {
                    Some(acc) => *acc += w,
                    None => {
                        next.insert(s, w);
                        if next.len() > budget {
                            return Err(DomainError::BudgetExceeded {
                                step: self.step + 1,
                                states: next.len(),
                                budget,
                            });
                        }
                    }
                }
            }
        }
        Ok(StateDistribution {
            entries: next,
            step: self.step + 1,
        })
    }
}

/// Marginal law of the total olive count.
pub fn olive_marginal(dist: &StateDistribution) -> BTreeMap<u64, BigRational> {
    let mut out: BTreeMap<u64, BigRational> = BTreeMap::new();
    for (s, p) in &dist.entries {
        let o = s.total_olives();
        match out.get_mut(&o) {
            Some(acc) => *acc += p,
            None => {
                out.insert(o, p.clone());
            }
        }
    }
    out
}

/// Exact pmf of the olive count after `t` moves with the default budget.
pub fn exact_olive_distribution(t: u64) -> Result<BTreeMap<u64, BigRational>, DomainError> {
    exact_olive_distribution_with_budget(t, DEFAULT_STATE_BUDGET)
}

/// Number of state expansions (one per available move of every reachable
/// canonical state) needed for `t` pushforward steps, counted structurally
/// without any rational arithmetic. Stops with an error once `budget` is
/// exceeded.
pub fn expansion_count(t: u64, budget: usize) -> Result<usize, DomainError> {
    let mut frontier: BTreeSet<CanonicalState> = BTreeSet::new();
    frontier.insert(CanonicalState::empty());
    let mut expansions = 0usize;
    for step in 1..=t {
        let mut next = BTreeSet::new();
        for state in &frontier {
            let (succ, total) = successors(state);
            expansions += total as usize;
            if expansions > budget {
                return Err(DomainError::BudgetExceeded {
                    step,
                    states: expansions,
                    budget,
                });
            }
            next.extend(succ.into_keys());
        }
        frontier = next;
    }
    Ok(expansions)
}

/// As [`exact_olive_distribution`], failing before any rational work when
/// the horizon needs more than `budget` state expansions.
pub fn exact_olive_distribution_with_budget(t: u64, budget: usize) -> Result<BTreeMap<u64, BigRational>, DomainError> {
    expansion_count(t, budget)?;
    let mut dist = StateDistribution::initial();
    for _ in 0..t {
        dist = dist.advance(budget)?;
    }
    Ok(olive_marginal(&dist))
}

/// Exact `E(O_t)`.
pub fn exact_expected_olives(t: u64) -> Result<BigRational, DomainError> {
    Ok(exact_olive_distribution(t)?
        .iter()
        .fold(BigRational::zero(), |acc, (o, p)| acc + int(*o) * p))
}

/// Exact one-step law from a concrete table state.
pub fn exact_transition_check(state: &TableState) -> BTreeMap<CanonicalState, BigRational> {
    let (succ, total) = successors(&CanonicalState::from_table(state));
    succ.into_iter().map(|(s, m)| (s, int(m) / int(total))).collect()
}
