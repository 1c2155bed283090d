//! Desk-scale ground truth: exact laws of the olive count and of single
//! moves, plus brute-force path enumeration for the auxiliary walk.

mod labeled;
mod paths;
mod pushforward;

pub use labeled::{labeled_olive_distribution, MAX_LABELED_HORIZON};
pub use paths::{enumerate_chain_paths, MAX_PATH_HORIZON};
pub use pushforward::{
    exact_expected_olives, exact_olive_distribution, exact_olive_distribution_with_budget, exact_transition_check,
    expansion_count, olive_marginal, successors, CanonicalState, StateDistribution, DEFAULT_STATE_BUDGET,
};
