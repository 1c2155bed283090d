use alloc::string::String;

use crate::process::PlateId;

/// A move that is not available in the state it was applied to.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvalidMove {
    #[error("plate {0:?} does not exist")]
    NoSuchPlate(PlateId),
    #[error("plate {0:?} has no olive to remove")]
    EmptyPlate(PlateId),
    #[error("merge needs two distinct plates, got {0:?} and {1:?}")]
    SamePlate(PlateId, PlateId),
    #[error("merge arguments must be ordered by id, got {0:?} and {1:?}")]
    Unordered(PlateId, PlateId),
}

/// Argument outside the domain of a closed-form or oracle routine.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DomainError {
    #[error("{what} requires {requirement}, got {got}")]
    OutOfRange {
        what: &'static str,
        requirement: &'static str,
        got: u64,
    },
    #[error("{what} must lie in the open unit interval")]
    NotInUnitInterval { what: &'static str },
    #[error("state budget exceeded at step {step}: {states} states (budget {budget})")]
    BudgetExceeded { step: u64, states: usize, budget: usize },
}

/// An exact identity check failed.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{identity} failed at {at}")]
pub struct VerificationFailure {
    pub identity: &'static str,
    pub at: String,
}
