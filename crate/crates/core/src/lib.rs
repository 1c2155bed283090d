//! Core model for the random plates-and-olives process.
//!
//! Everything here is pure computation over `alloc` collections:
//!
//! * [`process`] holds the table state machine and exactly uniform move sampling,
//! * [`trajectory`] runs single trajectories with the diagnostic trackers,
//! * [`chain`] covers the auxiliary return-time walk on the positive integers,
//!   its exact first-return law and the combinatorial identities behind it,
//! * [`exact`] contains the brute-force and exact-DP ground truth used to
//!   validate the sampler and the chain analytics.
//!
//! IO and the command line live in the `olives-lab` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod chain;
pub mod error;
pub mod exact;
pub mod process;
pub mod rational;
pub mod rng;
pub mod trajectory;

pub use error::{DomainError, InvalidMove, VerificationFailure};
pub use process::{Move, MoveCounters, MoveCounts, MoveKind, Plate, PlateId, TableState};
pub use rational::BigRational;
pub use rng::SimRng;
pub use trajectory::{run_trajectory, SeriesPoint, TrajectoryRecord};
