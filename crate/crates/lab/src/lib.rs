//! Experiment harness around `olives-core`.
//!
//! [`harness`] runs replicas with exactly mergeable statistics and builds the
//! reports. [`verify`] holds the verification suite. [`formats`] and [`cli`]
//! carry the file formats and the `olives` command line.

pub mod cli;
pub mod formats;
pub mod harness;
pub mod verify;

pub use harness::{run_ensemble, run_replicas, EnsembleConfig, EnsembleStats, HarnessError, ReplicaRecord};
