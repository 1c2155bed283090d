//! Replicated experiments over the process.

mod config;
pub mod intervals;
pub mod reports;
mod run;
mod stats;

pub use config::{EnsembleConfig, HarnessError, DEFAULT_DELTAS, LOWER_RATIO, UPPER_RATIO};
pub use run::{run_ensemble, run_replica, run_replicas};
pub use stats::{EnsembleStats, ReplicaRecord};
