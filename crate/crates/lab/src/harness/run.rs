use std::ops::Range;

use olives_core::rng::replica_seed;
use olives_core::run_trajectory;
use rayon::prelude::*;

use super::config::{EnsembleConfig, HarnessError};
use super::stats::{EnsembleStats, ReplicaRecord};

/// Runs replica `index` of `config`, seeded by `replica_seed(master_seed, index)`.
pub fn run_replica(config: &EnsembleConfig, index: u64) -> ReplicaRecord {
    let seed = replica_seed(config.master_seed, index);
    let rec = run_trajectory(config.t, seed, config.cadence);
    ReplicaRecord::from_trajectory(index, seed, &rec)
}

/// Runs the replicas with indices in `range` on a pool of `threads` workers
/// (`None` uses the available parallelism). The result does not depend on
/// the thread count.
pub fn run_replicas(
    config: &EnsembleConfig,
    range: Range<u64>,
    threads: Option<usize>,
) -> Result<EnsembleStats, HarnessError> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| HarnessError::InvalidConfig(format!("thread pool: {e}")))?;
    let records: Vec<ReplicaRecord> = pool.install(|| range.into_par_iter().map(|i| run_replica(config, i)).collect());
    EnsembleStats::from_records(config.t, config.master_seed, records)
}

/// All `config.replicas` replicas.
pub fn run_ensemble(config: &EnsembleConfig, threads: Option<usize>) -> Result<EnsembleStats, HarnessError> {
    run_replicas(config, 0..config.replicas, threads)
}
