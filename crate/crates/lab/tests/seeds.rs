use std::collections::HashSet;

use olives_core::rng::{replica_seed, seeded};
use olives_lab::harness::run_replica;
use olives_lab::EnsembleConfig;
use rand::RngCore;

#[test]
fn replica_seeds_are_distinct() {
    for master in [0u64, 1, 42, u64::MAX] {
        let seeds: HashSet<u64> = (0..100_000).map(|i| replica_seed(master, i)).collect();
        assert_eq!(seeds.len(), 100_000);
    }
}

#[test]
fn streams_do_not_overlap() {
    // 10^3 replicas, first 10^3 draws each: every draw is distinct
    let mut seen = HashSet::with_capacity(1_000_000);
    for i in 0..1000 {
        let mut rng = seeded(replica_seed(7, i));
        for _ in 0..1000 {
            assert!(seen.insert(rng.next_u64()), "repeated draw in replica {i}");
        }
    }
}

#[test]
fn replicas_are_reproducible() {
    let c = EnsembleConfig::new(2000, 4, 5);
    for i in 0..4 {
        assert_eq!(run_replica(&c, i), run_replica(&c, i));
    }
    assert_ne!(run_replica(&c, 0).seed, run_replica(&c, 1).seed);
}
