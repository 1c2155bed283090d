use std::collections::BTreeMap;

use olives_core::TrajectoryRecord;

use super::config::HarnessError;
use super::intervals::mean_and_variance;

/// Everything kept from one replica.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplicaRecord {
    pub replica: u64,
    pub seed: u64,
    pub t: u64,
    pub olives: u64,
    pub plates: u64,
    pub t_plate: u64,
    pub remove_olive_moves: u64,
    /// Entries into each plate level; `tau[1]` includes the initial arrival.
    pub tau: Vec<u64>,
    /// Two-to-one transitions, i.e. returns to a single plate.
    pub two_to_one: u64,
    pub increments: Vec<i64>,
    pub gaps: Vec<u64>,
    pub max_other_olives: u64,
    pub first_plate_olives: u64,
    pub removals_at_ge3: u64,
    pub plate_moves_at_ge3: u64,
    /// `O = t - t_plate - 2 * removals` held at the final step.
    pub identity_holds: bool,
}

impl ReplicaRecord {
    pub fn from_trajectory(replica: u64, seed: u64, rec: &TrajectoryRecord) -> Self {
        let s = &rec.final_state;
        ReplicaRecord {
            replica,
            seed,
            t: s.step(),
            olives: s.total_olives(),
            plates: s.num_plates(),
            t_plate: s.plate_moves(),
            remove_olive_moves: s.counters().remove_olive,
            tau: rec.tau.clone(),
            two_to_one: rec.returns_to_one(),
            increments: rec.olive_increments.clone(),
            gaps: rec.gaps(),
            max_other_olives: rec.max_other_olives,
            first_plate_olives: rec.first_plate_olives,
            removals_at_ge3: rec.removals_at_ge3,
            plate_moves_at_ge3: rec.plate_moves_at_ge3,
            identity_holds: s.check_invariants().is_ok(),
        }
    }

    pub fn tau1(&self) -> u64 {
        self.tau.get(1).copied().unwrap_or(0)
    }

    pub fn ratio(&self) -> f64 {
        self.olives as f64 / self.t as f64
    }
}

/// Per-replica records plus exact integer aggregates.
///
/// `merge` is associative and commutative with [`EnsembleStats::empty`] as
/// identity: records are keyed by replica index and every aggregate is an
/// integer sum or extremum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnsembleStats {
    pub t: u64,
    pub master_seed: u64,
    records: BTreeMap<u64, ReplicaRecord>,
    pub sum_olives: u128,
    pub sum_sq_olives: u128,
    pub olive_histogram: BTreeMap<u64, u64>,
    pub min_olives: Option<u64>,
    pub max_olives: Option<u64>,
    pub max_other_olives: u64,
    pub sum_t_plate: u128,
    pub sum_two_to_one: u128,
    pub sum_removals_at_ge3: u128,
    pub sum_plate_moves_at_ge3: u128,
    pub tau_totals: Vec<u64>,
}

impl EnsembleStats {
    pub fn empty(t: u64, master_seed: u64) -> Self {
        EnsembleStats {
            t,
            master_seed,
            records: BTreeMap::new(),
            sum_olives: 0,
            sum_sq_olives: 0,
            olive_histogram: BTreeMap::new(),
            min_olives: None,
            max_olives: None,
            max_other_olives: 0,
            sum_t_plate: 0,
            sum_two_to_one: 0,
            sum_removals_at_ge3: 0,
            sum_plate_moves_at_ge3: 0,
            tau_totals: Vec::new(),
        }
    }

    pub fn from_records(
        t: u64,
        master_seed: u64,
        records: impl IntoIterator<Item = ReplicaRecord>,
    ) -> Result<Self, HarnessError> {
        let mut stats = EnsembleStats::empty(t, master_seed);
        for r in records {
            stats.push(r)?;
        }
        Ok(stats)
    }

    pub fn push(&mut self, r: ReplicaRecord) -> Result<(), HarnessError> {
        if r.t != self.t {
            return Err(HarnessError::ConfigMismatch(format!(
                "replica {} ran {} steps, expected {}",
                r.replica, r.t, self.t
            )));
        }
        if self.records.contains_key(&r.replica) {
            return Err(HarnessError::OverlappingReplicas(r.replica));
        }
        let o = r.olives as u128;
        self.sum_olives += o;
        self.sum_sq_olives += o * o;
        *self.olive_histogram.entry(r.olives).or_default() += 1;
        self.min_olives = Some(self.min_olives.map_or(r.olives, |m| m.min(r.olives)));
        self.max_olives = Some(self.max_olives.map_or(r.olives, |m| m.max(r.olives)));
        self.max_other_olives = self.max_other_olives.max(r.max_other_olives);
        self.sum_t_plate += r.t_plate as u128;
        self.sum_two_to_one += r.two_to_one as u128;
        self.sum_removals_at_ge3 += r.removals_at_ge3 as u128;
        self.sum_plate_moves_at_ge3 += r.plate_moves_at_ge3 as u128;
        add_into(&mut self.tau_totals, &r.tau);
        self.records.insert(r.replica, r);
        Ok(())
    }

    /// Combines statistics of disjoint replica sets from the same run.
    pub fn merge(mut self, other: EnsembleStats) -> Result<EnsembleStats, HarnessError> {
        if self.t != other.t || self.master_seed != other.master_seed {
            return Err(HarnessError::ConfigMismatch(format!(
                "t/master_seed {}/{} vs {}/{}",
                self.t, self.master_seed, other.t, other.master_seed
            )));
        }
        if let Some(k) = other.records.keys().find(|k| self.records.contains_key(k)) {
            return Err(HarnessError::OverlappingReplicas(*k));
        }
        self.sum_olives += other.sum_olives;
        self.sum_sq_olives += other.sum_sq_olives;
        for (o, c) in other.olive_histogram {
            *self.olive_histogram.entry(o).or_default() += c;
        }
        self.min_olives = opt_combine(self.min_olives, other.min_olives, u64::min);
        self.max_olives = opt_combine(self.max_olives, other.max_olives, u64::max);
        self.max_other_olives = self.max_other_olives.max(other.max_other_olives);
        self.sum_t_plate += other.sum_t_plate;
        self.sum_two_to_one += other.sum_two_to_one;
        self.sum_removals_at_ge3 += other.sum_removals_at_ge3;
        self.sum_plate_moves_at_ge3 += other.sum_plate_moves_at_ge3;
        add_into(&mut self.tau_totals, &other.tau_totals);
        self.records.extend(other.records);
        Ok(self)
    }

    pub fn replicas(&self) -> u64 {
        self.records.len() as u64
    }

    /// Records in replica-index order.
    pub fn records(&self) -> impl Iterator<Item = &ReplicaRecord> {
        self.records.values()
    }

    /// Sample mean and unbiased sample standard deviation of `O`.
    pub fn olive_mean_sd(&self) -> (f64, f64) {
        let (m, v) = mean_and_variance(self.replicas(), self.sum_olives, self.sum_sq_olives);
        (m, v.sqrt())
    }
}

fn add_into(acc: &mut Vec<u64>, xs: &[u64]) {
    if acc.len() < xs.len() {
        acc.resize(xs.len(), 0);
    }
    for (a, x) in acc.iter_mut().zip(xs) {
        *a += x;
    }
    // trailing zeros would make equal aggregates compare unequal
    while acc.last() == Some(&0) {
        acc.pop();
    }
}

fn opt_combine(a: Option<u64>, b: Option<u64>, f: fn(u64, u64) -> u64) -> Option<u64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(f(x, y)),
        (x, None) => x,
        (None, y) => y,
    }
}
