//! Single-trajectory execution with the diagnostic trackers.

use alloc::vec;
use alloc::vec::Vec;

use crate::process::{Move, TableState};
use crate::rng::seeded;

/// Above this horizon a cadence of 1 is widened so that at most this many
/// points are recorded.
pub const FULL_SERIES_LIMIT: u64 = 1_000_000;

/// One sampled row of the time series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeriesPoint {
    pub step: u64,
    pub olives: u64,
    pub plates: u64,
    pub nonempty: u64,
    pub first_plate_olives: u64,
    /// Running maximum over time of the olives on any plate other than plate 1.
    pub max_other_olives: u64,
}

impl SeriesPoint {
    fn of(state: &TableState) -> Self {
        SeriesPoint {
            step: state.step(),
            olives: state.total_olives(),
            plates: state.num_plates(),
            nonempty: state.num_nonempty(),
            first_plate_olives: state.first_plate_olives(),
            max_other_olives: state.peak_other_olives(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrajectoryRecord {
    pub final_state: TableState,
    /// Steps at which a merge took the table from two plates to one.
    pub two_to_one_times: Vec<u64>,
    /// `O(t_{i+1}) - O(t_i)` over consecutive two-to-one times, with
    /// `t_0 = 1` prepended, so there is one increment per transition.
    pub olive_increments: Vec<i64>,
    /// `tau[i]` counts entries into "exactly `i` plates". The arrival at one
    /// plate on step 1 is counted, so `tau[1] = 1 + two_to_one_times.len()`.
    pub tau: Vec<u64>,
    /// Merges performed with at least three plates on the table.
    pub removals_at_ge3: u64,
    /// Plate moves performed with at least three plates on the table.
    pub plate_moves_at_ge3: u64,
    pub max_other_olives: u64,
    pub first_plate_olives: u64,
    pub series: Vec<SeriesPoint>,
}

impl TrajectoryRecord {
    /// Number of two-to-one transitions; the count of returns to a single
    /// plate that excludes the initial arrival.
    pub fn returns_to_one(&self) -> u64 {
        self.two_to_one_times.len() as u64
    }

    /// Entries into one plate including the initial arrival.
    pub fn tau1(&self) -> u64 {
        self.tau.get(1).copied().unwrap_or(0)
    }

    /// Gaps `t_{i+1} - t_i` between consecutive two-to-one times
    /// (`t_0 = 1` included).
    pub fn gaps(&self) -> Vec<u64> {
        let mut prev = 1;
        self.two_to_one_times
            .iter()
            .map(|&t| {
                let g = t - prev;
                prev = t;
                g
            })
            .collect()
    }
}

/// Effective series cadence: 0 disables recording.
pub fn effective_cadence(t_max: u64, cadence: u64) -> u64 {
    if cadence == 1 && t_max > FULL_SERIES_LIMIT {
        t_max.div_ceil(FULL_SERIES_LIMIT)
    } else {
        cadence
    }
}

/// Runs `t_max` steps from the empty table with a stream seeded by `seed`.
///
/// With `cadence > 0` a [`SeriesPoint`] is recorded on every multiple of the
/// (effective) cadence and on the final step.
pub fn run_trajectory(t_max: u64, seed: u64, cadence: u64) -> TrajectoryRecord {
    let mut rng = seeded(seed);
    let cadence = effective_cadence(t_max, cadence);
    let mut state = TableState::new();
    let mut two_to_one_times = Vec::new();
    let mut olive_increments = Vec::new();
    let mut tau = vec![0u64; 8];
    let mut removals_at_ge3 = 0;
    let mut plate_moves_at_ge3 = 0;
    let mut last_mark = 0u64;
    let mut series = Vec::new();
    if let Some(points) = t_max.checked_div(cadence) {
        series.reserve(points as usize + 1);
    }

    for _ in 0..t_max {
        let before = state.num_plates();
        let mv = state.step_with(&mut rng);
        let after = state.num_plates();
        if after != before {
            let level = after as usize;
            if level >= tau.len() {
                tau.resize(level + 1, 0);
            }
            tau[level] += 1;
        }
        if before >= 3 && mv.is_plate_move() {
            plate_moves_at_ge3 += 1;
            if matches!(mv, Move::MergePlates(..)) {
                removals_at_ge3 += 1;
            }
        }
        if before == 2 && after == 1 {
            let olives = state.total_olives();
            two_to_one_times.push(state.step());
            olive_increments.push(olives as i64 - last_mark as i64);
            last_mark = olives;
        }
        if cadence > 0 && (state.step() % cadence == 0 || state.step() == t_max) {
            series.push(SeriesPoint::of(&state));
        }
    }

    TrajectoryRecord {
        two_to_one_times,
        olive_increments,
        tau,
        removals_at_ge3,
        plate_moves_at_ge3,
        max_other_olives: state.peak_other_olives(),
        first_plate_olives: state.first_plate_olives(),
        series,
        final_state: state,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_step() {
        let r = run_trajectory(1, 0, 1);
        assert_eq!(r.final_state.num_plates(), 1);
        assert_eq!(r.final_state.total_olives(), 0);
        assert_eq!(r.tau1(), 1);
        assert_eq!(r.returns_to_one(), 0);
        assert_eq!(r.series.len(), 1);
    }

    #[test]
    fn trackers_are_consistent() {
        let r = run_trajectory(100_000, 17, 0);
        assert!(r.series.is_empty());
        assert_eq!(r.tau1(), 1 + r.returns_to_one());
        assert_eq!(r.olive_increments.len(), r.two_to_one_times.len());
        assert!(r.two_to_one_times.windows(2).all(|w| w[0] < w[1]));
        assert!(r.gaps().iter().all(|&g| g >= 2));
        r.final_state.check_invariants().unwrap();
        let s: i64 = r.olive_increments.iter().sum();
        let replay = run_trajectory(*r.two_to_one_times.last().unwrap(), 17, 0);
        assert_eq!(s, replay.final_state.total_olives() as i64);
        assert!(r.removals_at_ge3 <= r.plate_moves_at_ge3);
        let o = r.final_state.total_olives() as f64 / 100_000.0;
        assert!((1.0 / 342.0..=2.0 / 3.0).contains(&o));
    }

    #[test]
    fn reproducible() {
        assert_eq!(run_trajectory(5_000, 3, 7), run_trajectory(5_000, 3, 7));
        assert_ne!(
            run_trajectory(5_000, 3, 7).final_state,
            run_trajectory(5_000, 4, 7).final_state
        );
    }

    #[test]
    fn cadence_sampling() {
        let r = run_trajectory(1_000, 1, 100);
        let steps: Vec<u64> = r.series.iter().map(|p| p.step).collect();
        assert_eq!(steps, (1..=10).map(|k| k * 100).collect::<Vec<_>>());
        let r = run_trajectory(1_005, 1, 100);
        assert_eq!(r.series.last().unwrap().step, 1_005);
        assert_eq!(effective_cadence(3_000_000, 1), 3);
        assert_eq!(effective_cadence(1_000_000, 1), 1);
        assert_eq!(effective_cadence(3_000_000, 50), 50);
    }
}
