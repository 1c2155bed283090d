//! Report builders over ensemble statistics.

use serde::Serialize;

use super::config::{EnsembleConfig, HarnessError, LOWER_RATIO, UPPER_RATIO};
use super::intervals::{wilson_upper, Z99};
use super::run::run_ensemble;
use super::stats::EnsembleStats;

/// Lower bound on the number of returns to one plate, as a fraction of `t`.
pub const TAU1_FRACTION: f64 = 1.0 / 76.0;
/// Per-replica floor for the fraction of plate moves.
pub const T_PLATE_FLOOR: f64 = 0.30;
/// Conditional probability floor for a merge among plate moves at three or more plates.
pub const REMOVAL_FLOOR: f64 = 0.75;
/// Ceiling factor on `max_other_olives / ln t`.
pub const LOG_CEILING: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioEstimate {
    pub t: u64,
    pub replicas: u64,
    pub mean_olives: f64,
    pub ratio: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

/// Mean of `O/t` with a 99% normal-approximation interval.
pub fn ratio_estimate(stats: &EnsembleStats) -> RatioEstimate {
    let t = stats.t as f64;
    let (mean, sd) = stats.olive_mean_sd();
    let half = Z99 * sd / (stats.replicas() as f64).sqrt() / t;
    RatioEstimate {
        t: stats.t,
        replicas: stats.replicas(),
        mean_olives: mean,
        ratio: mean / t,
        ci_low: mean / t - half,
        ci_high: mean / t + half,
        min_ratio: stats.min_olives.map_or(f64::NAN, |o| o as f64 / t),
        max_ratio: stats.max_olives.map_or(f64::NAN, |o| o as f64 / t),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CReport {
    pub rows: Vec<RatioEstimate>,
    /// Largest difference between the mean ratios at two horizons.
    pub max_pairwise_difference: f64,
    pub all_within_bounds: bool,
}

pub fn c_report(rows: Vec<RatioEstimate>) -> CReport {
    let mut diff: f64 = 0.0;
    for a in &rows {
        for b in &rows {
            diff = diff.max((a.ratio - b.ratio).abs());
        }
    }
    let all_within_bounds = rows
        .iter()
        .all(|r| r.min_ratio >= LOWER_RATIO && r.max_ratio <= UPPER_RATIO);
    CReport {
        rows,
        max_pairwise_difference: diff,
        all_within_bounds,
    }
}

/// Ratio estimates at several horizons, one ensemble per horizon.
pub fn estimate_c(
    t_list: &[u64],
    replicas: u64,
    master_seed: u64,
    threads: Option<usize>,
) -> Result<CReport, HarnessError> {
    let mut rows = Vec::with_capacity(t_list.len());
    for &t in t_list {
        if t < 1000 {
            return Err(HarnessError::InvalidConfig(format!("horizon {t} is below 1000")));
        }
        let stats = run_ensemble(&EnsembleConfig::new(t, replicas, master_seed), threads)?;
        rows.push(ratio_estimate(&stats));
    }
    Ok(c_report(rows))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exceedance {
    pub delta: f64,
    pub count: u64,
    pub freq: f64,
    pub wilson_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub t: u64,
    pub replicas: u64,
    pub mean_olives: f64,
    pub sd: f64,
    /// `sd < t^(3/4)`.
    pub sublinear_sd: bool,
    pub exceedance: Vec<Exceedance>,
}

/// Frequencies of `|O - mean| >= delta t` with Wilson 99% upper bounds.
pub fn concentration_report(stats: &EnsembleStats, deltas: &[f64]) -> ConcentrationReport {
    let (mean, sd) = stats.olive_mean_sd();
    let t = stats.t as f64;
    let n = stats.replicas();
    let exceedance = deltas
        .iter()
        .map(|&delta| {
            let count = stats
                .olive_histogram
                .iter()
                .filter(|(&o, _)| (o as f64 - mean).abs() >= delta * t)
                .map(|(_, &c)| c)
                .sum();
            Exceedance {
                delta,
                count,
                freq: count as f64 / n as f64,
                wilson_hi: wilson_upper(count, n, Z99),
            }
        })
        .collect();
    ConcentrationReport {
        t: stats.t,
        replicas: n,
        mean_olives: mean,
        sd,
        sublinear_sd: sd < t.powf(0.75),
        exceedance,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlateMoveReport {
    pub t: u64,
    pub min_t_plate_fraction: f64,
    pub mean_t_plate_fraction: f64,
    /// Smallest number of two-to-one transitions over replicas.
    pub min_returns: u64,
    /// Smallest `tau_1` counting the initial arrival.
    pub min_tau1_with_initial: u64,
    pub tau1_threshold: f64,
    pub two_to_one_rate: f64,
    /// Aggregate fraction of merges among plate moves at three or more plates.
    pub removal_fraction: f64,
    /// Smallest per-replica `(fraction - 3/4) / se`, with `se` at `p = 3/4`.
    pub min_removal_z: f64,
    pub t_plate_pass: bool,
    pub tau1_pass: bool,
    pub removal_pass: bool,
}

/// Structural diagnostics, each evaluated replica by replica.
pub fn plate_move_stats(stats: &EnsembleStats) -> PlateMoveReport {
    let t = stats.t as f64;
    let n = stats.replicas() as f64;
    let mut min_frac = f64::INFINITY;
    let mut min_returns = u64::MAX;
    let mut min_tau1 = u64::MAX;
    let mut min_z = f64::INFINITY;
    for r in stats.records() {
        min_frac = min_frac.min(r.t_plate as f64 / t);
        min_returns = min_returns.min(r.two_to_one);
        min_tau1 = min_tau1.min(r.tau1());
        if r.plate_moves_at_ge3 > 0 {
            let k = r.plate_moves_at_ge3 as f64;
            let frac = r.removals_at_ge3 as f64 / k;
            let se = (REMOVAL_FLOOR * (1.0 - REMOVAL_FLOOR) / k).sqrt();
            min_z = min_z.min((frac - REMOVAL_FLOOR) / se);
        }
    }
    let threshold = t * TAU1_FRACTION;
    PlateMoveReport {
        t: stats.t,
        min_t_plate_fraction: min_frac,
        mean_t_plate_fraction: stats.sum_t_plate as f64 / (n * t),
        min_returns,
        min_tau1_with_initial: min_tau1,
        tau1_threshold: threshold,
        two_to_one_rate: stats.sum_two_to_one as f64 / (n * t),
        removal_fraction: stats.sum_removals_at_ge3 as f64 / stats.sum_plate_moves_at_ge3.max(1) as f64,
        min_removal_z: min_z,
        t_plate_pass: min_frac >= T_PLATE_FLOOR,
        tau1_pass: min_returns as f64 >= threshold,
        removal_pass: min_z >= -4.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailPoint {
    pub k: u64,
    pub survival: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XiTailReport {
    pub increments: u64,
    pub mean_increment: f64,
    pub max_increment: i64,
    pub min_gap: u64,
    pub mean_gap: f64,
    /// Empirical `Pr(gap >= k)` at a few checkpoints.
    pub gap_survival: Vec<TailPoint>,
    /// Fitted per-step decay factor of `Pr(gap >= k)` beyond `k = 50`.
    pub gap_decay_rate: f64,
    /// Fitted per-unit decay factor of `Pr(X >= k)` for `k >= 1`.
    pub increment_decay_rate: f64,
    pub geometric_beyond_50: bool,
}

/// Least-squares slope of `ln Pr(X >= k)` against `k` over `k >= from`,
/// using points with at least `min_count` observations. Returns `exp(slope)`.
fn fit_decay(sorted: &[i64], from: i64, min_count: usize) -> f64 {
    let n = sorted.len();
    let mut pts = Vec::new();
    let mut k = from;
    loop {
        let idx = sorted.partition_point(|&x| x < k);
        let count = n - idx;
        if count < min_count {
            break;
        }
        pts.push((k as f64, (count as f64 / n as f64).ln()));
        k += 1;
    }
    if pts.len() < 2 {
        return f64::NAN;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxy / sxx).exp()
}

/// Tails of the inter-return increments and gap lengths.
pub fn xi_tail_report(stats: &EnsembleStats) -> Result<XiTailReport, HarnessError> {
    let mut xs: Vec<i64> = stats.records().flat_map(|r| r.increments.iter().copied()).collect();
    let mut gaps: Vec<i64> = stats.records().flat_map(|r| r.gaps.iter().map(|&g| g as i64)).collect();
    if xs.len() < 1000 {
        return Err(HarnessError::InsufficientData(format!(
            "{} increments recorded, need 1000",
            xs.len()
        )));
    }
    xs.sort_unstable();
    gaps.sort_unstable();
    let n = gaps.len();
    let survival = |k: i64| (n - gaps.partition_point(|&g| g < k)) as f64 / n as f64;
    let gap_decay_rate = fit_decay(&gaps, 50, 20);
    Ok(XiTailReport {
        increments: xs.len() as u64,
        mean_increment: xs.iter().sum::<i64>() as f64 / xs.len() as f64,
        max_increment: *xs.last().unwrap(),
        min_gap: gaps[0] as u64,
        mean_gap: gaps.iter().sum::<i64>() as f64 / n as f64,
        gap_survival: [2, 10, 50, 100, 200]
            .iter()
            .map(|&k| TailPoint {
                k: k as u64,
                survival: survival(k),
            })
            .collect(),
        gap_decay_rate,
        increment_decay_rate: fit_decay(&xs, 1, 20),
        geometric_beyond_50: gap_decay_rate < 1.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRow {
    pub t: u64,
    pub max_other_olives: u64,
    pub ln_t: f64,
    pub per_log: f64,
    pub exceeds_ceiling: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogGrowthReport {
    pub rows: Vec<GrowthRow>,
    /// Largest observed `max_other / ln t`.
    pub b_fit: f64,
    /// `max_other` ratio between consecutive horizons.
    pub growth_ratios: Vec<f64>,
}

pub fn log_growth_report(stats: &[&EnsembleStats]) -> LogGrowthReport {
    let rows: Vec<GrowthRow> = stats
        .iter()
        .map(|s| {
            let ln_t = (s.t as f64).ln();
            GrowthRow {
                t: s.t,
                max_other_olives: s.max_other_olives,
                ln_t,
                per_log: s.max_other_olives as f64 / ln_t,
                exceeds_ceiling: s.max_other_olives as f64 > LOG_CEILING * ln_t,
            }
        })
        .collect();
    let b_fit = rows.iter().map(|r| r.per_log).fold(0.0, f64::max);
    let growth_ratios = rows
        .windows(2)
        .map(|w| w[1].max_other_olives as f64 / w[0].max_other_olives.max(1) as f64)
        .collect();
    LogGrowthReport {
        rows,
        b_fit,
        growth_ratios,
    }
}

/// Largest olive count on any plate but plate 1, per horizon.
pub fn log_growth_check(
    t_list: &[u64],
    replicas: u64,
    master_seed: u64,
    threads: Option<usize>,
) -> Result<LogGrowthReport, HarnessError> {
    if t_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HarnessError::InvalidConfig("horizons must be increasing".into()));
    }
    let runs = t_list
        .iter()
        .map(|&t| run_ensemble(&EnsembleConfig::new(t, replicas, master_seed), threads))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(log_growth_report(&runs.iter().collect::<Vec<_>>()))
}
