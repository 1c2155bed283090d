//! CSV and JSON file formats.
//!
//! CSV files have fixed headers and LF line endings; exact
//! rationals are always written as separate numerator and denominator
//! columns.

use std::collections::BTreeMap;
use std::io::{self, Write};

use olives_core::chain::{
    first_return_cdf, first_return_pmf_closed, printed_first_return_pmf, printed_first_return_pmf_at_one,
    UnitConvention,
};
use olives_core::{BigRational, SeriesPoint};
use serde::Serialize;

use crate::harness::reports::{concentration_report, plate_move_stats, ratio_estimate, Exceedance, LOG_CEILING};
use crate::harness::{EnsembleConfig, EnsembleStats};

pub const TRAJECTORY_HEADER: &str = "step,olives,plates,nonempty,first_plate_olives,max_other_olives";
pub const CHAIN_HEADER: &str = "t,f_num,f_den,f_paper_num,f_paper_den,cdf_num,cdf_den";
pub const ORACLE_HEADER: &str = "t,O,prob_num,prob_den";
pub const EXPECTED_HEADER: &str = "t,mean_num,mean_den";
pub const ENSEMBLE_HEADER: &str =
    "replica,seed,O,t_plate,tau1,two_to_one,max_other_olives,first_plate_olives,L_ge3,plate_moves_ge3";

pub fn write_trajectory_csv<W: Write>(mut w: W, series: &[SeriesPoint]) -> io::Result<()> {
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for p in series {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            p.step, p.olives, p.plates, p.nonempty, p.first_plate_olives, p.max_other_olives
        )?;
    }
    Ok(())
}

/// One row per return-time index `t = 1..=t_max`: validated `f(2t)`, the
/// printed closed form (with `C(-1, 0) = 1` at `t = 1`) and `F(2t)`.
pub fn write_chain_csv<W: Write>(mut w: W, t_max: u64) -> io::Result<()> {
    writeln!(w, "{CHAIN_HEADER}")?;
    let mut cdf = BigRational::from_integer(0.into());
    for t in 1..=t_max {
        let f = first_return_pmf_closed(t).expect("t >= 1");
        let printed = if t == 1 {
            printed_first_return_pmf_at_one(UnitConvention::Generalized)
        } else {
            printed_first_return_pmf(t).expect("t >= 2")
        };
        cdf += &f;
        debug_assert_eq!(cdf, first_return_cdf(2 * t));
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            t,
            f.numer(),
            f.denom(),
            printed.numer(),
            printed.denom(),
            cdf.numer(),
            cdf.denom()
        )?;
    }
    Ok(())
}

/// `t,O,prob_num,prob_den` rows for each horizon in `laws`.
pub fn write_oracle_csv<W: Write>(mut w: W, laws: &[(u64, BTreeMap<u64, BigRational>)]) -> io::Result<()> {
    writeln!(w, "{ORACLE_HEADER}")?;
    for (t, law) in laws {
        for (o, p) in law {
            writeln!(w, "{},{},{},{}", t, o, p.numer(), p.denom())?;
        }
    }
    Ok(())
}

pub fn write_expected_csv<W: Write>(mut w: W, means: &[(u64, BigRational)]) -> io::Result<()> {
    writeln!(w, "{EXPECTED_HEADER}")?;
    for (t, m) in means {
        writeln!(w, "{},{},{}", t, m.numer(), m.denom())?;
    }
    Ok(())
}

pub fn write_ensemble_csv<W: Write>(mut w: W, stats: &EnsembleStats) -> io::Result<()> {
    writeln!(w, "{ENSEMBLE_HEADER}")?;
    for r in stats.records() {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.replica,
            r.seed,
            r.olives,
            r.t_plate,
            r.tau1(),
            r.two_to_one,
            r.max_other_olives,
            r.first_plate_olives,
            r.removals_at_ge3,
            r.plate_moves_at_ge3
        )?;
    }
    Ok(())
}

/// Serializable copy of a [`SeriesPoint`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SeriesRow {
    pub step: u64,
    pub olives: u64,
    pub plates: u64,
    pub nonempty: u64,
    pub first_plate_olives: u64,
    pub max_other_olives: u64,
}

impl From<&SeriesPoint> for SeriesRow {
    fn from(p: &SeriesPoint) -> Self {
        SeriesRow {
            step: p.step,
            olives: p.olives,
            plates: p.plates,
            nonempty: p.nonempty,
            first_plate_olives: p.first_plate_olives,
            max_other_olives: p.max_other_olives,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub version: &'static str,
    pub elapsed_seconds: f64,
    pub command: Vec<String>,
    pub seed_derivation: &'static str,
}

pub const SEED_DERIVATION: &str =
    "replica i: splitmix64_mix(master_seed + 0x9E3779B97F4A7C15 * (i + 1)); stream: xoshiro256++ seed_from_u64";

impl Provenance {
    pub fn new(elapsed_seconds: f64, command: Vec<String>) -> Self {
        Provenance {
            version: env!("CARGO_PKG_VERSION"),
            elapsed_seconds,
            command,
            seed_derivation: SEED_DERIVATION,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryConfig {
    pub t: u64,
    #[serde(rename = "R")]
    pub replicas: u64,
    pub master_seed: u64,
    pub cadence: u64,
    pub deltas: Vec<f64>,
    pub c_bounds: (f64, f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryEstimates {
    #[serde(rename = "mean_O")]
    pub mean_olives: f64,
    pub ratio: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub c_hat: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryChecks {
    /// Every replica has `c1 <= O/t <= c2`.
    pub bounds_pass: bool,
    /// Every replica has at least `t/76` two-to-one transitions.
    pub tau1_pass: bool,
    pub removal_fraction: f64,
    pub sd: f64,
    pub exceedance: Vec<Exceedance>,
    pub max_other: u64,
    #[serde(rename = "B_fit")]
    pub b_fit: f64,
    pub identity_pass: bool,
    pub t_plate_pass: bool,
    pub removal_pass: bool,
    pub log_ceiling_pass: bool,
    pub tau1_min_returns: u64,
    pub tau1_min_with_initial: u64,
    pub min_t_plate_fraction: f64,
}

impl SummaryChecks {
    /// Checks whose failure makes the run exit with status 2.
    pub fn hard_pass(&self) -> bool {
        self.bounds_pass && self.identity_pass
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleSummary {
    pub config: SummaryConfig,
    pub estimates: SummaryEstimates,
    pub checks: SummaryChecks,
    pub provenance: Provenance,
    pub notes: Vec<&'static str>,
}

pub const ENSEMBLE_NOTES: [&str; 3] = [
    "c1/c2 bound O_t/t (bounds on E(O_t) read as normalized by t)",
    "tau1_pass uses two-to-one transitions only; tau1 column also counts the initial arrival at one plate",
    "merges keep the lower plate id, so plate 1 is never removed",
];

pub fn ensemble_summary(config: &EnsembleConfig, stats: &EnsembleStats, provenance: Provenance) -> EnsembleSummary {
    let est = ratio_estimate(stats);
    let conc = concentration_report(stats, &config.deltas);
    let plates = plate_move_stats(stats);
    let (c1, c2) = config.c_bounds;
    let bounds_pass = stats.records().all(|r| r.ratio() >= c1 && r.ratio() <= c2);
    let ln_t = (stats.t as f64).ln();
    let b_fit = if ln_t > 0.0 {
        stats.max_other_olives as f64 / ln_t
    } else {
        f64::NAN
    };
    EnsembleSummary {
        config: SummaryConfig {
            t: config.t,
            replicas: config.replicas,
            master_seed: config.master_seed,
            cadence: config.cadence,
            deltas: config.deltas.clone(),
            c_bounds: config.c_bounds,
        },
        estimates: SummaryEstimates {
            mean_olives: est.mean_olives,
            ratio: est.ratio,
            ci_low: est.ci_low,
            ci_high: est.ci_high,
            c_hat: est.ratio,
        },
        checks: SummaryChecks {
            bounds_pass,
            tau1_pass: plates.tau1_pass,
            removal_fraction: plates.removal_fraction,
            sd: conc.sd,
            exceedance: conc.exceedance,
            max_other: stats.max_other_olives,
            b_fit,
            identity_pass: stats.records().all(|r| r.identity_holds),
            t_plate_pass: plates.t_plate_pass,
            removal_pass: plates.removal_pass,
            log_ceiling_pass: stats.max_other_olives as f64 <= LOG_CEILING * ln_t,
            tau1_min_returns: plates.min_returns,
            tau1_min_with_initial: plates.min_tau1_with_initial,
            min_t_plate_fraction: plates.min_t_plate_fraction,
        },
        provenance,
        notes: ENSEMBLE_NOTES.to_vec(),
    }
}
