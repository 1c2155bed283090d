//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Every criterion also has a wall-clock budget.

use std::process::{Command, ExitCode};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use olives_core::chain::{
    first_return_pmf_closed, first_return_pmf_convolution, first_return_pmf_dp, mean_return_time_series,
    mean_return_time_stationary, printed_first_return_pmf, simulate_walk, verify_binomial_series,
    verify_catalan_convolution, verify_gould_identity, PRINTED_MEAN_RETURN_TIME,
};
use olives_core::exact::{enumerate_chain_paths, exact_expected_olives};
use olives_core::rational::{int, ratio, to_f64};
use olives_core::rng::{replica_seed, seeded};
use olives_core::TableState;
use olives_lab::harness::reports::{
    concentration_report, log_growth_report, plate_move_stats, ratio_estimate, LOG_CEILING,
};
use olives_lab::harness::run_replica;
use olives_lab::verify::oracle_vs_mc;
use olives_lab::{run_ensemble, EnsembleConfig, EnsembleStats, ReplicaRecord};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn olives(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_olives"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// The t = 10^5, R = 10^3 ensemble shared by several criteria.
fn main_ensemble() -> &'static EnsembleStats {
    static STATS: OnceLock<EnsembleStats> = OnceLock::new();
    STATS.get_or_init(|| run_ensemble(&EnsembleConfig::new(100_000, 1000, 2024), None).unwrap())
}

fn ac1_pmf_agreement() -> Outcome {
    let dp = first_return_pmf_dp(30);
    let paths = enumerate_chain_paths(10).map_err(|e| e.to_string())?;
    for t in 2..=30 {
        let closed = first_return_pmf_closed(t).unwrap();
        ensure(dp.f(t) == closed, format!("dp != closed at t={t}"))?;
        ensure(
            first_return_pmf_convolution(t).unwrap() == closed,
            format!("convolution != closed at t={t}"),
        )?;
        if t <= 10 {
            ensure(paths.f(t) == closed, format!("paths != closed at t={t}"))?;
        }
    }
    ensure(paths.f(1) == dp.f(1), "t=1")?;
    Ok("dp = closed = convolution for 2 <= t <= 30; path sums agree for t <= 10".into())
}

fn ac2_discrepancy() -> Outcome {
    for t in 2..=30 {
        let r = printed_first_return_pmf(t).unwrap() / first_return_pmf_closed(t).unwrap();
        ensure(r == int(4), format!("ratio {r} at t={t}"))?;
    }
    let est = mean_return_time_series(200).map_err(|e| e.to_string())?;
    let stationary = mean_return_time_stationary();
    let width = to_f64(&est.tail_bound);
    ensure(est.contains(&stationary), "series interval misses 1/pi_1")?;
    ensure(width < 1e-15, format!("tail bound {width}"))?;
    let out = olives(&["chain", "--t-max", "30", "--seed", "1", "--simulate-steps", "0"]);
    ensure(out.status.code() == Some(0), "chain command failed")?;
    let report = String::from_utf8_lossy(&out.stderr);
    ensure(
        report.contains(&format!("printed T11:            {PRINTED_MEAN_RETURN_TIME}")),
        "report lacks the printed 19",
    )?;
    ensure(
        report.contains(&format!("validated (1/pi_1):     {stationary}")),
        "report lacks 1/pi_1",
    )?;
    ensure(report.contains("series interval:"), "report lacks the series interval")?;
    Ok(format!("printed / validated = 4 for 2 <= t <= 30; 1/pi_1 = {stationary} in series interval of width {width:.2e}; report shows 19 alongside"))
}

fn ac3_ergodic() -> Outcome {
    let run = simulate_walk(10_000_000, 33, false);
    let rate = run.return_rate();
    let target = 1.0 / to_f64(&mean_return_time_stationary());
    ensure(
        (rate - target).abs() <= 0.005,
        format!("N11/t = {rate}, 1/T = {target}"),
    )?;
    ensure(rate >= 1.0 / 19.0, format!("N11/t = {rate} < 1/19"))?;
    Ok(format!("N11/t = {rate:.6}, 1/T = {target}, >= 1/19"))
}

fn ac4_identities() -> Outcome {
    let cat = verify_catalan_convolution(2..=12);
    cat.check().map_err(|e| e.to_string())?;
    let gould = verify_gould_identity(2..=60, 1..=59);
    gould.check().map_err(|e| e.to_string())?;
    let bin = verify_binomial_series(&ratio(3, 4), 200, 1e-8).map_err(|e| e.to_string())?;
    bin.check().map_err(|e| e.to_string())?;
    ensure(
        bin.mean_weighted_term.closed_form == int(12),
        "weighted closed form is not 12",
    )?;
    ensure(
        bin.mean_central_term.closed_form == int(6),
        "central closed form is not 6",
    )?;
    Ok(format!(
        "{} Catalan rows, {} Gould rows; sums 12 and 6 within {:.1e} and {:.1e}",
        cat.rows.len(),
        gould.rows.len(),
        bin.mean_weighted_term.error(),
        bin.mean_central_term.error()
    ))
}

fn ac5_oracle_vs_mc() -> Outcome {
    ensure(exact_expected_olives(2).unwrap() == ratio(1, 2), "E(O_2) != 1/2")?;
    ensure(exact_expected_olives(3).unwrap() == ratio(3, 4), "E(O_3) != 3/4")?;
    let c = oracle_vs_mc(12, 1_000_000, 77).map_err(|e| e.to_string())?;
    ensure(c.z.abs() <= 4.0, format!("z = {}", c.z))?;
    Ok(format!(
        "E(O_12) = {:.6} exact, MC {:.6} +- {:.6} (z = {:.2})",
        c.exact_mean_f64, c.mc_mean, c.se, c.z
    ))
}

fn ac6_bounds() -> Outcome {
    let s = main_ensemble();
    let bad: Vec<&ReplicaRecord> = s
        .records()
        .filter(|r| !(r.ratio() >= 1.0 / 342.0 && r.ratio() <= 2.0 / 3.0))
        .collect();
    ensure(s.replicas() == 1000, "wrong replica count")?;
    ensure(bad.is_empty(), format!("{} replicas out of bounds", bad.len()))?;
    let e = ratio_estimate(s);
    Ok(format!(
        "all 1000 replicas in [1/342, 2/3]; O/t ranges {:.4}..{:.4}",
        e.min_ratio, e.max_ratio
    ))
}

fn ac7_linearity() -> Outcome {
    let rows: Vec<_> = [10_000u64, 100_000]
        .iter()
        .map(|&t| ratio_estimate(&run_ensemble(&EnsembleConfig::new(t, 200, 707), None).unwrap()))
        .collect();
    for r in &rows {
        ensure(
            (0.085..=0.107).contains(&r.ratio),
            format!("ratio {} at t={}", r.ratio, r.t),
        )?;
    }
    let diff = (rows[0].ratio - rows[1].ratio).abs();
    ensure(diff < 0.01, format!("ratios differ by {diff}"))?;
    Ok(format!(
        "O/t = {:.5} at 1e4, {:.5} at 1e5 (difference {diff:.5})",
        rows[0].ratio, rows[1].ratio
    ))
}

fn ac8_concentration() -> Outcome {
    let s = main_ensemble();
    let c = concentration_report(s, &[0.05]);
    let e = &c.exceedance[0];
    ensure(c.sublinear_sd, format!("sd {} >= t^0.75", c.sd))?;
    ensure(e.count == 0, format!("{} exceedances at delta 0.05", e.count))?;
    ensure(e.wilson_hi < 0.01, format!("Wilson upper {}", e.wilson_hi))?;
    Ok(format!(
        "sd {:.1} < t^0.75 = {:.1}; no exceedance at 0.05 (Wilson 99% upper {:.4})",
        c.sd,
        (s.t as f64).powf(0.75),
        e.wilson_hi
    ))
}

fn ac9_structure() -> Outcome {
    let p = plate_move_stats(main_ensemble());
    ensure(
        p.tau1_pass,
        format!("min two-to-one count {} < {}", p.min_returns, p.tau1_threshold),
    )?;
    ensure(p.t_plate_pass, format!("min t_plate/t {}", p.min_t_plate_fraction))?;
    ensure(p.removal_pass, format!("min removal z {}", p.min_removal_z))?;
    Ok(format!(
        "min returns {} >= {:.0}; min t_plate/t {:.4}; removal fraction {:.4}, min z {:.2}",
        p.min_returns, p.tau1_threshold, p.min_t_plate_fraction, p.removal_fraction, p.min_removal_z
    ))
}

fn ac10_log_growth() -> Outcome {
    let runs: Vec<EnsembleStats> = [10_000u64, 1_000_000]
        .iter()
        .map(|&t| run_ensemble(&EnsembleConfig::new(t, 50, 1010), None).unwrap())
        .collect();
    let g = log_growth_report(&runs.iter().collect::<Vec<_>>());
    for r in &g.rows {
        ensure(
            !r.exceeds_ceiling,
            format!("max {} > {LOG_CEILING} ln t at t={}", r.max_other_olives, r.t),
        )?;
    }
    let growth = g.growth_ratios[0];
    ensure(growth < 2.0, format!("growth factor {growth}"))?;
    Ok(format!(
        "max other-plate olives {} at 1e4, {} at 1e6 (factor {growth:.3}); B fit {:.3}",
        g.rows[0].max_other_olives, g.rows[1].max_other_olives, g.b_fit
    ))
}

fn identity_every_step(t: u64, seed: u64) -> bool {
    let mut rng = seeded(seed);
    let mut s = TableState::new();
    for step in 1..=t {
        s.step_with(&mut rng);
        let c = s.counters();
        if s.total_olives() + s.plate_moves() + 2 * c.remove_olive != step {
            return false;
        }
    }
    s.check_invariants().is_ok()
}

fn ac11_engineering() -> Outcome {
    let ok = (0..100u64)
        .into_par_iter()
        .filter(|&i| identity_every_step(100_000, replica_seed(11, i)))
        .count();
    ensure(ok == 100, format!("identity broke in {} trajectories", 100 - ok))?;

    let config = EnsembleConfig::new(200, 16, 5);
    let recs: Vec<ReplicaRecord> = (0..16).map(|i| run_replica(&config, i)).collect();
    let of = |mask: &[u8], want: u8| {
        EnsembleStats::from_records(
            200,
            5,
            recs.iter()
                .zip(mask)
                .filter(|(_, &m)| m == want)
                .map(|(r, _)| r.clone()),
        )
        .unwrap()
    };
    let whole = EnsembleStats::from_records(200, 5, recs.iter().cloned()).unwrap();
    let rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    let mut runner = TestRunner::new_with_rng(
        Config {
            failure_persistence: None,
            ..Config::with_cases(128)
        },
        rng,
    );
    runner
        .run(&proptest::collection::vec(0u8..3, 16), |mask| {
            let (a, b, c) = (of(&mask, 0), of(&mask, 1), of(&mask, 2));
            let left = a.clone().merge(b.clone()).unwrap().merge(c.clone()).unwrap();
            let right = a.clone().merge(b.clone().merge(c.clone()).unwrap()).unwrap();
            prop_assert_eq!(&left, &right);
            prop_assert_eq!(&left, &whole);
            prop_assert_eq!(a.clone().merge(b.clone()).unwrap(), b.merge(a.clone()).unwrap());
            prop_assert_eq!(a.clone().merge(EnsembleStats::empty(200, 5)).unwrap(), a);
            Ok(())
        })
        .map_err(|e| format!("merge law: {e}"))?;

    let sim = ["simulate", "--t", "5000", "--seed", "99"];
    let (a, b) = (olives(&sim), olives(&sim));
    ensure(
        a.status.code() == Some(0) && a.stdout == b.stdout,
        "simulate output differs",
    )?;
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for (d, threads) in dirs.iter().zip(["1", "4"]) {
        let out = olives(&[
            "ensemble",
            "--t",
            "2000",
            "--replicas",
            "12",
            "--seed",
            "8",
            "--threads",
            threads,
            "--out",
            d.path().to_str().unwrap(),
        ]);
        ensure(out.status.code() == Some(0), "ensemble failed")?;
    }
    let read = |i: usize| std::fs::read(dirs[i].path().join("ensemble.csv")).unwrap();
    ensure(read(0) == read(1), "ensemble.csv differs across runs")?;
    Ok("identity at every step of 100 trajectories of 1e5 moves; merge laws over 128 partitions; byte-identical reruns".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (
            "AC1",
            "exact pmf triple agreement",
            Duration::from_secs(10),
            ac1_pmf_agreement,
        ),
        (
            "AC2",
            "discrepancy documentation",
            Duration::from_secs(5),
            ac2_discrepancy,
        ),
        ("AC3", "ergodic return rate", Duration::from_secs(30), ac3_ergodic),
        ("AC4", "identity suite", Duration::from_secs(30), ac4_identities),
        (
            "AC5",
            "process oracle vs Monte Carlo",
            Duration::from_secs(60),
            ac5_oracle_vs_mc,
        ),
        ("AC6", "per-replica linear bounds", Duration::from_secs(600), ac6_bounds),
        ("AC7", "linearity constant", Duration::from_secs(600), ac7_linearity),
        (
            "AC8",
            "concentration proxy",
            Duration::from_secs(600),
            ac8_concentration,
        ),
        ("AC9", "structural diagnostics", Duration::from_secs(600), ac9_structure),
        (
            "AC10",
            "logarithmic plate maximum",
            Duration::from_secs(600),
            ac10_log_growth,
        ),
        (
            "AC11",
            "engineering invariants",
            Duration::from_secs(600),
            ac11_engineering,
        ),
    ];
    let mut failures = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(d) if elapsed > budget => Err(format!("{d}; took {elapsed:?}, budget {budget:?}")),
            o => o,
        };
        match outcome {
            Ok(detail) => println!("[PASS] {id} {name} ({:.2}s): {detail}", elapsed.as_secs_f64()),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] {id} {name} ({:.2}s): {detail}", elapsed.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", 11 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
