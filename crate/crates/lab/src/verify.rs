//! Verification suite: exact identity checks, oracle cross-checks and
//! sampler-versus-oracle statistics, each reported as pass or fail.

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::One;
use olives_core::chain::{
    closed_form_with_constant, first_return_pmf_convolution, first_return_pmf_dp, mean_return_time_series,
    mean_return_time_stationary, printed_first_return_pmf, simulate_walk, stationary_distribution,
    verify_binomial_series, verify_catalan_convolution, verify_gould_identity, PRINTED_MEAN_RETURN_TIME,
};
use olives_core::exact::{
    enumerate_chain_paths, exact_expected_olives, exact_olive_distribution, exact_transition_check,
    labeled_olive_distribution, CanonicalState, MAX_PATH_HORIZON,
};
use olives_core::rational::{int, ratio, to_f64};
use olives_core::rng::{replica_seed, seeded};
use olives_core::{BigRational, TableState};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub level: Level,
    /// Leading constant of the closed form under test; 1 on a correct build.
    pub closed_form_constant: BigRational,
    pub seed: u64,
}

impl VerifyOptions {
    pub fn new(level: Level) -> Self {
        VerifyOptions {
            level,
            closed_form_constant: BigRational::one(),
            seed: 20_240_601,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

/// One row of the printed-versus-validated first-return table.
#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyRow {
    pub t: u64,
    pub validated: String,
    pub printed: String,
    pub ratio: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub level: Level,
    pub closed_form_constant: String,
    pub all_pass: bool,
    pub checks: Vec<CheckResult>,
    pub discrepancy: Vec<DiscrepancyRow>,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn timed(name: &'static str, f: impl FnOnce() -> (bool, String)) -> CheckResult {
    let start = Instant::now();
    let (pass, detail) = f();
    CheckResult {
        name,
        pass,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// DP, closed form with leading constant `k` and convolution sum agree
/// exactly for `1 <= t <= t_max` (the convolution from `t = 2`).
pub fn pmf_triple_agreement(t_max: u64, k: &BigRational) -> (bool, String) {
    let dp = first_return_pmf_dp(t_max);
    for t in 1..=t_max {
        let closed = closed_form_with_constant(t, k).expect("t >= 1");
        if dp.f(t) != closed {
            return (false, format!("dp {} != closed {} at t={t}", dp.f(t), closed));
        }
        if t >= 2 {
            let conv = first_return_pmf_convolution(t).expect("t >= 2");
            if conv != closed {
                return (false, format!("convolution {conv} != closed {closed} at t={t}"));
            }
        }
    }
    (true, format!("exact equality for t <= {t_max}"))
}

/// Brute-force path sums agree with the DP and the closed form.
pub fn path_enumeration_agreement(t_max: u64, k: &BigRational) -> (bool, String) {
    let paths = match enumerate_chain_paths(t_max) {
        Ok(p) => p,
        Err(e) => return (false, e.to_string()),
    };
    let dp = first_return_pmf_dp(t_max);
    for t in 1..=t_max {
        let closed = closed_form_with_constant(t, k).expect("t >= 1");
        if paths.f(t) != dp.f(t) || paths.f(t) != closed {
            return (
                false,
                format!("paths {} vs dp {} vs closed {closed} at t={t}", paths.f(t), dp.f(t)),
            );
        }
    }
    (true, format!("exact equality for t <= {t_max}"))
}

pub fn discrepancy_table(t_max: u64, k: &BigRational) -> Vec<DiscrepancyRow> {
    (2..=t_max)
        .map(|t| {
            let v = closed_form_with_constant(t, k).expect("t >= 2");
            let p = printed_first_return_pmf(t).expect("t >= 2");
            DiscrepancyRow {
                t,
                ratio: (&p / &v).to_string(),
                validated: v.to_string(),
                printed: p.to_string(),
            }
        })
        .collect()
}

/// The printed closed form is exactly 4 times the validated one.
pub fn printed_ratio_is_four(t_max: u64, k: &BigRational) -> (bool, String) {
    let rows = discrepancy_table(t_max, k);
    match rows.iter().find(|r| r.ratio != "4") {
        None => (true, format!("printed / validated = 4 for 2 <= t <= {t_max}")),
        Some(r) => (false, format!("ratio {} at t={}", r.ratio, r.t)),
    }
}

/// A series point with certified tail bound that brackets `1/pi_1`, and
/// the width of that bracket.
pub fn mean_return_agreement(t_max: u64) -> (bool, String) {
    let est = mean_return_time_series(t_max).expect("t_max >= 2");
    let stationary = mean_return_time_stationary();
    let width = to_f64(&est.tail_bound);
    let pass = est.contains(&stationary) && width < 1e-15;
    (
        pass,
        format!(
            "1/pi_1 = {stationary}; series in [{:.17}, {:.17}] (width {width:.3e}); printed value {PRINTED_MEAN_RETURN_TIME}",
            to_f64(&est.value),
            to_f64(&est.upper())
        ),
    )
}

/// Labeled-plate tree and lumped pushforward give the same olive law.
pub fn lumping_soundness(t_max: u64) -> (bool, String) {
    for t in 0..=t_max {
        let labeled = labeled_olive_distribution(t);
        let lumped = exact_olive_distribution(t);
        match (labeled, lumped) {
            (Ok(a), Ok(b)) if a == b => {}
            (Ok(_), Ok(_)) => return (false, format!("laws differ at t={t}")),
            (Err(e), _) | (_, Err(e)) => return (false, e.to_string()),
        }
    }
    (true, format!("identical olive pmf for t <= {t_max}"))
}

/// `E(O_t)` is nondecreasing for `t <= t_max`, with `E(O_2) = 1/2` and
/// `E(O_3) = 3/4`.
pub fn expected_olives_monotone(t_max: u64) -> (bool, String) {
    let mut prev = int(0);
    let mut means = Vec::new();
    for t in 1..=t_max {
        let m = match exact_expected_olives(t) {
            Ok(m) => m,
            Err(e) => return (false, e.to_string()),
        };
        if m < prev {
            return (false, format!("E(O_{t}) = {m} < E(O_{}) = {prev}", t - 1));
        }
        prev = m.clone();
        means.push(m);
    }
    let anchors = means.len() >= 3 && means[1] == ratio(1, 2) && means[2] == ratio(3, 4);
    (
        anchors,
        format!(
            "nondecreasing for t <= {t_max}; E(O_2) = {}, E(O_3) = {}",
            means[1], means[2]
        ),
    )
}

/// A reproducible set of reachable table states.
pub fn probe_states(count: usize, seed: u64) -> Vec<TableState> {
    let mut rng = seeded(seed);
    let mut out = vec![TableState::new(), TableState::with_plates(&[0, 0])];
    while out.len() < count {
        let mut s = TableState::new();
        let steps = rng.random_range(1..80u64);
        for _ in 0..steps {
            s.step_with(&mut rng);
        }
        out.push(s);
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct TransitionCellMiss {
    pub state: usize,
    pub successor: String,
    pub expected: f64,
    pub observed: f64,
    pub z: f64,
}

/// Sampler frequencies against the exact one-step law from every probe
/// state; every successor must be within `z_max` binomial standard errors
/// and the sampler must never reach a successor the law excludes.
pub fn transition_law_check(states: &[TableState], draws: u64, seed: u64, z_max: f64) -> (bool, String) {
    let mut worst = 0.0f64;
    let mut misses: Vec<TransitionCellMiss> = Vec::new();
    let mut cells = 0usize;
    for (i, s) in states.iter().enumerate() {
        let law = exact_transition_check(s);
        let mut counts: BTreeMap<CanonicalState, u64> = BTreeMap::new();
        let mut rng = seeded(replica_seed(seed, i as u64));
        for _ in 0..draws {
            let mut next = s.clone();
            next.step_with(&mut rng);
            *counts.entry(CanonicalState::from_table(&next)).or_insert(0) += 1;
        }
        if let Some(stray) = counts.keys().find(|k| !law.contains_key(k)) {
            return (
                false,
                format!("state {i}: sampler reached {stray:?}, which has probability 0"),
            );
        }
        for (succ, p) in &law {
            cells += 1;
            let p = to_f64(p);
            let observed = *counts.get(succ).unwrap_or(&0) as f64 / draws as f64;
            let se = (p * (1.0 - p) / draws as f64).sqrt();
            let z = if se > 0.0 {
                (observed - p) / se
            } else if observed == p {
                0.0
            } else {
                f64::INFINITY
            };
            worst = worst.max(z.abs());
            if z.abs() > z_max {
                misses.push(TransitionCellMiss {
                    state: i,
                    successor: format!("{succ:?}"),
                    expected: p,
                    observed,
                    z,
                });
            }
        }
    }
    let pass = misses.is_empty();
    let mut detail = format!(
        "{} states, {cells} successor cells, {draws} draws each, max |z| = {worst:.2}",
        states.len()
    );
    if let Some(m) = misses.first() {
        detail.push_str(&format!("; first miss: {m:?}"));
    }
    (pass, detail)
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleComparison {
    pub t: u64,
    pub replicas: u64,
    pub exact_mean: String,
    pub exact_mean_f64: f64,
    pub mc_mean: f64,
    pub se: f64,
    pub z: f64,
}

/// Fresh trajectories of length `t`; returns `(sum O, sum O^2)` in exact
/// integers, independent of scheduling.
fn olive_moments(t: u64, replicas: u64, seed: u64) -> (u128, u128) {
    (0..replicas)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded(replica_seed(seed, i));
            let mut s = TableState::new();
            for _ in 0..t {
                s.step_with(&mut rng);
            }
            let o = s.total_olives() as u128;
            (o, o * o)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

/// Monte Carlo mean of `O_t` against the exact oracle.
pub fn oracle_vs_mc(t: u64, replicas: u64, seed: u64) -> Result<OracleComparison, olives_core::DomainError> {
    let exact = exact_expected_olives(t)?;
    let (sum, sum_sq) = olive_moments(t, replicas, seed);
    let (mean, var) = crate::harness::intervals::mean_and_variance(replicas, sum, sum_sq);
    let se = (var / replicas as f64).sqrt();
    let e = to_f64(&exact);
    Ok(OracleComparison {
        t,
        replicas,
        exact_mean: exact.to_string(),
        exact_mean_f64: e,
        mc_mean: mean,
        se,
        z: (mean - e) / se,
    })
}

/// Long-run return rate of the walk against `1/pi_1` and the printed `1/19`.
pub fn walk_ergodic_check(steps: u64, seed: u64) -> (bool, String) {
    let run = simulate_walk(steps, seed, false);
    let rate = run.return_rate();
    let target = 1.0 / to_f64(&mean_return_time_stationary());
    let pass = (rate - target).abs() <= 0.005 && rate >= 1.0 / PRINTED_MEAN_RETURN_TIME as f64;
    (
        pass,
        format!(
            "N11/t = {rate:.6} over {steps} steps; 1/5 = {target}; N11/t >= 1/19: {}",
            rate >= 1.0 / 19.0
        ),
    )
}

pub fn run_verify(opts: &VerifyOptions) -> VerifyReport {
    let k = &opts.closed_form_constant;
    let full = opts.level == Level::Full;
    let mut checks = vec![
        timed("pmf triple agreement (t <= 30)", || pmf_triple_agreement(30, k)),
        timed("path enumeration (t <= 10)", || {
            path_enumeration_agreement(MAX_PATH_HORIZON, k)
        }),
        timed("printed closed form is 4x (t <= 30)", || printed_ratio_is_four(30, k)),
        timed("Catalan convolution (t <= 12)", || {
            let r = verify_catalan_convolution(2..=12);
            (r.passed(), format!("{} rows", r.rows.len()))
        }),
        timed("Gould identity (1 <= n < x <= 60)", || {
            let r = verify_gould_identity(2..=60, 1..=59);
            (r.passed(), format!("{} rows", r.rows.len()))
        }),
        timed(
            "binomial series at 3/4 (k_max = 200)",
            || match verify_binomial_series(&ratio(3, 4), 200, 1e-8) {
                Ok(r) => (
                    r.passed(),
                    format!(
                        "12-term error {:.3e}, 6-term error {:.3e}",
                        r.mean_weighted_term.error(),
                        r.mean_central_term.error()
                    ),
                ),
                Err(e) => (false, e.to_string()),
            },
        ),
        timed("mean return time: series brackets 1/pi_1", || {
            mean_return_agreement(200)
        }),
        timed("stationary balance", || {
            let d = stationary_distribution(60);
            (d.balance_holds(), format!("pi_1 = {}", d.get(1)))
        }),
        timed("lumping soundness (t <= 6)", || lumping_soundness(6)),
        timed("E(O_t) nondecreasing (t <= 14)", || expected_olives_monotone(14)),
        timed("sampler vs exact one-step law", || {
            let states = probe_states(24, opts.seed);
            transition_law_check(&states, if full { 100_000 } else { 20_000 }, opts.seed, 4.0)
        }),
    ];
    let (t, r) = if full { (12, 1_000_000) } else { (10, 200_000) };
    checks.push(timed("exact E(O_t) vs Monte Carlo", || {
        match oracle_vs_mc(t, r, opts.seed) {
            Ok(c) => (
                c.z.abs() <= 4.0,
                format!(
                    "t={t}, R={r}: exact {} ({:.6}), MC {:.6} +- {:.6}, z = {:.2}",
                    c.exact_mean, c.exact_mean_f64, c.mc_mean, c.se, c.z
                ),
            ),
            Err(e) => (false, e.to_string()),
        }
    }));
    if full {
        checks.push(timed("walk ergodic average (1e7 steps)", || {
            walk_ergodic_check(10_000_000, opts.seed)
        }));
    }
    VerifyReport {
        level: opts.level,
        closed_form_constant: k.to_string(),
        all_pass: checks.iter().all(|c| c.pass),
        checks,
        discrepancy: discrepancy_table(30, k),
    }
}
