//! Oracle checks for the isolated building blocks, as run by `exactcount check`.

use std::fmt;

use clap::ValueEnum;
use exactcount_core::primitives::{
    averaging_isolated_run, birthday_collision_exact, birthday_collision_monte_carlo, birthday_no_collision_bound,
    epidemic_expected_interactions_exact, epidemic_run, phase_clock_run, rounding_check, rounding_counterexample,
    PhaseClockParams,
};
use exactcount_core::stats::{fraction, mean, std_error};
use exactcount_core::{derive_seed, RandomSource};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Epidemic,
    PhaseClock,
    Rounding,
    Averaging,
    Birthday,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

fn result(name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed,
        detail,
    }
}

/// Runs `trials` independent samples in parallel, each with its own stream.
fn sample<T: Send>(seed: u64, tag: u64, trials: u64, f: impl Fn(&mut RandomSource) -> T + Sync) -> Vec<T> {
    (0..trials)
        .into_par_iter()
        .map(|t| f(&mut RandomSource::new(derive_seed(seed, &[tag, t]))))
        .collect()
}

pub fn epidemic(seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for n in [2u32, 3, 4, 8, 16] {
        let xs: Vec<f64> = sample(seed, n as u64, 10_000, |src| epidemic_run(n, src) as f64);
        let exact = epidemic_expected_interactions_exact(n as u64).to_f64().unwrap();
        let (m, se) = (mean(&xs), std_error(&xs));
        out.push(result(
            &format!("epidemic exact n={n}"),
            (m - exact).abs() <= 3.0 * se,
            format!("mean {m:.3} vs exact {exact:.3} (3 SE = {:.3})", 3.0 * se),
        ));
    }
    for n in [100u32, 1000, 10_000] {
        let xs: Vec<f64> = sample(seed, n as u64, 1000, |src| epidemic_run(n, src) as f64 / n as f64);
        let (m, bound) = (mean(&xs), 4.0 * (n as f64).ln());
        out.push(result(
            &format!("epidemic bound n={n}"),
            m <= bound,
            format!("mean parallel time {m:.3} <= 4 ln n = {bound:.3}"),
        ));
    }
    out
}

pub fn phase_clock(seed: u64) -> Vec<CheckResult> {
    let n = 1000u32;
    let params = PhaseClockParams::default();
    let ln = (n as f64).ln();
    let (lo, hi) = (params.beta_l * ln, params.beta_u() * ln);
    let xs: Vec<f64> = sample(seed, 0xc10c, 200, |src| {
        phase_clock_run(n, &params, src) as f64 / n as f64
    });
    let inside = fraction(&xs, |t| (lo..=hi).contains(&t));
    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    vec![
        result(
            "phase clock window",
            inside >= 0.95,
            format!("{:.1}% of 200 runs in [{lo:.0}, {hi:.0}]", inside * 100.0),
        ),
        result(
            "phase clock lower bound",
            min >= lo,
            format!("fastest run {min:.1} >= {lo:.1}"),
        ),
    ]
}

pub fn rounding() -> Vec<CheckResult> {
    let ce = rounding_counterexample(200, 0, 2);
    vec![
        result("rounding c=0", rounding_check(200, 0), "every n <= 200".into()),
        result("rounding c=1", rounding_check(200, 1), "every n <= 200".into()),
        result(
            "rounding needs factor 3",
            ce.is_some(),
            match ce {
                Some((n, m, x)) => format!("M = 2n^2 fails at n={n}, M={m}, ave={x}"),
                None => "no counterexample with M = 2n^2".into(),
            },
        ),
    ]
}

pub fn averaging(seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for n in [10u32, 100, 1000] {
        let m = 3 * (n as u128).pow(3);
        let bound = (4.0 * (m as f64).powi(2)).ln();
        let runs: Vec<(bool, f64)> = sample(seed, n as u64, 200, |src| {
            let r = averaging_isolated_run(n, m, src).expect("3n^3 fits");
            (r.sum_conserved() && r.phi_nonincreasing(), r.close_parallel_time())
        });
        let invariants = runs.iter().all(|r| r.0);
        let times: Vec<f64> = runs.iter().map(|r| r.1).collect();
        let ok = fraction(&times, |t| t <= bound);
        out.push(result(
            &format!("averaging n={n}"),
            invariants && ok >= 0.95,
            format!(
                "sum/potential invariants {}; {:.1}% within {bound:.1} parallel time",
                if invariants { "hold" } else { "VIOLATED" },
                ok * 100.0
            ),
        ));
    }
    out
}

pub fn birthday(seed: u64) -> Vec<CheckResult> {
    let mut src = RandomSource::new(derive_seed(seed, &[0xb1d]));
    let (n, len) = (100u64, 20u32);
    let bound = birthday_no_collision_bound(n, len);
    let exact = birthday_collision_exact(n, len);
    let mc = birthday_collision_monte_carlo(n, len, 200_000, &mut src);
    // 3σ for a binomial proportion near `exact`
    let tol = 3.0 * (exact * (1.0 - exact) / 200_000.0).sqrt();
    vec![
        result(
            "birthday exact below bound",
            exact <= bound,
            format!("P(collision) {exact:.6} <= n(n-1)/2^(L+1) = {bound:.6}"),
        ),
        result(
            "birthday monte carlo",
            (mc - exact).abs() <= tol,
            format!("sampled {mc:.6} vs exact {exact:.6} (3 SE = {tol:.6})"),
        ),
    ]
}

pub fn run_checks(kind: CheckKind, seed: u64) -> Vec<CheckResult> {
    match kind {
        CheckKind::Epidemic => epidemic(seed),
        CheckKind::PhaseClock => phase_clock(seed),
        CheckKind::Rounding => rounding(),
        CheckKind::Averaging => averaging(seed),
        CheckKind::Birthday => birthday(seed),
        CheckKind::All => [
            epidemic(seed),
            phase_clock(seed),
            rounding(),
            averaging(seed),
            birthday(seed),
        ]
        .concat(),
    }
}
