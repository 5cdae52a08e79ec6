//! Scenario drivers. Each ε (or (ε, mode)) job runs on the worker pool and
//! results are merged in configuration order.

mod bounded;
mod periodic;
mod property;

pub use bounded::{run_damping, DampingRun};
pub use periodic::{run_periodic, PeriodicRun};
pub use property::property_suite;

use rayon::prelude::*;

use crate::config::{ExperimentConfig, Scenario};
use crate::error::{LabError, Result};
use crate::fit::fit_rate;
use crate::report::{last_over_first, strictly_decreasing, Check, NamedFit, Report, Table};

/// Thread pool with `workers` threads (all cores when `None`).
pub fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            return Err(LabError::config("--workers must be at least 1"));
        }
        b = b.num_threads(n);
    }
    b.build().map_err(|e| LabError::config(format!("cannot start worker pool: {e}")))
}

/// Validates `cfg`, runs its scenario and assembles the report.
pub fn run_scenario(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Report> {
    cfg.validate()?;
    let pool = pool(workers)?;
    pool.install(|| match cfg.scenario {
        Scenario::PeriodicLimit => periodic_limit(cfg, false),
        Scenario::FilteredOscillations => periodic_limit(cfg, true),
        Scenario::BoundedDamping => bounded::bounded_damping(cfg),
        Scenario::PropertySuite => Ok(property_suite()),
    })
}

/// Runs every ε in parallel and returns the results in list order.
fn per_eps<R: Send>(eps: &[f64], job: impl Fn(f64) -> Result<R> + Sync) -> Result<Vec<R>> {
    eps.par_iter().map(|&e| job(e)).collect::<Vec<_>>().into_iter().collect()
}

const METRIC_COLUMNS: [&str; 17] = [
    "eps",
    "pu_error",
    "qu_norm",
    "qu_pairing_max",
    "h_error",
    "rho_lgamma",
    "rho_l2",
    "product_defect",
    "product_bound",
    "product_ratio",
    "literal_excess",
    "balance_excess",
    "mass_drift",
    "max_div_h",
    "steps",
    "raw_quotient",
    "filtered_quotient",
];

const SERIES_COLUMNS: [&str; 12] =
    ["t", "E", "D", "cumD", "E_rel", "balance_excess", "mass", "divH", "pu_error", "qu_norm", "h_error", "rho_l2"];

fn periodic_limit(cfg: &ExperimentConfig, oscillations: bool) -> Result<Report> {
    let runs = per_eps(&cfg.eps_list, |e| run_periodic(cfg, e, oscillations))?;
    let mut metrics = Table::new("metrics", &METRIC_COLUMNS);
    let mut diagnostics = Vec::new();
    for (k, r) in runs.iter().enumerate() {
        let m = &r.metrics;
        let (raw, filt) = r.equicontinuity.map_or((f64::NAN, f64::NAN), |q| (q.raw, q.filtered));
        metrics.push(vec![
            r.eps,
            m.pu_error,
            m.qu_norm,
            m.qu_pairing_max(),
            m.h_error,
            m.rho_lgamma,
            m.rho_l2,
            m.product_defect,
            m.product_bound,
            m.product_ratio(),
            r.literal_excess,
            r.balance_excess,
            r.mass_drift,
            r.max_div_h,
            r.steps as f64,
            raw,
            filt,
        ]);
        let mut t = Table::new(format!("diagnostics_eps{k}"), &SERIES_COLUMNS);
        for (rec, s) in &r.series {
            let e = &rec.energy;
            t.push(vec![
                e.time,
                e.e,
                e.d,
                e.cumulative_d,
                e.e_rel,
                e.balance_excess(),
                rec.mass,
                rec.div_h,
                s.pu_error,
                s.qu_norm,
                s.h_error,
                s.rho_l2,
            ]);
        }
        diagnostics.push(t);
    }
    let mut checks = energy_checks(&runs);
    let mut fits = Vec::new();
    if oscillations {
        oscillation_checks(&runs, &mut checks);
    } else {
        limit_checks(&runs, &mut checks, &mut fits)?;
    }
    let scenario = if oscillations { Scenario::FilteredOscillations } else { Scenario::PeriodicLimit };
    Ok(Report { scenario: scenario.name().into(), eps_list: cfg.eps_list.clone(), metrics, diagnostics, fits, checks })
}

/// Energy inequality, mass and div H on every run.
fn energy_checks(runs: &[PeriodicRun]) -> Vec<Check> {
    let worst = |f: fn(&PeriodicRun) -> f64| runs.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    let lit = worst(|r| r.literal_excess);
    let bal = worst(|r| r.balance_excess);
    let mass = worst(|r| r.mass_drift);
    let div = worst(|r| r.max_div_h);
    vec![
        // the displayed functional halves the potential, so it is not dissipated exactly
        Check::advisory("energy inequality (displayed energy)", lit, "≤ 1e-4", lit <= 1e-4),
        Check::target("energy inequality (relative energy)", bal, "≤ 1e-4", bal <= 1e-4),
        Check::target("mass drift", mass, "≤ 1e-12", mass <= 1e-12),
        Check::target("div H", div, "≤ 1e-10", div <= 1e-10),
    ]
}

fn limit_checks(runs: &[PeriodicRun], checks: &mut Vec<Check>, fits: &mut Vec<NamedFit>) -> Result<()> {
    let eps: Vec<f64> = runs.iter().map(|r| r.eps).collect();
    let series: [(&str, Vec<f64>); 4] = [
        ("pu_error", runs.iter().map(|r| r.metrics.pu_error).collect()),
        ("h_error", runs.iter().map(|r| r.metrics.h_error).collect()),
        ("rho_l2", runs.iter().map(|r| r.metrics.rho_l2).collect()),
        ("rho_lgamma", runs.iter().map(|r| r.metrics.rho_lgamma).collect()),
    ];
    if runs.len() >= 2 {
        for (name, v) in &series {
            let ratio = last_over_first(v);
            checks.push(Check::target(
                format!("{name} strictly decreasing"),
                ratio,
                "monotone",
                strictly_decreasing(v),
            ));
        }
        for (name, v) in &series[..3] {
            let ratio = last_over_first(v);
            checks.push(Check::target(format!("{name} last/first"), ratio, "≤ 1/3", ratio <= 1.0 / 3.0));
        }
        let qu: Vec<f64> = runs.iter().map(|r| r.metrics.qu_norm).collect();
        checks.push(Check::advisory(
            "qu_norm strictly decreasing",
            last_over_first(&qu),
            "monotone",
            strictly_decreasing(&qu),
        ));
    }
    let ratios: Vec<f64> = runs.iter().map(|r| r.metrics.product_ratio()).collect();
    let worst = ratios.iter().fold(0.0f64, |m, &v| m.max(v));
    checks.push(Check::advisory("product defect / bound", worst, "≤ 1 (C = 1)", worst <= 1.0));
    if runs.len() >= 2 {
        let growth = last_over_first(&ratios);
        checks.push(Check::advisory("product constant growth", growth, "≤ 2", !(growth > 2.0)));
    }
    if runs.len() >= 3 {
        for (name, v) in &series {
            if v.iter().all(|x| *x > 0.0) {
                fits.push(NamedFit { name: name.to_string(), fit: fit_rate(&eps, v)? });
            }
        }
        if let Some(f) = fits.iter().find(|f| f.name == "rho_l2") {
            checks.push(Check::target("rho_l2 slope", f.fit.slope, "≥ 0.75", f.fit.slope >= 0.75));
        }
    }
    Ok(())
}

/// Raw quotients grow like 1/ε, filtered ones stay bounded, and the weak
/// pairings of Qu vanish.
fn oscillation_checks(runs: &[PeriodicRun], checks: &mut Vec<Check>) {
    let quot: Vec<_> = runs.iter().filter_map(|r| r.equicontinuity.map(|q| (r.eps, q))).collect();
    if quot.len() < 2 {
        return;
    }
    let mut raw_growth = f64::INFINITY;
    let mut filt_lo = f64::INFINITY;
    let mut filt_hi = 0.0f64;
    for w in quot.windows(2) {
        // growth per halving of ε
        let halvings = (w[0].0 / w[1].0).log2();
        raw_growth = raw_growth.min((w[1].1.raw / w[0].1.raw).powf(1.0 / halvings));
        let f = (w[1].1.filtered / w[0].1.filtered).powf(1.0 / halvings);
        filt_lo = filt_lo.min(f);
        filt_hi = filt_hi.max(f);
    }
    checks.push(Check::target("raw quotient growth per halving", raw_growth, "≥ 1.8", raw_growth >= 1.8));
    checks.push(Check::target("filtered quotient ratio (min)", filt_lo, "≥ 0.5", filt_lo >= 0.5));
    checks.push(Check::target("filtered quotient ratio (max)", filt_hi, "≤ 2", filt_hi <= 2.0));
    let pairings: Vec<f64> = runs.iter().map(|r| r.metrics.qu_pairing_max()).collect();
    let ratio = last_over_first(&pairings);
    checks.push(Check::target("Qu weak pairing last/first", ratio, "≤ 1/2", ratio <= 0.5));
    checks.push(Check::advisory("Qu weak pairing decreasing", ratio, "monotone", strictly_decreasing(&pairings)));
}
