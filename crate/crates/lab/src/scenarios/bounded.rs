//! Boundary-layer damping of channel modes cos(mx)/π.

use lowmach_core::bounded::{
    fit_decay_rate, interior_decay_rate, mode_amplitudes, neumann_modes, predicted_damping, predicted_decay_rate,
    simulate_linear_waves, Geometry, ModeClass, NeumannMode, WaveParams, WaveState,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};
use crate::report::{strictly_decreasing, Check, Report, Table};

/// Decay of one driven mode at one ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DampingRun {
    pub eps: f64,
    pub m: usize,
    pub wall_nodes: usize,
    pub t_final: f64,
    /// Fitted decay rate r of |b⁺(t)|.
    pub rate: f64,
    /// −Re iλ₁ as stated, without the wave coefficient.
    pub literal: f64,
    /// −Re iλ₁ scaled by b^{1/4}.
    pub b_scaled: f64,
    /// Bulk viscous rate (μ + λ)λ²/2.
    pub interior: f64,
    pub beta_defect: f64,
}

impl DampingRun {
    pub fn scaled_rate(&self) -> f64 {
        self.rate * self.eps.sqrt()
    }

    /// r√ε with the bulk rate removed.
    pub fn corrected(&self) -> f64 {
        (self.rate - self.interior) * self.eps.sqrt()
    }

    pub fn literal_error(&self) -> f64 {
        (self.scaled_rate() - self.literal).abs() / self.literal
    }

    pub fn corrected_error(&self) -> f64 {
        (self.corrected() - self.b_scaled).abs() / self.b_scaled
    }
}

fn channel_mode(modes: &[NeumannMode], m: usize) -> Result<NeumannMode> {
    let label = format!("c({m},0)");
    modes
        .iter()
        .find(|k| k.label == label)
        .cloned()
        .ok_or_else(|| LabError::config(format!("mode {label} not in the catalog")))
}

/// Starts from the "+" eigenvector of cos(mx)/π and fits the decay of |b⁺|
/// over the last 80% of the run.
pub fn run_damping(cfg: &ExperimentConfig, eps: f64, m: usize) -> Result<DampingRun> {
    let f = &cfg.fluid;
    let b = f.wave_coefficient();
    let bc = &cfg.bounded;
    let wall_nodes = bc.wall_nodes.unwrap_or_else(|| Geometry::required_wall_nodes(eps, f.mu));
    let g = Geometry::channel(wall_nodes, bc.periodic_points);
    let grid = g.grid();
    let mode = channel_mode(&neumann_modes(&g, m)?, m)?;
    let literal = -predicted_damping(&mode, f.mu, 1.0).re;
    let b_scaled = predicted_decay_rate(&mode, f.mu, b);
    let interior = interior_decay_rate(&mode, f.mu, f.lam);
    let t_final = match bc.e_foldings {
        Some(n) => n / (b_scaled / eps.sqrt() + interior),
        None => cfg.t_final,
    };
    let params = WaveParams { eps, mu: f.mu, lam: f.lam, b };
    let init = WaveState::eigen(&grid, &mode, 1.0, b);
    let trace = simulate_linear_waves(&grid, params, &init, t_final, t_final / bc.samples as f64, 1)?;
    let mt = &mode_amplitudes(&grid, &trace.states, std::slice::from_ref(&mode), b)[0];
    let rate = fit_decay_rate(&mt.times, &mt.abs_plus(), 0.2 * t_final)?;
    Ok(DampingRun {
        eps,
        m,
        wall_nodes,
        t_final,
        rate,
        literal,
        b_scaled,
        interior,
        beta_defect: mt.beta_identity_defect(),
    })
}

/// r√ε = c₀ + c₁√ε + …: two-point estimate of c₀ from the raw rates.
pub fn extrapolate(a: &DampingRun, b: &DampingRun) -> f64 {
    let (sa, sb) = (a.eps.sqrt(), b.eps.sqrt());
    let (ya, yb) = (a.scaled_rate(), b.scaled_rate());
    yb - (ya - yb) / (sa - sb) * sb
}

pub(super) fn bounded_damping(cfg: &ExperimentConfig) -> Result<Report> {
    let jobs: Vec<(usize, f64)> =
        cfg.bounded.modes.iter().flat_map(|&m| cfg.eps_list.iter().map(move |&e| (m, e))).collect();
    let runs: Vec<DampingRun> =
        jobs.par_iter().map(|&(m, e)| run_damping(cfg, e, m)).collect::<Vec<_>>().into_iter().collect::<Result<_>>()?;

    let mut metrics = Table::new(
        "metrics",
        &[
            "eps",
            "m",
            "wall_nodes",
            "t_final",
            "rate",
            "rate_sqrt_eps",
            "literal_target",
            "literal_error",
            "b_scaled_target",
            "interior_rate",
            "corrected_sqrt_eps",
            "corrected_error",
            "beta_defect",
        ],
    );
    for r in &runs {
        metrics.push(vec![
            r.eps,
            r.m as f64,
            r.wall_nodes as f64,
            r.t_final,
            r.rate,
            r.scaled_rate(),
            r.literal,
            r.literal_error(),
            r.b_scaled,
            r.interior,
            r.corrected(),
            r.corrected_error(),
            r.beta_defect,
        ]);
    }

    let mut checks = Vec::new();
    for &m in &cfg.bounded.modes {
        let rs: Vec<&DampingRun> = runs.iter().filter(|r| r.m == m).collect();
        let last = rs[rs.len() - 1];
        let errs: Vec<f64> = rs.iter().map(|r| r.literal_error()).collect();
        let e = last.literal_error();
        checks.push(Check::target(format!("m={m} damping error at smallest eps"), e, "≤ 0.15", e <= 0.15));
        if rs.len() >= 2 {
            let improving = strictly_decreasing(&errs);
            checks.push(Check::target(format!("m={m} damping error improving"), errs[0] - e, "monotone", improving));
            let c0 = extrapolate(rs[rs.len() - 2], last);
            let x = (c0 - last.b_scaled).abs() / last.b_scaled;
            checks.push(Check::advisory(format!("m={m} extrapolated constant vs b-scaled"), x, "≤ 0.05", x <= 0.05));
        }
        let c = last.corrected_error();
        checks.push(Check::advisory(format!("m={m} corrected rate vs b-scaled"), c, "≤ 0.15", c <= 0.15));
    }

    // the classifier agrees with a vanishing predicted rate on the whole catalog
    let top = cfg.bounded.modes.iter().copied().max().unwrap_or(1).max(4);
    let g = Geometry::channel(16, 2 * top + 2);
    let modes = neumann_modes(&g, top)?;
    let disagree = modes
        .iter()
        .filter(|k| (k.class == ModeClass::J) != (predicted_damping(k, cfg.fluid.mu, 1.0).re == 0.0))
        .count();
    checks.push(Check::target(
        "classification vs predicted damping",
        disagree as f64,
        "0 disagreements",
        disagree == 0,
    ));
    let beta = runs.iter().map(|r| r.beta_defect).fold(0.0, f64::max);
    checks.push(Check::advisory("beta identity defect", beta, "≤ 1e-10", beta <= 1e-10));

    Ok(Report {
        scenario: cfg.scenario.name().into(),
        eps_list: cfg.eps_list.clone(),
        metrics,
        diagnostics: Vec::new(),
        fits: Vec::new(),
        checks,
    })
}
