//! Torus runs at one ε: compressible solver and incompressible limit in lockstep.

use lowmach_core::compressible::{simulate_with, step_count, suggest_dt, well_prepared_init, TraceRecord};
use lowmach_core::incompressible::{step_inc, IncompressibleState};
use lowmach_core::spectral::Grid;
use serde::Serialize;

use crate::config::{DtPolicy, ExperimentConfig};
use crate::error::{LabError, Result};
use crate::metrics::{EquicontinuityAccumulator, EquicontinuityReport, MetricAccumulator, MetricRecord, MetricSample};

/// Everything measured in one run.
#[derive(Debug, Clone, Serialize)]
pub struct PeriodicRun {
    pub eps: f64,
    pub dt: f64,
    pub steps: usize,
    pub metrics: MetricRecord,
    pub equicontinuity: Option<EquicontinuityReport>,
    /// Largest (E(t) + ∫D)/E(0) − 1 for the displayed energy.
    pub literal_excess: f64,
    /// Largest (E_rel(t) + ∫D)/E_rel(0) − 1.
    pub balance_excess: f64,
    pub mass_drift: f64,
    pub max_div_h: f64,
    pub series: Vec<(TraceRecord, MetricSample)>,
}

/// Step size and output stride: `outputs` equal intervals of [0, T], each
/// split into whole steps no longer than the policy's step.
fn time_grid(cfg: &ExperimentConfig, outputs: usize, suggested: f64) -> Result<(usize, usize, f64)> {
    let target = match cfg.dt {
        DtPolicy::Fixed { dt } => dt,
        DtPolicy::Cfl { safety } => safety * suggested,
    };
    let interval = cfg.t_final / outputs as f64;
    let stride = ((interval / target) - 1e-9).ceil().max(1.0) as usize;
    let (n, dt) = step_count(cfg.t_final, interval / stride as f64)?;
    if n != outputs * stride {
        return Err(LabError::Mismatch(format!("{n} steps do not split into {outputs} outputs")));
    }
    Ok((n, stride, dt))
}

/// Runs the compressible system at `eps` next to the incompressible limit
/// started from the projected data; with `oscillations` the outputs are
/// spaced by `sampling_fraction`·ε and the filtered quotients are measured.
pub fn run_periodic(cfg: &ExperimentConfig, eps: f64, oscillations: bool) -> Result<PeriodicRun> {
    let grid = Grid::new(cfg.grid.spec())?;
    let p = cfg.fluid.params(eps, cfg.grid.dim);
    let init = well_prepared_init(&grid, &p, &cfg.profile()?)?;
    let outputs = if oscillations {
        (cfg.t_final / (cfg.sampling_fraction * eps) - 1e-9).ceil().max(1.0) as usize
    } else {
        cfg.outputs
    };
    let (steps, stride, dt) = time_grid(cfg, outputs, suggest_dt(&init))?;

    let mut inc = IncompressibleState::new(init.u.clone(), init.h.clone(), 0.0)?;
    let mut acc = MetricAccumulator::new(&grid, &p, 0.0, cfg.t_final);
    let mut equi = if oscillations { Some(EquicontinuityAccumulator::new(&p, init.rho_bar())?) } else { None };
    let mut series = Vec::with_capacity(outputs + 1);
    let mut failure: Option<LabError> = None;
    let mass0 = init.rho.mean();
    let observe = |s: &lowmach_core::compressible::CompressibleState<f64>, r: &TraceRecord| {
        if failure.is_some() {
            return;
        }
        let mut go = || -> Result<()> {
            if s.time > 0.0 {
                for _ in 0..stride {
                    inc = step_inc(&inc, p.mu, p.nu, dt)?;
                }
            }
            let sample = acc.push(s, &inc)?;
            if let Some(e) = equi.as_mut() {
                e.push(s)?;
            }
            series.push((*r, sample));
            Ok(())
        };
        if let Err(e) = go() {
            failure = Some(e);
        }
    };
    simulate_with(&init, &p, cfg.t_final, dt, stride, observe).map_err(|e| LabError::Numerical(e.error.clone()))?;
    if let Some(e) = failure {
        return Err(e);
    }
    let fold = |f: fn(&TraceRecord) -> f64| series.iter().map(|(r, _)| f(r)).fold(f64::NEG_INFINITY, f64::max);
    Ok(PeriodicRun {
        eps,
        dt,
        steps,
        metrics: acc.finish()?,
        equicontinuity: equi.map(|e| e.finish()).transpose()?,
        literal_excess: fold(|r| r.energy.literal_excess()),
        balance_excess: fold(|r| r.energy.balance_excess()),
        mass_drift: series.iter().map(|(r, _)| (r.mass - mass0).abs()).fold(0.0, f64::max),
        max_div_h: fold(|r| r.div_h),
        series,
    })
}
