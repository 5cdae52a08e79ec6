//! Convergence metrics of compressible runs against their incompressible limit.

use std::sync::Arc;

use lowmach_core::acoustic::{filter, pair_norm, AcousticPair, GroupParams};
use lowmach_core::compressible::{CompressibleState, FluidParams};
use lowmach_core::incompressible::{IncompressibleState, TimeWindow};
use lowmach_core::spectral::{
    gradient, gradient_part, lq_norm, lq_norm_vector, solenoidal_part, Grid, ScalarField, VectorField,
};
use serde::Serialize;

use crate::error::{LabError, Result};

/// Relative tolerance on matching output times.
const TIME_TOL: f64 = 1e-9;

/// Negative Sobolev order of the equicontinuity norm.
pub const NEGATIVE_ORDER: f64 = 2.0;

/// Gradient test field ∇χ with a time window. The weak pairings of Qu are
/// taken against gradients: a solenoidal test field pairs with Qu to zero.
#[derive(Debug, Clone)]
pub struct GradientTest {
    pub field: VectorField<f64>,
    pub window: TimeWindow,
}

/// Three trigonometric potentials times two windows.
pub fn gradient_test_bank(grid: &Arc<Grid<f64>>) -> Vec<GradientTest> {
    let potentials: [fn([f64; 3]) -> f64; 3] = [
        |x| (x[0] + x[1]).sin(),
        |x| (2.0 * x[0]).cos() * x[1].sin(),
        |x| (x[0] - 2.0 * x[1]).cos() + 0.5 * x[1].sin(),
    ];
    let windows = [TimeWindow::CosSquared, TimeWindow::Polynomial { power: 3 }];
    potentials
        .iter()
        .flat_map(|&chi| {
            let field = gradient(&ScalarField::from_fn(grid, &chi));
            windows.iter().map(move |&window| GradientTest { field: field.clone(), window })
        })
        .collect()
}

/// Trapezoid rule on possibly non-uniform times.
pub fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    times.windows(2).zip(values.windows(2)).map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1])).sum()
}

/// Per-ε convergence metrics over one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricRecord {
    pub eps: f64,
    /// ‖Pu_ε − u‖ in L²(0,T; L²).
    pub pu_error: f64,
    /// ‖Qu_ε‖ in L²(0,T; L²).
    pub qu_norm: f64,
    /// |∫∫ψ Qu_ε·∇χ| for every entry of the gradient bank.
    pub qu_pairings: Vec<f64>,
    /// ‖H_ε − H‖ in L²(0,T; L²).
    pub h_error: f64,
    /// sup_t ‖ρ_ε − 1‖ in L^γ.
    pub rho_lgamma: f64,
    /// sup_t ‖ρ_ε − 1‖ in L².
    pub rho_l2: f64,
    /// |∫∫(|Pu_ε|² − P(ρ_εu_ε)·Pu_ε)|.
    pub product_defect: f64,
    /// sup_t‖ρ_ε − 1‖_{L^γ} ‖u_ε‖²_{L²(0,T; L^s)}, s = 2γ/(γ−1).
    pub product_bound: f64,
}

impl MetricRecord {
    pub fn qu_pairing_max(&self) -> f64 {
        self.qu_pairings.iter().fold(0.0, |m, &v| m.max(v))
    }

    /// Empirical constant of the product-defect inequality; 0 when both sides vanish.
    pub fn product_ratio(&self) -> f64 {
        if self.product_bound > 0.0 {
            self.product_defect / self.product_bound
        } else if self.product_defect == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Streaming form of [`metric_suite`]: push matching output pairs in time
/// order, then [`finish`](Self::finish).
#[derive(Debug)]
pub struct MetricAccumulator {
    eps: f64,
    gamma: f64,
    t0: f64,
    horizon: f64,
    bank: Vec<GradientTest>,
    times: Vec<f64>,
    pu_sq: Vec<f64>,
    qu_sq: Vec<f64>,
    h_sq: Vec<f64>,
    product: Vec<f64>,
    u_ls_sq: Vec<f64>,
    pairings: Vec<Vec<f64>>,
    rho_lgamma: f64,
    rho_l2: f64,
}

/// Per-output values behind a [`MetricRecord`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricSample {
    pub time: f64,
    pub pu_error: f64,
    pub qu_norm: f64,
    pub h_error: f64,
    pub rho_l2: f64,
}

impl MetricAccumulator {
    /// `horizon` is the length of the time window the test windows vanish at.
    pub fn new(grid: &Arc<Grid<f64>>, p: &FluidParams, t0: f64, horizon: f64) -> Self {
        let bank = gradient_test_bank(grid);
        let pairings = vec![Vec::new(); bank.len()];
        Self {
            eps: p.eps,
            gamma: p.gamma,
            t0,
            horizon,
            bank,
            times: Vec::new(),
            pu_sq: Vec::new(),
            qu_sq: Vec::new(),
            h_sq: Vec::new(),
            product: Vec::new(),
            u_ls_sq: Vec::new(),
            pairings,
            rho_lgamma: 0.0,
            rho_l2: 0.0,
        }
    }

    pub fn push(&mut self, c: &CompressibleState<f64>, i: &IncompressibleState<f64>) -> Result<MetricSample> {
        if (c.time - i.time).abs() > TIME_TOL * (1.0 + c.time.abs()) {
            return Err(LabError::Mismatch(format!("output times {} vs {}", c.time, i.time)));
        }
        if c.grid().spec() != i.grid().spec() || self.bank[0].field.grid().spec() != c.grid().spec() {
            return Err(LabError::Mismatch("traces live on different grids".into()));
        }
        if matches!(self.times.last(), Some(&t) if !(c.time > t)) {
            return Err(LabError::Mismatch("output times must increase".into()));
        }
        let pu = solenoidal_part(&c.u);
        let qu = c.u.sub(&pu)?;
        let dpu = pu.sub(&i.u)?;
        let dh = c.h.sub(&i.h)?;
        let fluct = c.rho.shift(-1.0);
        let sample = MetricSample {
            time: c.time,
            pu_error: dpu.l2_norm(),
            qu_norm: qu.l2_norm(),
            h_error: dh.l2_norm(),
            rho_l2: lq_norm(&fluct, 2.0),
        };
        self.times.push(c.time);
        self.pu_sq.push(sample.pu_error.powi(2));
        self.qu_sq.push(sample.qu_norm.powi(2));
        self.h_sq.push(sample.h_error.powi(2));
        self.rho_lgamma = self.rho_lgamma.max(lq_norm(&fluct, self.gamma));
        self.rho_l2 = self.rho_l2.max(sample.rho_l2);
        let p_rho_u = solenoidal_part(&c.momentum());
        self.product.push(pu.dot(&pu)? - p_rho_u.dot(&pu)?);
        let s_exp = 2.0 * self.gamma / (self.gamma - 1.0);
        self.u_ls_sq.push(lq_norm_vector(&c.u, s_exp).powi(2));
        for (row, test) in self.pairings.iter_mut().zip(&self.bank) {
            let w = test.window.value(c.time - self.t0, self.horizon);
            row.push(w * qu.dot(&test.field)?);
        }
        Ok(sample)
    }

    pub fn finish(self) -> Result<MetricRecord> {
        if self.times.len() < 2 {
            return Err(LabError::Mismatch("traces need at least two outputs".into()));
        }
        let t = &self.times;
        let l2t = |v: &[f64]| trapezoid(t, v).max(0.0).sqrt();
        Ok(MetricRecord {
            eps: self.eps,
            pu_error: l2t(&self.pu_sq),
            qu_norm: l2t(&self.qu_sq),
            qu_pairings: self.pairings.iter().map(|r| trapezoid(t, r).abs()).collect(),
            h_error: l2t(&self.h_sq),
            rho_lgamma: self.rho_lgamma,
            rho_l2: self.rho_l2,
            product_defect: trapezoid(t, &self.product).abs(),
            product_bound: self.rho_lgamma * trapezoid(t, &self.u_ls_sq),
        })
    }
}

/// Compares a compressible trace with the incompressible trace on the same
/// grid and output times.
pub fn metric_suite(
    compr: &[CompressibleState<f64>],
    inc: &[IncompressibleState<f64>],
    p: &FluidParams,
) -> Result<MetricRecord> {
    if compr.len() != inc.len() {
        return Err(LabError::Mismatch(format!(
            "{} compressible vs {} incompressible outputs",
            compr.len(),
            inc.len()
        )));
    }
    let (first, last) = match (compr.first(), compr.last()) {
        (Some(f), Some(l)) => (f.time, l.time),
        _ => return Err(LabError::Mismatch("traces need at least two outputs".into())),
    };
    let mut acc = MetricAccumulator::new(compr[0].grid(), p, first, last - first);
    for (c, i) in compr.iter().zip(inc) {
        acc.push(c, i)?;
    }
    acc.finish()
}

/// Largest discrete time-difference quotients of (φ_ε, Qm_ε) and of its
/// filtered version in the H^{−2} pair norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquicontinuityReport {
    pub eps: f64,
    /// Largest sampling interval of the trace.
    pub interval: f64,
    pub raw: f64,
    pub filtered: f64,
}

/// Streaming form of [`filtered_equicontinuity`].
#[derive(Debug)]
pub struct EquicontinuityAccumulator {
    eps: f64,
    gp: GroupParams<f64>,
    prev: Option<(f64, AcousticPair<f64>, AcousticPair<f64>)>,
    interval: f64,
    raw: f64,
    filtered: f64,
}

impl EquicontinuityAccumulator {
    /// `rho_bar` fixes the wave coefficient b = aγρ̄^{γ−1} of the filter.
    pub fn new(p: &FluidParams, rho_bar: f64) -> Result<Self> {
        Ok(Self {
            eps: p.eps,
            gp: GroupParams::from_pressure_law(p.a, p.gamma, rho_bar)?,
            prev: None,
            interval: 0.0,
            raw: 0.0,
            filtered: 0.0,
        })
    }

    pub fn push(&mut self, s: &CompressibleState<f64>) -> Result<()> {
        let view = s.fluctuation(self.eps);
        let phi = view.phi.shift(-view.phi.mean());
        let raw = AcousticPair::new(phi, gradient_part(&view.m))?;
        let filtered = filter(&raw, s.time, self.eps, &self.gp)?;
        if let Some((t, r0, f0)) = &self.prev {
            let h = s.time - t;
            if !(h > 0.0) {
                return Err(LabError::Mismatch("trace times must increase".into()));
            }
            if h > 0.25 * self.eps * (1.0 + TIME_TOL) {
                return Err(LabError::Undersampled { interval: h, eps: self.eps });
            }
            self.interval = self.interval.max(h);
            self.raw = self.raw.max(pair_norm(&raw.sub(r0)?, -NEGATIVE_ORDER, self.gp.b) / h);
            self.filtered = self.filtered.max(pair_norm(&filtered.sub(f0)?, -NEGATIVE_ORDER, self.gp.b) / h);
        }
        self.prev = Some((s.time, raw, filtered));
        Ok(())
    }

    pub fn finish(self) -> Result<EquicontinuityReport> {
        if self.interval == 0.0 {
            return Err(LabError::Mismatch("equicontinuity needs at least two outputs".into()));
        }
        Ok(EquicontinuityReport { eps: self.eps, interval: self.interval, raw: self.raw, filtered: self.filtered })
    }
}

/// Builds (φ_ε, Qm_ε)(t), filters it with e^{−tL/ε} and compares the
/// largest difference quotients. Traces sampled coarser than ε/4 are
/// rejected: the quotients would alias the acoustic frequency.
pub fn filtered_equicontinuity(trace: &[CompressibleState<f64>], p: &FluidParams) -> Result<EquicontinuityReport> {
    let first = trace.first().ok_or_else(|| LabError::Mismatch("empty trace".into()))?;
    let mut acc = EquicontinuityAccumulator::new(p, first.rho_bar())?;
    for s in trace {
        acc.push(s)?;
    }
    acc.finish()
}
