//! Defects of the weak (distributional) form of the incompressible system
//! evaluated on a discrete trace.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use super::solver::IncompressibleState;
use crate::compressible::lorentz_force;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{cross, curl, curl_of, partial, Curl, Grid, ScalarField, VectorField};

/// Time weight ψ on [0, T] with ψ(T) = ψ'(T) = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeWindow {
    /// cos²(πt/2T).
    CosSquared,
    /// (1 − t/T)^power, power ≥ 2.
    Polynomial { power: i32 },
}

impl TimeWindow {
    pub fn value(&self, t: f64, horizon: f64) -> f64 {
        let s = t / horizon;
        match *self {
            Self::CosSquared => (0.5 * PI * s).cos().powi(2),
            Self::Polynomial { power } => (1.0 - s).powi(power),
        }
    }

    pub fn derivative(&self, t: f64, horizon: f64) -> f64 {
        let s = t / horizon;
        match *self {
            Self::CosSquared => -0.5 * PI / horizon * (PI * s).sin(),
            Self::Polynomial { power } => -(power as f64) / horizon * (1.0 - s).powi(power - 1),
        }
    }
}

/// Divergence-free spatial test field with its time window.
#[derive(Debug, Clone)]
pub struct TestPair<T: Real = f64> {
    pub phi: VectorField<T>,
    pub window: TimeWindow,
}

/// Three smooth solenoidal test fields built as curls of low-mode potentials.
pub fn standard_test_bank<T: Real>(grid: &Arc<Grid<T>>) -> Result<Vec<TestPair<T>>> {
    let potentials: [fn([f64; 3]) -> f64; 3] = [
        |x| (x[0] + x[1]).sin(),
        |x| (2.0 * x[0]).cos() * x[1].sin(),
        |x| (x[0] - 2.0 * x[1]).cos() + 0.5 * x[1].sin(),
    ];
    let windows = [TimeWindow::CosSquared, TimeWindow::Polynomial { power: 3 }, TimeWindow::CosSquared];
    let scalar = |f: fn([f64; 3]) -> f64, shift: f64| {
        ScalarField::from_fn(grid, move |x| {
            let y = [x[0].as_f64(), x[1].as_f64() + shift, x[2].as_f64() + 2.0 * shift];
            T::lit(f(y))
        })
    };
    potentials
        .iter()
        .zip(windows)
        .map(|(&f, window)| {
            let pot = match grid.dim() {
                2 => Curl::Scalar(scalar(f, 0.0)),
                3 => Curl::Vector(VectorField::new(vec![scalar(f, 0.0), scalar(f, 0.7), scalar(f, 1.3)])?),
                n => return Err(Error::Unsupported(format!("test bank in {n} dimensions"))),
            };
            Ok(TestPair { phi: curl_of(&pot)?, window })
        })
        .collect()
}

/// Absolute defects of the momentum and induction identities for one test pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeakDefect {
    pub momentum: f64,
    pub induction: f64,
}

/// Per-time integrands for a fixed spatial test field.
struct Integrands {
    u_phi: f64,
    /// ∫(u_i ∂_i φ_j u_j − μ∇u:∇φ).
    momentum_flux: f64,
    /// ∫((∇×H)×H)·φ.
    lorentz: f64,
    h_phi: f64,
    /// ∫(u×H)·(∇×φ).
    stretch: f64,
    /// ∫(∇×H)·(∇×φ).
    diffusion: f64,
}

fn integrands<T: Real>(
    s: &IncompressibleState<T>,
    phi: &VectorField<T>,
    curl_phi: &Curl<T>,
    mu: T,
) -> Result<Integrands> {
    let dim = s.u.dim();
    let mut advect = T::zero();
    let mut visc = T::zero();
    for j in 0..dim {
        for i in 0..dim {
            let dphi = partial(phi.component(j), i);
            advect += s.u.component(i).mul(s.u.component(j))?.dot(&dphi)?;
            visc += partial(s.u.component(j), i).dot(&dphi)?;
        }
    }
    Ok(Integrands {
        u_phi: s.u.dot(phi)?.as_f64(),
        momentum_flux: (advect - mu * visc).as_f64(),
        lorentz: lorentz_force(&s.h)?.dot(phi)?.as_f64(),
        h_phi: s.h.dot(phi)?.as_f64(),
        stretch: cross(&s.u, &s.h)?.dot(curl_phi)?.as_f64(),
        diffusion: curl(&s.h)?.dot(curl_phi)?.as_f64(),
    })
}

/// Evaluates both weak identities on `trace` (ordered in time, starting at
/// t = 0) by trapezoidal quadrature, with horizon T = last time.
///
/// Momentum: ψ(0)∫u₀·φ + ∫ψ'∫u·φ + ∫ψ∫(u_i∂_iφ_j u_j − μ∇u:∇φ) + ∫ψ∫((∇×H)×H)·φ.
/// Induction: ψ(0)∫H₀·φ + ∫ψ'∫H·φ + ∫ψ∫(u×H)·(∇×φ) − ν∫ψ∫(∇×H)·(∇×φ).
pub fn weak_residual<T: Real>(
    trace: &[IncompressibleState<T>],
    mu: T,
    nu: T,
    bank: &[TestPair<T>],
) -> Result<Vec<WeakDefect>> {
    if trace.len() < 2 {
        return Err(Error::InvalidParameter("weak residual needs at least two trace states".into()));
    }
    let times: Vec<f64> = trace.iter().map(|s| s.time.as_f64()).collect();
    let t0 = times[0];
    let horizon = times[times.len() - 1] - t0;
    if !(horizon > 0.0) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("trace times must be strictly increasing".into()));
    }
    let nu = nu.as_f64();
    bank.iter()
        .map(|pair| {
            let curl_phi = curl(&pair.phi)?;
            let rows: Vec<Integrands> =
                trace.iter().map(|s| integrands(s, &pair.phi, &curl_phi, mu)).collect::<Result<_>>()?;
            let w = |k: usize| pair.window.value(times[k] - t0, horizon);
            let dw = |k: usize| pair.window.derivative(times[k] - t0, horizon);
            let mut mom = w(0) * rows[0].u_phi;
            let mut ind = w(0) * rows[0].h_phi;
            let f_mom = |k: usize| dw(k) * rows[k].u_phi + w(k) * (rows[k].momentum_flux + rows[k].lorentz);
            let f_ind = |k: usize| dw(k) * rows[k].h_phi + w(k) * (rows[k].stretch - nu * rows[k].diffusion);
            for k in 1..times.len() {
                let half = 0.5 * (times[k] - times[k - 1]);
                mom += half * (f_mom(k - 1) + f_mom(k));
                ind += half * (f_ind(k - 1) + f_ind(k));
            }
            Ok(WeakDefect { momentum: mom.abs(), induction: ind.abs() })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{divergence, GridSpec};

    #[test]
    fn windows_vanish_at_horizon() {
        for w in [TimeWindow::CosSquared, TimeWindow::Polynomial { power: 3 }] {
            assert!(w.value(2.0, 2.0).abs() < 1e-15 && w.derivative(2.0, 2.0).abs() < 1e-15);
            assert_eq!(w.value(0.0, 2.0), 1.0);
            let h = 1e-6;
            let fd = (w.value(0.7 + h, 2.0) - w.value(0.7 - h, 2.0)) / (2.0 * h);
            assert!((fd - w.derivative(0.7, 2.0)).abs() < 1e-8);
        }
    }

    #[test]
    fn bank_is_solenoidal() {
        for dim in [2, 3] {
            let g = Grid::<f64>::new(GridSpec::torus(dim, 16)).unwrap();
            for p in standard_test_bank(&g).unwrap() {
                assert!(divergence(&p.phi).max_abs() < 1e-12);
                assert!(p.phi.max_abs() > 0.1);
            }
        }
    }

    #[test]
    fn zero_solution_has_zero_defect() {
        let g = Grid::<f64>::new(GridSpec::torus(2, 16)).unwrap();
        let trace: Vec<_> = (0..5)
            .map(|k| IncompressibleState::new(VectorField::zeros(&g), VectorField::zeros(&g), 0.1 * k as f64).unwrap())
            .collect();
        for d in weak_residual(&trace, 0.1, 0.1, &standard_test_bank(&g).unwrap()).unwrap() {
            assert_eq!(d, WeakDefect { momentum: 0.0, induction: 0.0 });
        }
    }
}
