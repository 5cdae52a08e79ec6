//! Energy functionals and density-fluctuation bounds.

use serde::Serialize;

use super::params::FluidParams;
use super::physics::pressure_remainder;
use super::state::CompressibleState;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{curl, divergence, lq_norm, partial, ScalarField};

/// Energy bookkeeping at one instant.
///
/// `e` is the total energy with the ½ applied to the whole integrand,
/// pressure potential included, exactly as the energy inequality is usually
/// displayed. The equations themselves dissipate
/// ½∫(ρ|u|² + |H|²) + a/(ε²(γ−1))∫ρ^γ, whose potential carries no ½; `e_rel`
/// is that functional with the potential in relative form
/// ρ^γ − γρρ̄^{γ−1} + (γ−1)ρ̄^γ. It stays O(1) as ε → 0 and is the one
/// relative tolerances should use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyReport {
    pub time: f64,
    pub e: f64,
    pub d: f64,
    pub e0: f64,
    pub cumulative_d: f64,
    pub e_rel: f64,
    pub e_rel0: f64,
}

impl EnergyReport {
    /// (E(t) + ∫D) / E(0) − 1 for the displayed functional `e`.
    pub fn literal_excess(&self) -> f64 {
        (self.e + self.cumulative_d) / self.e0 - 1.0
    }

    /// (E_rel(t) + ∫D) / E_rel(0) − 1; nonpositive for an energy-stable run.
    pub fn balance_excess(&self) -> f64 {
        if self.e_rel0 > 0.0 {
            (self.e_rel + self.cumulative_d) / self.e_rel0 - 1.0
        } else {
            self.e_rel + self.cumulative_d
        }
    }
}

/// Running totals carried between reports.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EnergyLedger {
    pub e0: f64,
    pub e_rel0: f64,
    pub cumulative_d: f64,
}

fn kinetic_and_magnetic<T: Real>(state: &CompressibleState<T>) -> T {
    let ke = state.u.norm_sq_pointwise().mul(&state.rho).expect("same grid").integral();
    let me = state.h.norm_sq_pointwise().integral();
    T::lit(0.5) * (ke + me)
}

/// ½∫(ρ|u|² + |H|² + aρ^γ/(ε²(γ−1))).
pub fn total_energy<T: Real>(state: &CompressibleState<T>, p: &FluidParams) -> T {
    let g = T::lit(p.gamma);
    let pot = state.rho.map(|r| r.powf(g)).integral() * T::lit(p.a / (p.eps * p.eps * (p.gamma - 1.0)));
    kinetic_and_magnetic(state) + T::lit(0.5) * pot
}

/// ½∫(ρ|u|² + |H|²) + a/(ε²(γ−1))∫(ρ^γ − γρρ̄^{γ−1} + (γ−1)ρ̄^γ), the
/// relative energy dissipated exactly by the equations.
pub fn relative_energy<T: Real>(state: &CompressibleState<T>, p: &FluidParams, rho_bar: T) -> T {
    let pot = pressure_remainder(&state.rho, rho_bar, T::lit(p.gamma)).integral()
        * T::lit(p.a / (p.eps * p.eps * (p.gamma - 1.0)));
    kinetic_and_magnetic(state) + pot
}

/// ∫(μ|∇u|² + λ(div u)² + ν|∇×H|²).
pub fn dissipation<T: Real>(state: &CompressibleState<T>, p: &FluidParams) -> Result<T> {
    let dim = state.u.dim();
    let mut grad_sq = T::zero();
    for c in state.u.components() {
        for a in 0..dim {
            let d = partial(c, a);
            grad_sq += d.dot(&d)?;
        }
    }
    let div = divergence(&state.u);
    let w = curl(&state.h)?;
    Ok(T::lit(p.mu) * grad_sq + T::lit(p.lam) * div.dot(&div)? + T::lit(p.nu) * w.dot(&w)?)
}

impl EnergyLedger {
    pub fn start<T: Real>(init: &CompressibleState<T>, p: &FluidParams) -> Self {
        let rho_bar = init.rho_bar();
        Self {
            e0: total_energy(init, p).as_f64(),
            e_rel0: relative_energy(init, p, rho_bar).as_f64(),
            cumulative_d: 0.0,
        }
    }
}

pub fn energy_report<T: Real>(
    state: &CompressibleState<T>,
    p: &FluidParams,
    ledger: &EnergyLedger,
) -> Result<EnergyReport> {
    Ok(EnergyReport {
        time: state.time.as_f64(),
        e: total_energy(state, p).as_f64(),
        d: dissipation(state, p)?.as_f64(),
        e0: ledger.e0,
        cumulative_d: ledger.cumulative_d,
        e_rel: relative_energy(state, p, state.rho_bar()).as_f64(),
        e_rel0: ledger.e_rel0,
    })
}

/// Norms of the density fluctuation in the form of the uniform bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FluctuationReport {
    /// γ ≥ 2: ‖φ‖_{L²}.
    Quadratic { phi_l2: f64 },
    /// γ < 2: ‖φχ_{ρ<R}‖_{L²} ≤ C and ‖φχ_{ρ≥R}‖_{L^γ} ≤ Cε^{2/γ−1}.
    Split { r: f64, low_l2: f64, high_lgamma: f64, low_weight: f64, high_weight: f64 },
}

pub fn fluctuation_norms<T: Real>(
    state: &CompressibleState<T>,
    p: &FluidParams,
    r: Option<f64>,
) -> Result<FluctuationReport> {
    let rho_bar = state.rho_bar();
    let eps = T::lit(p.eps);
    let phi = state.rho.map(|x| (x - rho_bar) / eps);
    if p.gamma >= 2.0 {
        return Ok(FluctuationReport::Quadratic { phi_l2: lq_norm(&phi, T::lit(2.0)).as_f64() });
    }
    let r = r.ok_or_else(|| Error::InvalidParameter("cut-off R is required when gamma < 2".into()))?;
    if !(r > 1.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("cut-off R = {r} must lie in (1, inf)")));
    }
    let cut = T::lit(r);
    let below = |keep_low: bool| -> Result<ScalarField<T>> {
        phi.zip_with(&state.rho, |f, x| if (x < cut) == keep_low { f } else { T::zero() })
    };
    Ok(FluctuationReport::Split {
        r,
        low_l2: lq_norm(&below(true)?, T::lit(2.0)).as_f64(),
        high_lgamma: lq_norm(&below(false)?, T::lit(p.gamma)).as_f64(),
        low_weight: 1.0,
        high_weight: p.eps.powf(2.0 / p.gamma - 1.0),
    })
}

/// Largest constants making the pointwise coercivity bounds hold on `xs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoercivityScan {
    /// x^γ − 1 − γ(x−1) ≥ ν|x−1|² (all x if γ ≥ 2, else x ≤ R).
    pub quadratic: f64,
    /// x^γ − 1 − γ(x−1) ≥ ν|x−1|^γ for x ≥ R; `None` when γ ≥ 2.
    pub power: Option<f64>,
}

pub fn coercivity_scan(gamma: f64, r: f64, xs: &[f64]) -> CoercivityScan {
    let f = |x: f64| x.powf(gamma) - 1.0 - gamma * (x - 1.0);
    let mut quadratic = f64::INFINITY;
    let mut power = f64::INFINITY;
    for &x in xs.iter().filter(|&&x| x >= 0.0 && x != 1.0) {
        if gamma >= 2.0 || x <= r {
            quadratic = quadratic.min(f(x) / (x - 1.0).powi(2));
        }
        if gamma < 2.0 && x >= r {
            power = power.min(f(x) / (x - 1.0).abs().powf(gamma));
        }
    }
    CoercivityScan { quadratic, power: (gamma < 2.0).then_some(power) }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::spectral::{Grid, GridSpec, VectorField};

    fn params(gamma: f64) -> FluidParams {
        FluidParams { a: 1.0, gamma, eps: 1.0, mu: 0.1, lam: 0.05, nu: 0.2, dim: 2 }
    }

    #[test]
    fn energy_of_rest_state() {
        let g = Grid::<f64>::new(GridSpec::torus(2, 8)).unwrap();
        let s = CompressibleState::equilibrium(&g, 1.0);
        let p = params(2.0);
        assert!((total_energy(&s, &p) - 0.5 * 4.0 * PI * PI).abs() < 1e-12);
        assert_eq!(relative_energy(&s, &p, 1.0), 0.0);
        assert_eq!(dissipation(&s, &p).unwrap(), 0.0);
    }

    #[test]
    fn magnetic_energy_is_quadratic() {
        let g = Grid::<f64>::new(GridSpec::torus(2, 16)).unwrap();
        let mut s = CompressibleState::equilibrium(&g, 1.0);
        let p = params(2.0);
        let base = total_energy(&s, &p);
        s.h = VectorField::from_fn(&g, |x| [x[1].sin(), 0.0, 0.0]);
        let one = total_energy(&s, &p) - base;
        s.h = s.h.scale(2.0);
        let two = total_energy(&s, &p) - base;
        assert!((two - 4.0 * one).abs() < 1e-12 * two);
    }

    #[test]
    fn dissipation_of_shear_mode() {
        // u = (sin y, 0): |∇u|² = cos² y, div u = 0
        let g = Grid::<f64>::new(GridSpec::torus(2, 16)).unwrap();
        let mut s = CompressibleState::equilibrium(&g, 1.0);
        s.u = VectorField::from_fn(&g, |x| [x[1].sin(), 0.0, 0.0]);
        let p = params(2.0);
        assert!((dissipation(&s, &p).unwrap() - p.mu * 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn fluctuations_vanish_at_rest() {
        let g = Grid::<f64>::new(GridSpec::torus(2, 8)).unwrap();
        let s = CompressibleState::equilibrium(&g, 1.0);
        assert_eq!(fluctuation_norms(&s, &params(2.0), None).unwrap(), FluctuationReport::Quadratic { phi_l2: 0.0 });
        match fluctuation_norms(&s, &params(5.0 / 3.0), Some(2.0)).unwrap() {
            FluctuationReport::Split { low_l2, high_lgamma, .. } => assert!(low_l2 == 0.0 && high_lgamma == 0.0),
            other => panic!("{other:?}"),
        }
        assert!(fluctuation_norms(&s, &params(1.5), None).is_err());
    }

    #[test]
    fn coercivity_for_gamma_two_is_exact() {
        let xs: Vec<f64> = (0..=1000).map(|i| i as f64 / 100.0).collect();
        let c = coercivity_scan(2.0, 2.0, &xs);
        assert!((c.quadratic - 1.0).abs() < 1e-12);
        assert!(c.power.is_none());
    }
}
