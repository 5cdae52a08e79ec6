//! Right-hand sides of the scaled compressible system.

use super::params::FluidParams;
use super::state::CompressibleState;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{
    cross, cross_curl, curl, curl_of, dealias, dealias_vector, div_outer, divergence, gradient, solenoidal_part,
    vector_laplacian, ScalarField, VectorField,
};

/// (∇×H)×H, dealiased.
pub fn lorentz_force<T: Real>(h: &VectorField<T>) -> Result<VectorField<T>> {
    let hd = dealias_vector(h);
    let w = curl(&hd)?;
    Ok(dealias_vector(&cross_curl(&w, &hd)?))
}

/// P[∇×(u×H) − ν∇×(∇×H)].
pub fn induction_rhs<T: Real>(u: &VectorField<T>, h: &VectorField<T>, nu: T) -> Result<VectorField<T>> {
    let stretch = dealias_vector(&curl_of(&cross(&dealias_vector(u), &dealias_vector(h))?)?);
    let diffusion = curl_of(&curl(h)?)?.scale(nu);
    Ok(solenoidal_part(&stretch.sub(&diffusion)?))
}

/// Pointwise ρ^γ − γρρ̄^{γ−1} + (γ−1)ρ̄^γ.
///
/// Evaluated as ρ̄^γ[(1+x)^γ − 1 − γx] with x = ρ/ρ̄ − 1 through `ln_1p` and
/// `exp_m1`, so it vanishes exactly at ρ = ρ̄ and keeps relative accuracy
/// for the O(ε²) values met in practice.
pub fn pressure_remainder<T: Real>(rho: &ScalarField<T>, rho_bar: T, gamma: T) -> ScalarField<T> {
    let scale = rho_bar.powf(gamma);
    rho.map(|r| {
        let x = (r - rho_bar) / rho_bar;
        scale * ((gamma * x.ln_1p()).exp_m1() - gamma * x)
    })
}

pub(crate) fn check_density<T: Real>(rho: &ScalarField<T>, time: T) -> Result<()> {
    let min = rho.min();
    if !min.is_finite() {
        return Err(Error::NonFinite { time: time.as_f64() });
    }
    if min <= T::zero() {
        return Err(Error::NonPositiveDensity { time: time.as_f64(), min: min.as_f64() });
    }
    Ok(())
}

/// Full momentum right-hand side minus the stiff linear acoustic force
/// (b/ε²)∇(ρ − ρ̄):
///
/// −div(ρu⊗u) + μΔu + λ∇div u − (a/ε²)∇(ρ^γ − γρρ̄^{γ−1} + (γ−1)ρ̄^γ) + (∇×H)×H.
pub fn nonstiff_rhs_f<T: Real>(state: &CompressibleState<T>, p: &FluidParams) -> Result<VectorField<T>> {
    check_density(&state.rho, state.time)?;
    let m = state.momentum();
    let rho_bar = state.rho_bar();
    let advection = div_outer(&m, &state.u)?;
    let u = &state.u;
    let viscous = vector_laplacian(u).scale(T::lit(p.mu)).add(&gradient(&divergence(u)).scale(T::lit(p.lam)))?;
    let remainder = pressure_remainder(&state.rho, rho_bar, T::lit(p.gamma));
    let pressure = gradient(&dealias(&remainder)).scale(T::lit(p.a / (p.eps * p.eps)));
    viscous.sub(&advection)?.sub(&pressure)?.add(&lorentz_force(&state.h)?)
}
