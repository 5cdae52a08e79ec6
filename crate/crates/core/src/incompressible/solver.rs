use std::sync::Arc;

use rustfft::num_complex::Complex;

use crate::compressible::lorentz_force;
use crate::error::{Error, Result};
use crate::rk::{if_rk3_step, Blocks};
use crate::scalar::Real;
use crate::spectral::{
    cross, curl, curl_of, dealias_vector, div_outer, divergence, gradient_potential, helmholtz_project, partial,
    solenoidal_part, Grid, ScalarField, VectorField,
};

/// Divergence-free velocity and magnetic field, with the pressure recovered
/// from the last projection.
#[derive(Clone, Debug)]
pub struct IncompressibleState<T: Real = f64> {
    pub u: VectorField<T>,
    pub h: VectorField<T>,
    pub p: ScalarField<T>,
    pub time: T,
}

impl<T: Real> IncompressibleState<T> {
    /// Projects `u` and `h` onto divergence-free fields and computes the
    /// matching pressure.
    pub fn new(u: VectorField<T>, h: VectorField<T>, time: T) -> Result<Self> {
        u.check_same_grid(&h)?;
        let u = solenoidal_part(&u);
        let h = solenoidal_part(&h);
        let p = pressure(&u, &h)?;
        Ok(Self { u, h, p, time })
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        self.u.grid()
    }

    /// ½∫(|u|² + |H|²).
    pub fn energy(&self) -> T {
        T::lit(0.5) * (self.u.dot(&self.u).expect("same grid") + self.h.dot(&self.h).expect("same grid"))
    }

    /// μ∫|∇u|² + ν∫|∇×H|².
    pub fn dissipation(&self, mu: T, nu: T) -> Result<T> {
        let dim = self.u.dim();
        let mut g = T::zero();
        for c in self.u.components() {
            for a in 0..dim {
                let d = partial(c, a);
                g += d.dot(&d)?;
            }
        }
        let w = curl(&self.h)?;
        Ok(mu * g + nu * w.dot(&w)?)
    }
}

/// Pressure p with ∇p = Q[(∇×H)×H − div(u⊗u)], zero mean.
pub fn pressure<T: Real>(u: &VectorField<T>, h: &VectorField<T>) -> Result<ScalarField<T>> {
    let force = lorentz_force(h)?.sub(&div_outer(u, u)?)?;
    Ok(gradient_potential(&force))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncompressibleParams<T: Real = f64> {
    pub mu: T,
    pub nu: T,
}

impl<T: Real> IncompressibleParams<T> {
    pub fn new(mu: T, nu: T) -> Result<Self> {
        if !(mu > T::zero() && nu > T::zero()) {
            return Err(Error::InvalidParameter(format!("viscosities mu = {mu}, nu = {nu} must be positive")));
        }
        Ok(Self { mu, nu })
    }
}

/// One integrating-factor RK3 step of the Leray-projected system.
pub fn step_inc<T: Real>(state: &IncompressibleState<T>, mu: T, nu: T, dt: T) -> Result<IncompressibleState<T>> {
    let params = IncompressibleParams::new(mu, nu)?;
    if !(dt > T::zero() && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("time step {dt} must be positive")));
    }
    let grid = state.grid().clone();
    let dim = grid.dim();
    let to_field = |blocks: &[Vec<Complex<T>>]| -> Result<VectorField<T>> {
        VectorField::new(blocks.iter().map(|b| ScalarField::from_spectrum(&grid, b.clone())).collect())
    };
    let rhs = |b: &Blocks<T>| -> Result<Blocks<T>> {
        let u = to_field(&b[..dim])?;
        let h = to_field(&b[dim..])?;
        let momentum = solenoidal_part(&lorentz_force(&h)?.sub(&div_outer(&u, &u)?)?);
        let induction = solenoidal_part(&dealias_vector(&curl_of(&cross(&dealias_vector(&u), &dealias_vector(&h))?)?));
        Ok(momentum.components().iter().chain(induction.components()).map(|c| c.spectrum().to_vec()).collect())
    };
    let propagate = |b: &mut Blocks<T>, tau: T| {
        for i in 0..grid.len() {
            let k2 = grid.k2()[i];
            let (eu, eh) = ((-params.mu * k2 * tau).exp(), (-params.nu * k2 * tau).exp());
            for a in 0..dim {
                b[a][i] *= eu;
                b[dim + a][i] *= eh;
            }
        }
    };
    let mut blocks: Blocks<T> =
        state.u.components().iter().chain(state.h.components()).map(|c| c.spectrum().to_vec()).collect();
    if_rk3_step(&mut blocks, dt, rhs, propagate)?;
    let (u, _) = helmholtz_project(&to_field(&blocks[..dim])?);
    let h = solenoidal_part(&to_field(&blocks[dim..])?);
    let time = state.time + dt;
    if !(u.is_finite() && h.is_finite()) {
        return Err(Error::NonFinite { time: time.as_f64() });
    }
    let p = pressure(&u, &h)?;
    Ok(IncompressibleState { u, h, p, time })
}

/// Energy bookkeeping of an incompressible run.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct IncRecord {
    pub time: f64,
    pub energy: f64,
    pub dissipation: f64,
    pub cumulative_d: f64,
    pub div_u: f64,
    pub div_h: f64,
}

#[derive(Debug, Clone)]
pub struct IncTrace<T: Real = f64> {
    pub states: Vec<IncompressibleState<T>>,
    pub records: Vec<IncRecord>,
}

fn l2<T: Real>(f: &ScalarField<T>) -> f64 {
    f.dot(f).map(|v| v.max(T::zero()).sqrt().as_f64()).unwrap_or(f64::NAN)
}

/// Runs to `t_final` with outputs every `output_stride` steps (and at the end).
pub fn simulate_inc<T: Real>(
    init: &IncompressibleState<T>,
    mu: T,
    nu: T,
    t_final: f64,
    dt: f64,
    output_stride: usize,
) -> Result<IncTrace<T>> {
    let (n, dt) = crate::compressible::step_count(t_final, dt)?;
    if output_stride == 0 {
        return Err(Error::InvalidParameter("output stride must be at least 1".into()));
    }
    let record = |s: &IncompressibleState<T>, cum: f64| -> Result<IncRecord> {
        Ok(IncRecord {
            time: s.time.as_f64(),
            energy: s.energy().as_f64(),
            dissipation: s.dissipation(mu, nu)?.as_f64(),
            cumulative_d: cum,
            div_u: l2(&divergence(&s.u)),
            div_h: l2(&divergence(&s.h)),
        })
    };
    let mut states = vec![init.clone()];
    let mut records = vec![record(init, 0.0)?];
    let mut state = init.clone();
    let mut cum = 0.0;
    let mut d_prev = records[0].dissipation;
    for i in 1..=n {
        state = step_inc(&state, mu, nu, T::lit(dt))?;
        let d = state.dissipation(mu, nu)?.as_f64();
        cum += 0.5 * dt * (d + d_prev);
        d_prev = d;
        if i % output_stride == 0 || i == n {
            records.push(record(&state, cum)?);
            states.push(state.clone());
        }
    }
    Ok(IncTrace { states, records })
}
