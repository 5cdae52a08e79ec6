//! Strang-split time stepping: exact acoustic half steps around an
//! integrating-factor RK3 step of everything else.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use rustfft::num_complex::Complex;

use super::diagnostics::{dissipation, energy_report, EnergyLedger, EnergyReport};
use super::params::{validate_params, FluidParams};
use super::physics::{check_density, lorentz_force, pressure_remainder};
use super::state::CompressibleState;
use crate::acoustic::{apply_group, AcousticPair, GroupParams};
use crate::error::{Error, Result};
use crate::rk::{if_rk3_step, Blocks};
use crate::scalar::Real;
use crate::spectral::{
    cross, curl_of, dealias, dealias_vector, div_outer, divergence, gradient, solenoidal_part, vector_laplacian, Grid,
    ScalarField, VectorField,
};

/// Stepper for one run. The mean density and the wave coefficient
/// b = aγρ̄^{γ−1} are frozen from the initial state.
#[derive(Debug, Clone)]
pub struct CompressibleSolver<T: Real = f64> {
    params: FluidParams,
    grid: Arc<Grid<T>>,
    rho_bar: T,
    group: GroupParams<T>,
}

impl<T: Real> CompressibleSolver<T> {
    pub fn new(params: &FluidParams, init: &CompressibleState<T>) -> Result<Self> {
        validate_params(params)?;
        if init.grid().dim() != params.dim {
            return Err(Error::InvalidParameter(format!(
                "grid is {}-dimensional but params say N = {}",
                init.grid().dim(),
                params.dim
            )));
        }
        check_density(&init.rho, init.time)?;
        let rho_bar = init.rho_bar();
        let group = GroupParams::new(T::lit(params.wave_coefficient(rho_bar.as_f64())))?;
        Ok(Self { params: params.clone(), grid: init.grid().clone(), rho_bar, group })
    }

    pub fn params(&self) -> &FluidParams {
        &self.params
    }

    pub fn rho_bar(&self) -> T {
        self.rho_bar
    }

    pub fn wave_coefficient(&self) -> T {
        self.group.b
    }

    /// Exact acoustic evolution of (φ, m) over physical time `tau`.
    fn acoustic(&self, rho: &ScalarField<T>, m: &VectorField<T>, tau: T) -> Result<(ScalarField<T>, VectorField<T>)> {
        let eps = T::lit(self.params.eps);
        let rho_bar = self.rho_bar;
        let pair = AcousticPair { phi: rho.map(|r| (r - rho_bar) / eps), m: m.clone() };
        let out = apply_group(&pair, tau / eps, &self.group)?;
        Ok((out.phi.map(|f| rho_bar + eps * f), out.m))
    }

    /// Advection, viscosity, pressure remainder, Lorentz force and induction
    /// over `dt` with the density frozen.
    fn nonstiff(
        &self,
        rho: &ScalarField<T>,
        m: &VectorField<T>,
        h: &VectorField<T>,
        dt: T,
    ) -> Result<(VectorField<T>, VectorField<T>)> {
        let p = &self.params;
        let grid = &self.grid;
        let dim = p.dim;
        let (mu, lam, nu) = (T::lit(p.mu), T::lit(p.lam), T::lit(p.nu));
        let inv_rho_bar = T::one() / self.rho_bar;
        let inv_rho = rho.map(|r| T::one() / r);
        let pressure = gradient(&dealias(&pressure_remainder(rho, self.rho_bar, T::lit(p.gamma))))
            .scale(T::lit(p.a / (p.eps * p.eps)));

        let to_field = |blocks: &[Vec<Complex<T>>]| -> Result<VectorField<T>> {
            VectorField::new(blocks.iter().map(|b| ScalarField::from_spectrum(grid, b.clone())).collect())
        };
        let rhs = |b: &Blocks<T>| -> Result<Blocks<T>> {
            let m = to_field(&b[..dim])?;
            let h = to_field(&b[dim..])?;
            let u = m.mul_scalar(&inv_rho)?;
            // viscous stress minus the part carried by the integrating factor
            let w = u.sub(&m.scale(inv_rho_bar))?;
            let momentum = vector_laplacian(&w)
                .scale(mu)
                .add(&gradient(&divergence(&w)).scale(lam))?
                .sub(&div_outer(&m, &u)?)?
                .sub(&pressure)?
                .add(&lorentz_force(&h)?)?;
            let induction =
                solenoidal_part(&dealias_vector(&curl_of(&cross(&dealias_vector(&u), &dealias_vector(&h))?)?));
            Ok(momentum.components().iter().chain(induction.components()).map(|c| c.spectrum().to_vec()).collect())
        };
        let propagate = |b: &mut Blocks<T>, tau: T| {
            for i in 0..grid.len() {
                let k2 = grid.k2()[i];
                if k2 == T::zero() {
                    continue;
                }
                let k = grid.k_vector_odd(i);
                let kk = k[..dim].iter().fold(T::zero(), |s, &x| s + x * x);
                let e_p = (-mu * inv_rho_bar * k2 * tau).exp();
                let e_q = (-(mu * k2 + lam * kk) * inv_rho_bar * tau).exp();
                let e_h = (-nu * k2 * tau).exp();
                let mut long = Complex::new(T::zero(), T::zero());
                if kk > T::zero() {
                    for a in 0..dim {
                        long += b[a][i] * k[a];
                    }
                    long /= kk;
                }
                for a in 0..dim {
                    b[a][i] = b[a][i] * e_p + long * (k[a] * (e_q - e_p));
                    b[dim + a][i] *= e_h;
                }
            }
        };
        let mut blocks: Blocks<T> =
            m.components().iter().chain(h.components()).map(|c| c.spectrum().to_vec()).collect();
        if_rk3_step(&mut blocks, dt, rhs, propagate)?;
        Ok((to_field(&blocks[..dim])?, to_field(&blocks[dim..])?))
    }

    pub fn step(&self, state: &CompressibleState<T>, dt: T) -> Result<CompressibleState<T>> {
        if !(dt > T::zero() && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("time step {dt} must be positive")));
        }
        let half = dt * T::lit(0.5);
        let (rho, m) = self.acoustic(&state.rho, &state.momentum(), half)?;
        check_density(&rho, state.time + half)?;
        let (m, h) = self.nonstiff(&rho, &m, &state.h, dt)?;
        let (rho, m) = self.acoustic(&rho, &m, half)?;
        let time = state.time + dt;
        check_density(&rho, time)?;
        let u = m.mul_scalar(&rho.map(|r| T::one() / r))?;
        let h = solenoidal_part(&h);
        if !(u.is_finite() && h.is_finite()) {
            return Err(Error::NonFinite { time: time.as_f64() });
        }
        Ok(CompressibleState { rho, u, h, time })
    }
}

/// One step with a solver built from `state` itself.
pub fn step<T: Real>(state: &CompressibleState<T>, dt: T, p: &FluidParams) -> Result<CompressibleState<T>> {
    CompressibleSolver::new(p, state)?.step(state, dt)
}

/// Half the advective CFL limit min(Δx)/(max|u| + max|H|/√min ρ).
/// Independent of ε: the acoustic part is integrated exactly.
pub fn suggest_dt<T: Real>(state: &CompressibleState<T>) -> T {
    let spec = state.grid().spec();
    let dx = spec.points.iter().zip(&spec.lengths).map(|(&n, &l)| l / n as f64).fold(f64::INFINITY, f64::min);
    let alfven = state.h.max_abs().as_f64() / state.rho.min().as_f64().max(1e-12).sqrt();
    let speed = state.u.max_abs().as_f64() + alfven;
    T::lit(0.5 * dx / speed.max(1.0))
}

/// Diagnostics recorded at every output instant.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TraceRecord {
    pub energy: EnergyReport,
    pub mass: f64,
    pub div_h: f64,
}

#[derive(Debug, Clone)]
pub struct Trace<T: Real = f64> {
    pub states: Vec<CompressibleState<T>>,
    pub records: Vec<TraceRecord>,
}

/// A run that stopped early. `last_valid` is the last state that passed
/// every check; `records` covers the outputs emitted before the failure.
#[derive(Debug, Clone)]
pub struct SimulationError<T: Real = f64> {
    pub error: Error,
    pub last_valid: CompressibleState<T>,
    pub records: Vec<TraceRecord>,
}

impl<T: Real> fmt::Display for SimulationError<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (last valid state at t = {})", self.error, self.last_valid.time)
    }
}

impl<T: Real> std::error::Error for SimulationError<T> {}

/// Number of steps and the adjusted step that lands exactly on `t_final`.
pub fn step_count(t_final: f64, dt: f64) -> Result<(usize, f64)> {
    if !(t_final >= 0.0 && t_final.is_finite()) || !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("final time {t_final} / step {dt}")));
    }
    if t_final == 0.0 {
        return Ok((0, dt));
    }
    let n = ((t_final / dt) - 1e-9).ceil().max(1.0) as usize;
    Ok((n, t_final / n as f64))
}

/// Runs to `t_final`, calling `observe` with the state and its record at
/// t = 0, every `output_stride` steps, and at the final time.
pub fn simulate_with<T: Real>(
    init: &CompressibleState<T>,
    p: &FluidParams,
    t_final: f64,
    dt: f64,
    output_stride: usize,
    mut observe: impl FnMut(&CompressibleState<T>, &TraceRecord),
) -> Result<Vec<TraceRecord>, Box<SimulationError<T>>> {
    let fail = |error: Error, last: &CompressibleState<T>, records: &[TraceRecord]| {
        Box::new(SimulationError { error, last_valid: last.clone(), records: records.to_vec() })
    };
    let setup = || -> Result<_> {
        let solver = CompressibleSolver::new(p, init)?;
        let (n, dt) = step_count(t_final, dt)?;
        if output_stride == 0 {
            return Err(Error::InvalidParameter("output stride must be at least 1".into()));
        }
        Ok((solver, n, dt))
    };
    let (solver, n, dt) = setup().map_err(|e| fail(e, init, &[]))?;
    let mut ledger = EnergyLedger::start(init, p);
    let record = |s: &CompressibleState<T>, ledger: &EnergyLedger| -> Result<TraceRecord> {
        Ok(TraceRecord { energy: energy_report(s, p, ledger)?, mass: s.rho.mean().as_f64(), div_h: s.div_h().as_f64() })
    };
    let mut records = Vec::new();
    let first = record(init, &ledger).map_err(|e| fail(e, init, &[]))?;
    observe(init, &first);
    records.push(first);

    let mut state = init.clone();
    let mut d_prev = first.energy.d;
    for i in 1..=n {
        let next = solver.step(&state, T::lit(dt)).map_err(|e| fail(e, &state, &records))?;
        let d = dissipation(&next, p).map_err(|e| fail(e, &state, &records))?.as_f64();
        ledger.cumulative_d += 0.5 * dt * (d_prev + d);
        d_prev = d;
        state = next;
        if i % output_stride == 0 || i == n {
            let r = record(&state, &ledger).map_err(|e| fail(e, &state, &records))?;
            observe(&state, &r);
            records.push(r);
        }
    }
    Ok(records)
}

/// [`simulate_with`], keeping every output state.
pub fn simulate<T: Real>(
    init: &CompressibleState<T>,
    p: &FluidParams,
    t_final: f64,
    dt: f64,
    output_stride: usize,
) -> Result<Trace<T>, Box<SimulationError<T>>> {
    let mut states = Vec::new();
    let records = simulate_with(init, p, t_final, dt, output_stride, |s, _| states.push(s.clone()))?;
    Ok(Trace { states, records })
}

/// Writes the time series as CSV.
pub fn write_records_csv(records: &[TraceRecord], path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "t,E,D,cumE_check,mass,divH,E_rel,cumD")?;
    for r in records {
        let e = &r.energy;
        writeln!(
            out,
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            e.time,
            e.e,
            e.d,
            e.e + e.cumulative_d,
            r.mass,
            r.div_h,
            e.e_rel,
            e.cumulative_d
        )?;
    }
    out.flush()?;
    Ok(())
}
