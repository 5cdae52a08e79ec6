//! Linearized dissipative acoustics with no-slip walls:
//! ∂tφ = −(1/ε) div m, ∂tm = −(b/ε)∇φ + μΔm + λ∇div m.
//!
//! Walls are handled by collocation on Lobatto nodes with m eliminated at
//! wall nodes. The Lobatto operators satisfy summation by parts, so the
//! semi-discrete energy Σ w(|φ|² + |m|²/b) is conserved without viscosity and
//! decays with it. The channel reduces to one wall-normal problem per
//! tangential wavenumber.

use std::collections::HashMap;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::geometry::{GeometryKind, WaveGrid};
use super::linalg::{expm, Lu, Mat};
use super::modes::NeumannMode;
use crate::error::{Error, Result};

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveParams {
    pub eps: f64,
    pub mu: f64,
    pub lam: f64,
    /// Wave coefficient b = aγ.
    pub b: f64,
}

impl WaveParams {
    pub fn new(eps: f64, mu: f64, lam: f64, a: f64, gamma: f64) -> Self {
        Self { eps, mu, lam, b: a * gamma }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidParameter(format!("ε must be positive, got {}", self.eps)));
        }
        if !(self.mu >= 0.0 && self.mu + self.lam >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need μ ≥ 0 and μ + λ ≥ 0, got μ = {}, λ = {}",
                self.mu, self.lam
            )));
        }
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(Error::InvalidParameter(format!("b must be positive, got {}", self.b)));
        }
        Ok(())
    }
}

/// Complex density fluctuation and momentum on a wave grid. The interval
/// uses only the first momentum component.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub time: f64,
    pub phi: Vec<C>,
    pub m: Vec<[C; 2]>,
}

impl WaveState {
    pub fn zeros(grid: &WaveGrid) -> Self {
        let z = C::new(0.0, 0.0);
        Self { time: 0.0, phi: vec![z; grid.len()], m: vec![[z; 2]; grid.len()] }
    }

    /// The zeroth-order eigenvector (Ψ, √b·m^±) of the wave operator.
    pub fn eigen(grid: &WaveGrid, mode: &NeumannMode, sign: f64, b: f64) -> Self {
        let mut s = Self::zeros(grid);
        for i in 0..grid.len() {
            s.phi[i] = C::new(mode.psi[i], 0.0);
            let mp = mode.m_pm(i, sign);
            s.m[i] = [mp[0] * b.sqrt(), mp[1] * b.sqrt()];
        }
        s
    }

    pub fn add_scaled(&mut self, other: &WaveState, c: C) {
        for (a, b) in self.phi.iter_mut().zip(&other.phi) {
            *a += c * b;
        }
        for (a, b) in self.m.iter_mut().zip(&other.m) {
            a[0] += c * b[0];
            a[1] += c * b[1];
        }
    }

    pub fn is_finite(&self) -> bool {
        self.phi.iter().all(|v| v.re.is_finite() && v.im.is_finite())
            && self.m.iter().all(|v| v.iter().all(|c| c.re.is_finite() && c.im.is_finite()))
    }
}

/// Σ w (|φ|² + |m|²/b), the quantity conserved by the inviscid flow.
pub fn wave_energy(grid: &WaveGrid, state: &WaveState, b: f64) -> f64 {
    (0..grid.len())
        .map(|i| {
            grid.weights[i] * (state.phi[i].norm_sqr() + (state.m[i][0].norm_sqr() + state.m[i][1].norm_sqr()) / b)
        })
        .sum()
}

fn interior(v: &[f64]) -> Vec<f64> {
    v[1..v.len() - 1].to_vec()
}

fn extend(v: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(v.len() + 2);
    out.push(0.0);
    out.extend_from_slice(v);
    out.push(0.0);
    out
}

/// Wall-normal generator at tangential wavenumber k. Unknowns are
/// [φ (all nodes), m̃_t (interior, only when `tangential`), m_n (interior)],
/// where m_t = i·m̃_t makes the operator real.
fn line_apply(d: &Mat, p: &WaveParams, k: f64, tangential: bool, x: &[f64]) -> Vec<f64> {
    let np = d.rows();
    let ni = np - 2;
    let phi = &x[..np];
    let (mt, mn) =
        if tangential { (extend(&x[np..np + ni]), extend(&x[np + ni..])) } else { (vec![0.0; np], extend(&x[np..])) };
    let dmn = d.matvec(&mn);
    let div: Vec<f64> = dmn.iter().zip(&mt).map(|(a, t)| a - k * t).collect();
    let dphi = d.matvec(phi);
    let ddiv = d.matvec(&div);
    let ddmn = d.matvec(&dmn);
    let inv = 1.0 / p.eps;
    let mut out = Vec::with_capacity(x.len());
    out.extend(div.iter().map(|v| -inv * v));
    if tangential {
        let ddmt = d.matvec(&d.matvec(&mt));
        let rhs: Vec<f64> =
            (0..np).map(|i| -p.b * inv * k * phi[i] + p.mu * (ddmt[i] - k * k * mt[i]) + p.lam * k * div[i]).collect();
        out.extend(interior(&rhs));
    }
    let rhs: Vec<f64> =
        (0..np).map(|i| -p.b * inv * dphi[i] + p.mu * (ddmn[i] - k * k * mn[i]) + p.lam * ddiv[i]).collect();
    out.extend(interior(&rhs));
    out
}

/// Full two-dimensional generator on the rectangle. Unknowns are
/// [φ (all nodes), m_x (interior), m_y (interior)].
fn rect_apply(grid: &WaveGrid, p: &WaveParams, x: &[f64]) -> Vec<f64> {
    let n = grid.len();
    let inner: Vec<usize> = (0..n).filter(|&i| !grid.on_wall(i)).collect();
    let ni = inner.len();
    let phi = &x[..n];
    let mut mx = vec![0.0; n];
    let mut my = vec![0.0; n];
    for (j, &i) in inner.iter().enumerate() {
        mx[i] = x[n + j];
        my[i] = x[n + ni + j];
    }
    let div: Vec<f64> = grid.dx(&mx).iter().zip(grid.dy(&my)).map(|(a, b)| a + b).collect();
    let lap =
        |f: &[f64]| -> Vec<f64> { grid.dx(&grid.dx(f)).iter().zip(grid.dy(&grid.dy(f))).map(|(a, b)| a + b).collect() };
    let (lx, ly) = (lap(&mx), lap(&my));
    let (px, py) = (grid.dx(phi), grid.dy(phi));
    let (gx, gy) = (grid.dx(&div), grid.dy(&div));
    let inv = 1.0 / p.eps;
    let mut out = Vec::with_capacity(x.len());
    out.extend(div.iter().map(|v| -inv * v));
    out.extend(inner.iter().map(|&i| -p.b * inv * px[i] + p.mu * lx[i] + p.lam * gx[i]));
    out.extend(inner.iter().map(|&i| -p.b * inv * py[i] + p.mu * ly[i] + p.lam * gy[i]));
    out
}

fn assemble(size: usize, apply: impl Fn(&[f64]) -> Vec<f64>) -> Mat {
    let mut a = Mat::zeros(size, size);
    let mut e = vec![0.0; size];
    for j in 0..size {
        e[j] = 1.0;
        let col = apply(&e);
        for (i, v) in col.into_iter().enumerate() {
            a[(i, j)] = v;
        }
        e[j] = 0.0;
    }
    a
}

fn apply_real(p: &Mat, x: &[C]) -> Vec<C> {
    let re: Vec<f64> = x.iter().map(|v| v.re).collect();
    let im: Vec<f64> = x.iter().map(|v| v.im).collect();
    p.matvec(&re).into_iter().zip(p.matvec(&im)).map(|(a, b)| C::new(a, b)).collect()
}

/// One-step propagators for a fixed grid, parameter set and time step.
#[derive(Debug, Clone)]
pub struct WavePropagator {
    grid: WaveGrid,
    params: WaveParams,
    dt: f64,
    /// Per |k| for the channel, a single entry for the other geometries.
    steps: HashMap<usize, Mat>,
}

impl WavePropagator {
    pub fn new(grid: &WaveGrid, params: WaveParams, dt: f64) -> Result<Self> {
        params.validate()?;
        grid.geometry.check_resolution(params.eps, params.mu)?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
        }
        Ok(Self { grid: grid.clone(), params, dt, steps: HashMap::new() })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn line_step(&mut self, k: usize) -> Result<&Mat> {
        if !self.steps.contains_key(&k) {
            let d = &self.grid.lobatto.diff;
            let np = d.rows();
            let tangential = self.grid.geometry.kind == GeometryKind::Channel;
            let size = np + (np - 2) * if tangential { 2 } else { 1 };
            let p = self.params;
            let a = assemble(size, |x| line_apply(d, &p, k as f64, tangential, x));
            let prop = expm(&a.scale(self.dt))?;
            self.steps.insert(k, prop);
        }
        Ok(&self.steps[&k])
    }

    fn rect_step(&mut self) -> Result<&Mat> {
        if !self.steps.contains_key(&0) {
            let n = self.grid.len();
            let ni = (0..n).filter(|&i| !self.grid.on_wall(i)).count();
            let size = n + 2 * ni;
            let p = self.params;
            let grid = &self.grid;
            let a = assemble(size, |x| rect_apply(grid, &p, x));
            let id = Mat::identity(size);
            let half = 0.5 * self.dt;
            let lu = Lu::new(&id.add_scaled(&a, -half))?;
            let prop = lu.solve_mat(&id.add_scaled(&a, half));
            self.steps.insert(0, prop);
        }
        Ok(&self.steps[&0])
    }

    /// Advances the state by one step in place.
    pub fn step(&mut self, state: &mut WaveState) -> Result<()> {
        match self.grid.geometry.kind {
            GeometryKind::Interval => {
                let np = self.grid.len();
                let mut x: Vec<C> = state.phi.clone();
                x.extend(state.m[1..np - 1].iter().map(|m| m[0]));
                let y = apply_real(self.line_step(0)?, &x);
                state.phi.copy_from_slice(&y[..np]);
                state.m[0][0] = C::new(0.0, 0.0);
                state.m[np - 1][0] = C::new(0.0, 0.0);
                for (i, v) in y[np..].iter().enumerate() {
                    state.m[i + 1][0] = *v;
                }
            }
            GeometryKind::Rectangle => {
                let n = self.grid.len();
                let inner: Vec<usize> = (0..n).filter(|&i| !self.grid.on_wall(i)).collect();
                let mut x: Vec<C> = state.phi.clone();
                x.extend(inner.iter().map(|&i| state.m[i][0]));
                x.extend(inner.iter().map(|&i| state.m[i][1]));
                let y = apply_real(self.rect_step()?, &x);
                state.phi.copy_from_slice(&y[..n]);
                for m in state.m.iter_mut() {
                    *m = [C::new(0.0, 0.0); 2];
                }
                let ni = inner.len();
                for (j, &i) in inner.iter().enumerate() {
                    state.m[i] = [y[n + j], y[n + ni + j]];
                }
            }
            GeometryKind::Channel => self.channel_step(state)?,
        }
        state.time += self.dt;
        if !state.is_finite() {
            return Err(Error::NonFinite { time: state.time });
        }
        Ok(())
    }

    fn channel_step(&mut self, state: &mut WaveState) -> Result<()> {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let half = nx / 2;
        let two_pi = 2.0 * std::f64::consts::PI;
        let scale = state.phi.iter().chain(state.m.iter().flat_map(|m| m.iter())).fold(0.0f64, |a, v| a.max(v.norm()));
        let mut out = WaveState { time: state.time, ..WaveState::zeros(&self.grid) };
        for kk in -(half as i64 - 1)..=(half as i64 - 1) {
            // f_k(y) = (1/nx) Σ_x field · e^{−ikx}
            let tw: Vec<C> = (0..nx)
                .map(|ix| C::from_polar(1.0 / nx as f64, -two_pi * (kk * ix as i64) as f64 / nx as f64))
                .collect();
            let coef = |get: &dyn Fn(usize) -> C| -> Vec<C> {
                (0..ny).map(|iy| (0..nx).map(|ix| tw[ix] * get(ix * ny + iy)).sum()).collect()
            };
            let fphi = coef(&|i| state.phi[i]);
            let fx = coef(&|i| state.m[i][0]);
            let fy = coef(&|i| state.m[i][1]);
            let size = fphi.iter().chain(&fx).chain(&fy).fold(0.0f64, |a, v| a.max(v.norm()));
            if size <= 1e-14 * scale {
                continue;
            }
            let s = if kk < 0 { -1.0 } else { 1.0 };
            // m_t = i·s·m̃ with s = sign(k), so the k and −k systems coincide
            let to_tilde = C::new(0.0, -s);
            let mut x = fphi.clone();
            x.extend(fx[1..ny - 1].iter().map(|v| to_tilde * v));
            x.extend_from_slice(&fy[1..ny - 1]);
            let y = apply_real(self.line_step(kk.unsigned_abs() as usize)?, &x);
            let ni = ny - 2;
            let from_tilde = C::new(0.0, s);
            for ix in 0..nx {
                let e = C::from_polar(1.0, two_pi * (kk * ix as i64) as f64 / nx as f64);
                for iy in 0..ny {
                    let i = ix * ny + iy;
                    out.phi[i] += e * y[iy];
                    if iy > 0 && iy < ny - 1 {
                        out.m[i][0] += e * from_tilde * y[ny + iy - 1];
                        out.m[i][1] += e * y[ny + ni + iy - 1];
                    }
                }
            }
        }
        state.phi = out.phi;
        state.m = out.m;
        Ok(())
    }
}

/// Recorded states (every `stride` steps, first and last always included)
/// and the energy after every step.
#[derive(Debug, Clone)]
pub struct WaveTrace {
    pub states: Vec<WaveState>,
    pub energies: Vec<f64>,
    pub b: f64,
}

impl WaveTrace {
    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.time).collect()
    }

    /// Largest step-to-step energy increase relative to the initial energy.
    pub fn max_energy_increase(&self) -> f64 {
        let e0 = self.energies[0].max(f64::MIN_POSITIVE);
        self.energies.windows(2).map(|w| (w[1] - w[0]) / e0).fold(f64::NEG_INFINITY, f64::max)
    }

    /// max_t |E(t)/E(0) − 1|.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.energies[0].max(f64::MIN_POSITIVE);
        self.energies.iter().map(|e| (e / e0 - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// Runs to `t_final` with the step adjusted to land on it exactly, calling
/// `observe` on the initial state and after every step.
pub fn simulate_linear_waves_with(
    grid: &WaveGrid,
    params: WaveParams,
    init: &WaveState,
    t_final: f64,
    dt: f64,
    mut observe: impl FnMut(&WaveState),
) -> Result<()> {
    if !(t_final > 0.0) {
        return Err(Error::InvalidParameter(format!("horizon must be positive, got {t_final}")));
    }
    let steps = (t_final / dt - 1e-9).ceil().max(1.0) as usize;
    let mut prop = WavePropagator::new(grid, params, t_final / steps as f64)?;
    let mut state = init.clone();
    observe(&state);
    for _ in 0..steps {
        prop.step(&mut state)?;
        observe(&state);
    }
    Ok(())
}

pub fn simulate_linear_waves(
    grid: &WaveGrid,
    params: WaveParams,
    init: &WaveState,
    t_final: f64,
    dt: f64,
    stride: usize,
) -> Result<WaveTrace> {
    let stride = stride.max(1);
    let mut states = Vec::new();
    let mut energies = Vec::new();
    let mut count = 0usize;
    let mut last: Option<WaveState> = None;
    simulate_linear_waves_with(grid, params, init, t_final, dt, |s| {
        energies.push(wave_energy(grid, s, params.b));
        if count.is_multiple_of(stride) {
            states.push(s.clone());
            last = None;
        } else {
            last = Some(s.clone());
        }
        count += 1;
    })?;
    if let Some(s) = last {
        states.push(s);
    }
    Ok(WaveTrace { states, energies, b: params.b })
}
