use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::params::FluidParams;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{divergence, Grid, GridSpec, ScalarField, VectorField};

/// Density, velocity and magnetic field at time `time`.
#[derive(Clone, Debug)]
pub struct CompressibleState<T: Real = f64> {
    pub rho: ScalarField<T>,
    pub u: VectorField<T>,
    pub h: VectorField<T>,
    pub time: T,
}

impl<T: Real> CompressibleState<T> {
    pub fn new(rho: ScalarField<T>, u: VectorField<T>, h: VectorField<T>, time: T) -> Result<Self> {
        rho.check_same_grid(u.component(0))?;
        u.check_same_grid(&h)?;
        Ok(Self { rho, u, h, time })
    }

    /// Uniform density `rho_bar`, fluid at rest, no field.
    pub fn equilibrium(grid: &Arc<Grid<T>>, rho_bar: T) -> Self {
        Self {
            rho: ScalarField::constant(grid, rho_bar),
            u: VectorField::zeros(grid),
            h: VectorField::zeros(grid),
            time: T::zero(),
        }
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        self.rho.grid()
    }

    pub fn rho_bar(&self) -> T {
        self.rho.mean()
    }

    pub fn momentum(&self) -> VectorField<T> {
        self.u.mul_scalar(&self.rho).expect("state fields share a grid")
    }

    /// L² norm of div H.
    pub fn div_h(&self) -> T {
        divergence(&self.h).values().iter().fold(T::zero(), |s, &v| s + v * v).sqrt() * self.grid().cell_volume().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.rho.is_finite() && self.u.is_finite() && self.h.is_finite()
    }

    pub fn fluctuation(&self, eps: T) -> FluctuationView<T> {
        let rho_bar = self.rho_bar();
        FluctuationView { phi: self.rho.map(|r| (r - rho_bar) / eps), m: self.momentum(), rho_bar }
    }
}

/// Density fluctuation φ = (ρ − ρ̄)/ε and momentum m = ρu.
#[derive(Clone, Debug)]
pub struct FluctuationView<T: Real = f64> {
    pub phi: ScalarField<T>,
    pub m: VectorField<T>,
    pub rho_bar: T,
}

/// Fields in the unscaled variables: ρ̃ = ρ, ũ = εu, H̃ = εH, t̃ = t/ε.
#[derive(Clone, Debug)]
pub struct OriginalSnapshot<T: Real = f64> {
    pub rho: ScalarField<T>,
    pub u: VectorField<T>,
    pub h: VectorField<T>,
    pub time: T,
}

pub fn rescale_to_original<T: Real>(state: &CompressibleState<T>, eps: T) -> OriginalSnapshot<T> {
    OriginalSnapshot { rho: state.rho.clone(), u: state.u.scale(eps), h: state.h.scale(eps), time: state.time / eps }
}

/// Splits u into the parts where |ρ − 1| ≤ 1/2 and where |ρ − 1| > 1/2.
pub fn velocity_split<T: Real>(state: &CompressibleState<T>) -> (VectorField<T>, VectorField<T>) {
    let half = T::lit(0.5);
    let near = state.rho.map(|r| if (r - T::one()).abs() <= half { T::one() } else { T::zero() });
    let far = near.map(|c| T::one() - c);
    (state.u.mul_scalar(&near).expect("same grid"), state.u.mul_scalar(&far).expect("same grid"))
}

/// Structured-text snapshot of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub grid: GridSpec,
    pub params: FluidParams,
    pub time: f64,
    pub rho: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    pub h: Vec<Vec<f64>>,
}

fn to_f64<T: Real>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| x.as_f64()).collect()
}

fn from_f64<T: Real>(v: &[f64]) -> Vec<T> {
    v.iter().map(|&x| T::lit(x)).collect()
}

impl Checkpoint {
    pub fn capture<T: Real>(state: &CompressibleState<T>, params: &FluidParams) -> Self {
        Self {
            grid: state.grid().spec().clone(),
            params: params.clone(),
            time: state.time.as_f64(),
            rho: to_f64(state.rho.values()),
            u: state.u.components().iter().map(|c| to_f64(c.values())).collect(),
            h: state.h.components().iter().map(|c| to_f64(c.values())).collect(),
        }
    }

    pub fn restore<T: Real>(&self) -> Result<CompressibleState<T>> {
        let grid = Grid::<T>::new(self.grid.clone())?;
        let vector = |comps: &[Vec<f64>]| -> Result<VectorField<T>> {
            VectorField::new(comps.iter().map(|c| ScalarField::from_values(&grid, from_f64(c))).collect::<Result<_>>()?)
        };
        CompressibleState::new(
            ScalarField::from_values(&grid, from_f64(&self.rho))?,
            vector(&self.u)?,
            vector(&self.h)?,
            T::lit(self.time),
        )
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }
}
