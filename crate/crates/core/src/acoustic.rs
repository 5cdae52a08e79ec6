//! The acoustic wave group e^{tL}, L(φ, v) = −(div v, b∇φ), on the torus.
//!
//! The group is applied exactly in Fourier space: for every wavevector k ≠ 0
//! the pair (φ̂_k, k̂·v̂_k) rotates at frequency √b·|k|, while the transverse
//! part of v and the mean momentum are left untouched. Because no time
//! stepping is involved, the same routine serves as the stiff propagator in
//! the compressible solver at frequencies of order 1/ε.

use rustfft::num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{sobolev_norm_sq, ScalarField, VectorField};

/// Density-fluctuation / momentum pair acted on by the wave group.
#[derive(Clone, Debug)]
pub struct AcousticPair<T: Real = f64> {
    pub phi: ScalarField<T>,
    pub m: VectorField<T>,
}

impl<T: Real> AcousticPair<T> {
    /// Checks that the grids agree and that `phi` has zero mean.
    pub fn new(phi: ScalarField<T>, m: VectorField<T>) -> Result<Self> {
        phi.check_same_grid(m.component(0))?;
        let tol = T::lit(1e-9) * (T::one() + phi.max_abs());
        if phi.mean().abs() > tol {
            return Err(Error::InvalidParameter(format!(
                "density slot has mean {:e}; the wave group acts on zero-mean fluctuations",
                phi.mean()
            )));
        }
        Ok(Self { phi, m })
    }

    pub fn zeros_like(&self) -> Self {
        Self { phi: ScalarField::zeros(self.phi.grid()), m: VectorField::zeros(self.phi.grid()) }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self { phi: self.phi.sub(&other.phi)?, m: self.m.sub(&other.m)? })
    }
}

/// Sound-speed-squared coefficient b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupParams<T: Real = f64> {
    pub b: T,
}

impl<T: Real> GroupParams<T> {
    pub fn new(b: T) -> Result<Self> {
        if !(b > T::zero() && b.is_finite()) {
            return Err(Error::InvalidParameter(format!("wave coefficient b = {b} must be positive")));
        }
        Ok(Self { b })
    }

    /// b = aγ ρ̄^{γ−1} for the pressure law p = aρ^γ linearized at ρ̄.
    pub fn from_pressure_law(a: T, gamma: T, rho_bar: T) -> Result<Self> {
        Self::new(a * gamma * rho_bar.powf(gamma - T::one()))
    }
}

/// (‖φ‖²_{H^s} + ‖v‖²_{H^s}/b)^{1/2}, the norm in which the group is an isometry.
pub fn pair_norm<T: Real>(pair: &AcousticPair<T>, s: T, b: T) -> T {
    let m2 = pair.m.components().iter().fold(T::zero(), |acc, c| acc + sobolev_norm_sq(c, s));
    (sobolev_norm_sq(&pair.phi, s) + m2 / b).sqrt()
}

/// e^{tL} applied to `pair`.
pub fn apply_group<T: Real>(pair: &AcousticPair<T>, t: T, gp: &GroupParams<T>) -> Result<AcousticPair<T>> {
    if !(gp.b > T::zero()) {
        return Err(Error::InvalidParameter(format!("wave coefficient b = {} must be positive", gp.b)));
    }
    pair.phi.check_same_grid(pair.m.component(0))?;
    let grid = pair.phi.grid().clone();
    let dim = grid.dim();
    let sqrt_b = gp.b.sqrt();
    let phi_hat = pair.phi.spectrum();
    let m_hat: Vec<&[Complex<T>]> = pair.m.components().iter().map(|c| c.spectrum()).collect();

    let mut phi_out = Vec::with_capacity(grid.len());
    let mut m_out: Vec<Vec<Complex<T>>> = vec![Vec::with_capacity(grid.len()); dim];
    for i in 0..grid.len() {
        let k = grid.k_vector_odd(i);
        let kn = k[..dim].iter().fold(T::zero(), |s, &x| s + x * x).sqrt();
        if kn == T::zero() {
            phi_out.push(phi_hat[i]);
            for a in 0..dim {
                m_out[a].push(m_hat[a][i]);
            }
            continue;
        }
        let mut long = Complex::new(T::zero(), T::zero());
        for a in 0..dim {
            long += m_hat[a][i] * (k[a] / kn);
        }
        let (s, c) = (sqrt_b * kn * t).sin_cos();
        let minus_i = Complex::new(T::zero(), -T::one());
        let phi_new = phi_hat[i] * c + minus_i * long * (s / sqrt_b);
        let long_new = long * c + minus_i * phi_hat[i] * (s * sqrt_b);
        phi_out.push(phi_new);
        let dl = long_new - long;
        for a in 0..dim {
            m_out[a].push(m_hat[a][i] + dl * (k[a] / kn));
        }
    }
    Ok(AcousticPair {
        phi: ScalarField::from_spectrum(&grid, phi_out),
        m: VectorField::new(m_out.into_iter().map(|c| ScalarField::from_spectrum(&grid, c)).collect())?,
    })
}

/// Removes the fast acoustic rotation accumulated up to time `t`:
/// e^{−(t/ε)L} applied to the pair observed at `t`.
pub fn filter<T: Real>(pair_at_t: &AcousticPair<T>, t: T, eps: T, gp: &GroupParams<T>) -> Result<AcousticPair<T>> {
    if !(eps > T::zero()) {
        return Err(Error::InvalidParameter(format!("eps = {eps} must be positive")));
    }
    apply_group(pair_at_t, -t / eps, gp)
}

/// Relative change of [`pair_norm`] under e^{tL}.
pub fn isometry_defect<T: Real>(pair: &AcousticPair<T>, t: T, s: T, gp: &GroupParams<T>) -> Result<T> {
    let before = pair_norm(pair, s, gp.b);
    if before == T::zero() {
        return Err(Error::InvalidParameter("isometry defect of a zero pair".into()));
    }
    let after = pair_norm(&apply_group(pair, t, gp)?, s, gp.b);
    Ok((after - before).abs() / before)
}
