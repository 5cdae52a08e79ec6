//! Spectral derivatives and dealiased products.
//!
//! All derivatives are exact on band-limited data. Odd derivatives drop the
//! Nyquist mode so that results stay real.

use rustfft::num_complex::Complex;

use super::field::{ScalarField, VectorField};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Applies a Fourier multiplier `c_k -> m(flat, c_k)`.
pub fn apply_multiplier<T: Real>(f: &ScalarField<T>, m: impl Fn(usize, Complex<T>) -> Complex<T>) -> ScalarField<T> {
    let coeffs = f.spectrum().iter().enumerate().map(|(i, &c)| m(i, c)).collect();
    ScalarField::from_spectrum(f.grid(), coeffs)
}

#[inline]
fn times_ik<T: Real>(k: T, c: Complex<T>) -> Complex<T> {
    Complex::new(-k * c.im, k * c.re)
}

/// ∂f/∂x_axis.
pub fn partial<T: Real>(f: &ScalarField<T>, axis: usize) -> ScalarField<T> {
    let grid = f.grid().clone();
    apply_multiplier(f, |i, c| times_ik(grid.k_vector_odd(i)[axis], c))
}

pub fn gradient<T: Real>(f: &ScalarField<T>) -> VectorField<T> {
    let dim = f.grid().dim();
    VectorField::from_components_unchecked((0..dim).map(|a| partial(f, a)).collect())
}

pub fn divergence<T: Real>(v: &VectorField<T>) -> ScalarField<T> {
    let grid = v.grid().clone();
    let spectra: Vec<&[Complex<T>]> = v.components().iter().map(|c| c.spectrum()).collect();
    let coeffs = (0..grid.len())
        .map(|i| {
            let k = grid.k_vector_odd(i);
            spectra
                .iter()
                .enumerate()
                .fold(Complex::new(T::zero(), T::zero()), |acc, (a, s)| acc + times_ik(k[a], s[i]))
        })
        .collect();
    ScalarField::from_spectrum(&grid, coeffs)
}

pub fn laplacian<T: Real>(f: &ScalarField<T>) -> ScalarField<T> {
    let grid = f.grid().clone();
    apply_multiplier(f, |i, c| c * (-grid.k2()[i]))
}

pub fn vector_laplacian<T: Real>(v: &VectorField<T>) -> VectorField<T> {
    v.map_components(laplacian)
}

/// Zero-mean solution of Δφ = f (the mean of `f` is ignored).
pub fn inverse_laplacian<T: Real>(f: &ScalarField<T>) -> ScalarField<T> {
    let grid = f.grid().clone();
    apply_multiplier(f, |i, c| {
        let k2 = grid.k2()[i];
        if k2 > T::zero() {
            c * (-T::one() / k2)
        } else {
            Complex::new(T::zero(), T::zero())
        }
    })
}

/// Truncates to the 2/3-rule band.
pub fn dealias<T: Real>(f: &ScalarField<T>) -> ScalarField<T> {
    let grid = f.grid().clone();
    apply_multiplier(f, |i, c| if grid.keep_mask()[i] { c } else { Complex::new(T::zero(), T::zero()) })
}

pub fn dealias_vector<T: Real>(v: &VectorField<T>) -> VectorField<T> {
    v.map_components(dealias)
}

/// Curl-type quantity: a scalar (out-of-plane component) in 2D, a vector in 3D.
#[derive(Clone, Debug)]
pub enum Curl<T: Real = f64> {
    Scalar(ScalarField<T>),
    Vector(VectorField<T>),
}

impl<T: Real> Curl<T> {
    pub fn components(&self) -> &[ScalarField<T>] {
        match self {
            Curl::Scalar(s) => std::slice::from_ref(s),
            Curl::Vector(v) => v.components(),
        }
    }

    /// Pointwise squared magnitude.
    pub fn norm_sq_pointwise(&self) -> ScalarField<T> {
        match self {
            Curl::Scalar(s) => s.mul(s).expect("same grid"),
            Curl::Vector(v) => v.norm_sq_pointwise(),
        }
    }

    /// ∫ a·b dx.
    pub fn dot(&self, other: &Curl<T>) -> Result<T> {
        let mut s = T::zero();
        if self.components().len() != other.components().len() {
            return Err(Error::GridMismatch);
        }
        for (a, b) in self.components().iter().zip(other.components()) {
            s += a.dot(b)?;
        }
        Ok(s)
    }

    pub fn map_components(&self, f: impl Fn(&ScalarField<T>) -> ScalarField<T>) -> Self {
        match self {
            Curl::Scalar(s) => Curl::Scalar(f(s)),
            Curl::Vector(v) => Curl::Vector(v.map_components(f)),
        }
    }
}

pub fn curl<T: Real>(v: &VectorField<T>) -> Result<Curl<T>> {
    match v.dim() {
        2 => {
            let dvy_dx = partial(v.component(1), 0);
            let dvx_dy = partial(v.component(0), 1);
            Ok(Curl::Scalar(dvy_dx.sub(&dvx_dy)?))
        }
        3 => {
            let d = |c: usize, a: usize| partial(v.component(c), a);
            Ok(Curl::Vector(VectorField::from_components_unchecked(vec![
                d(2, 1).sub(&d(1, 2))?,
                d(0, 2).sub(&d(2, 0))?,
                d(1, 0).sub(&d(0, 1))?,
            ])))
        }
        n => Err(Error::Unsupported(format!("curl in {n} dimensions"))),
    }
}

/// Curl of a curl-type quantity, giving a vector field.
/// In 2D, ∇×(w ẑ) = (∂_y w, −∂_x w).
pub fn curl_of<T: Real>(w: &Curl<T>) -> Result<VectorField<T>> {
    match w {
        Curl::Scalar(s) => {
            let dy = partial(s, 1);
            let dx = partial(s, 0).scale(-T::one());
            Ok(VectorField::from_components_unchecked(vec![dy, dx]))
        }
        Curl::Vector(v) => match curl(v)? {
            Curl::Vector(c) => Ok(c),
            Curl::Scalar(_) => unreachable!("3D curl is a vector"),
        },
    }
}

/// Pointwise a × b (scalar out-of-plane component in 2D).
pub fn cross<T: Real>(a: &VectorField<T>, b: &VectorField<T>) -> Result<Curl<T>> {
    a.check_same_grid(b)?;
    let (ac, bc) = (a.components(), b.components());
    match a.dim() {
        2 => Ok(Curl::Scalar(ac[0].mul(&bc[1])?.sub(&ac[1].mul(&bc[0])?)?)),
        3 => {
            let c = |i: usize, j: usize| -> Result<ScalarField<T>> { ac[i].mul(&bc[j])?.sub(&ac[j].mul(&bc[i])?) };
            Ok(Curl::Vector(VectorField::from_components_unchecked(vec![c(1, 2)?, c(2, 0)?, c(0, 1)?])))
        }
        n => Err(Error::Unsupported(format!("cross product in {n} dimensions"))),
    }
}

/// Pointwise w × b for a curl-type `w`. In 2D, (w ẑ) × b = (−w b_y, w b_x).
pub fn cross_curl<T: Real>(w: &Curl<T>, b: &VectorField<T>) -> Result<VectorField<T>> {
    match w {
        Curl::Scalar(s) => {
            let bc = b.components();
            Ok(VectorField::from_components_unchecked(vec![s.mul(&bc[1])?.scale(-T::one()), s.mul(&bc[0])?]))
        }
        Curl::Vector(v) => match cross(v, b)? {
            Curl::Vector(c) => Ok(c),
            Curl::Scalar(_) => unreachable!("3D cross product is a vector"),
        },
    }
}

/// Product of two fields with 2/3-rule truncation on inputs and output.
pub fn product<T: Real>(a: &ScalarField<T>, b: &ScalarField<T>) -> Result<ScalarField<T>> {
    Ok(dealias(&dealias(a).mul(&dealias(b))?))
}

/// Tensor divergence ∂_j (a_i b_j), dealiased.
pub fn div_outer<T: Real>(a: &VectorField<T>, b: &VectorField<T>) -> Result<VectorField<T>> {
    a.check_same_grid(b)?;
    let ad = dealias_vector(a);
    let bd = dealias_vector(b);
    let dim = a.dim();
    let grid = a.grid().clone();
    let mut out = Vec::with_capacity(dim);
    for i in 0..dim {
        let fluxes: Vec<ScalarField<T>> =
            (0..dim).map(|j| ad.component(i).mul(bd.component(j))).collect::<Result<_>>()?;
        let spectra: Vec<&[Complex<T>]> = fluxes.iter().map(|f| f.spectrum()).collect();
        let coeffs = (0..grid.len())
            .map(|n| {
                if !grid.keep_mask()[n] {
                    return Complex::new(T::zero(), T::zero());
                }
                let k = grid.k_vector_odd(n);
                spectra
                    .iter()
                    .enumerate()
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (j, s)| acc + times_ik(k[j], s[n]))
            })
            .collect();
        out.push(ScalarField::from_spectrum(&grid, coeffs));
    }
    Ok(VectorField::from_components_unchecked(out))
}
