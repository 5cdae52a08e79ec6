//! Helmholtz–Leray decomposition v = Pv + Qv.

use rustfft::num_complex::Complex;

use super::field::{ScalarField, VectorField};
use crate::scalar::Real;

/// Splits `v` into its divergence-free part `Pv` and gradient part `Qv`.
///
/// The zero mode (the mean) is divergence-free and goes to `Pv`, so `Qv` has
/// zero mean. Modes whose odd-derivative wavevector vanishes (pure Nyquist
/// modes) are also kept in `Pv`, which makes `div Pv = 0` hold exactly for the
/// spectral divergence.
pub fn helmholtz_project<T: Real>(v: &VectorField<T>) -> (VectorField<T>, VectorField<T>) {
    let q = gradient_part(v);
    let p = v.sub(&q).expect("same grid");
    (p, q)
}

/// `Qv` alone.
pub fn gradient_part<T: Real>(v: &VectorField<T>) -> VectorField<T> {
    let grid = v.grid().clone();
    let dim = v.dim();
    let spectra: Vec<&[Complex<T>]> = v.components().iter().map(|c| c.spectrum()).collect();
    let mut out: Vec<Vec<Complex<T>>> = vec![Vec::with_capacity(grid.len()); dim];
    for i in 0..grid.len() {
        let k = grid.k_vector_odd(i);
        let k2: T = k[..dim].iter().fold(T::zero(), |s, &x| s + x * x);
        if k2 == T::zero() {
            for o in out.iter_mut() {
                o.push(Complex::new(T::zero(), T::zero()));
            }
            continue;
        }
        let mut kv = Complex::new(T::zero(), T::zero());
        for a in 0..dim {
            kv += spectra[a][i] * k[a];
        }
        let kv = kv / k2;
        for a in 0..dim {
            out[a].push(kv * k[a]);
        }
    }
    VectorField::new(out.into_iter().map(|c| ScalarField::from_spectrum(&grid, c)).collect()).expect("same grid")
}

/// `Pv` alone.
pub fn solenoidal_part<T: Real>(v: &VectorField<T>) -> VectorField<T> {
    helmholtz_project(v).0
}

/// Potential ψ with `Qv = ∇ψ` and zero mean.
pub fn gradient_potential<T: Real>(v: &VectorField<T>) -> ScalarField<T> {
    super::calculus::inverse_laplacian(&super::calculus::divergence(v))
}
