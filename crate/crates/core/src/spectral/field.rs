use std::sync::{Arc, OnceLock};

use rustfft::num_complex::Complex;

use super::grid::Grid;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Real periodic field sampled on a [`Grid`], with its Fourier coefficients
/// computed on first use and cached.
#[derive(Clone)]
pub struct ScalarField<T: Real = f64> {
    grid: Arc<Grid<T>>,
    values: Vec<T>,
    spectrum: OnceLock<Vec<Complex<T>>>,
}

impl<T: Real> std::fmt::Debug for ScalarField<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField").field("grid", self.grid.spec()).finish_non_exhaustive()
    }
}

impl<T: Real> ScalarField<T> {
    pub fn from_values(grid: &Arc<Grid<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!("{} samples for a grid of {} points", values.len(), grid.len())));
        }
        Ok(Self { grid: Arc::clone(grid), values, spectrum: OnceLock::new() })
    }

    pub fn zeros(grid: &Arc<Grid<T>>) -> Self {
        Self::constant(grid, T::zero())
    }

    pub fn constant(grid: &Arc<Grid<T>>, c: T) -> Self {
        Self { grid: Arc::clone(grid), values: vec![c; grid.len()], spectrum: OnceLock::new() }
    }

    /// Samples `f(x)` at every grid point.
    pub fn from_fn(grid: &Arc<Grid<T>>, f: impl Fn([T; 3]) -> T) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self { grid: Arc::clone(grid), values, spectrum: OnceLock::new() }
    }

    /// Builds a field from Fourier coefficients. Only the Hermitian part is
    /// kept, so the result is the real part of the synthesized field.
    pub fn from_spectrum(grid: &Arc<Grid<T>>, coeffs: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        let coeffs = grid.hermitian_part(&coeffs);
        let mut buf = coeffs.clone();
        grid.inverse_in_place(&mut buf);
        let values = buf.into_iter().map(|c| c.re).collect();
        let spectrum = OnceLock::new();
        let _ = spectrum.set(coeffs);
        Self { grid: Arc::clone(grid), values, spectrum }
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn spectrum(&self) -> &[Complex<T>] {
        self.spectrum.get_or_init(|| self.grid.forward(&self.values))
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&v| f(v)).collect(),
            spectrum: OnceLock::new(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
            spectrum: OnceLock::new(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| v * c)
    }

    pub fn shift(&self, c: T) -> Self {
        self.map(|v| v + c)
    }

    /// Spatial mean (the zero mode).
    pub fn mean(&self) -> T {
        self.spectrum()[0].re
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Trapezoid quadrature ∫ f dx (exact for band-limited f).
    pub fn integral(&self) -> T {
        self.sum() * self.grid.cell_volume()
    }

    fn sum(&self) -> T {
        // Kahan summation
        let mut s = T::zero();
        let mut c = T::zero();
        for &v in &self.values {
            let y = v - c;
            let t = s + y;
            c = (t - s) - y;
            s = t;
        }
        s
    }

    /// L² inner product ∫ f g dx.
    pub fn dot(&self, other: &Self) -> Result<T> {
        self.check_same_grid(other)?;
        let mut s = T::zero();
        for (&a, &b) in self.values.iter().zip(&other.values) {
            s += a * b;
        }
        Ok(s * self.grid.cell_volume())
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// `dim`-component vector field on a shared grid.
#[derive(Clone, Debug)]
pub struct VectorField<T: Real = f64> {
    components: Vec<ScalarField<T>>,
}

impl<T: Real> VectorField<T> {
    pub fn new(components: Vec<ScalarField<T>>) -> Result<Self> {
        let first = components.first().ok_or_else(|| Error::InvalidGrid("vector field without components".into()))?;
        if components.len() != first.grid().dim() {
            return Err(Error::InvalidGrid(format!(
                "{} components on a {}-dimensional grid",
                components.len(),
                first.grid().dim()
            )));
        }
        for c in &components[1..] {
            first.check_same_grid(c)?;
        }
        Ok(Self { components })
    }

    pub fn zeros(grid: &Arc<Grid<T>>) -> Self {
        Self { components: (0..grid.dim()).map(|_| ScalarField::zeros(grid)).collect() }
    }

    pub fn constant(grid: &Arc<Grid<T>>, c: &[T]) -> Self {
        Self { components: (0..grid.dim()).map(|a| ScalarField::constant(grid, c[a])).collect() }
    }

    pub fn from_fn(grid: &Arc<Grid<T>>, f: impl Fn([T; 3]) -> [T; 3]) -> Self {
        Self { components: (0..grid.dim()).map(|a| ScalarField::from_fn(grid, |x| f(x)[a])).collect() }
    }

    pub(crate) fn from_components_unchecked(components: Vec<ScalarField<T>>) -> Self {
        Self { components }
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        self.components[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[ScalarField<T>] {
        &self.components
    }

    pub fn component(&self, axis: usize) -> &ScalarField<T> {
        &self.components[axis]
    }

    pub fn into_components(self) -> Vec<ScalarField<T>> {
        self.components
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        self.components[0].check_same_grid(&other.components[0])
    }

    pub fn map_components(&self, f: impl Fn(&ScalarField<T>) -> ScalarField<T>) -> Self {
        Self { components: self.components.iter().map(f).collect() }
    }

    pub fn zip_components(
        &self,
        other: &Self,
        f: impl Fn(&ScalarField<T>, &ScalarField<T>) -> Result<ScalarField<T>>,
    ) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            components: self.components.iter().zip(&other.components).map(|(a, b)| f(a, b)).collect::<Result<_>>()?,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_components(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_components(other, |a, b| a.sub(b))
    }

    pub fn scale(&self, c: T) -> Self {
        self.map_components(|f| f.scale(c))
    }

    /// Multiplies every component by a scalar field.
    pub fn mul_scalar(&self, s: &ScalarField<T>) -> Result<Self> {
        Ok(Self { components: self.components.iter().map(|c| c.mul(s)).collect::<Result<_>>()? })
    }

    /// Pointwise dot product.
    pub fn dot_pointwise(&self, other: &Self) -> Result<ScalarField<T>> {
        self.check_same_grid(other)?;
        let mut acc = self.components[0].mul(&other.components[0])?;
        for (a, b) in self.components[1..].iter().zip(&other.components[1..]) {
            acc = acc.add(&a.mul(b)?)?;
        }
        Ok(acc)
    }

    /// Pointwise |v|².
    pub fn norm_sq_pointwise(&self) -> ScalarField<T> {
        self.dot_pointwise(self).expect("same grid")
    }

    /// L² inner product ∫ v·w dx.
    pub fn dot(&self, other: &Self) -> Result<T> {
        self.check_same_grid(other)?;
        let mut s = T::zero();
        for (a, b) in self.components.iter().zip(&other.components) {
            s += a.dot(b)?;
        }
        Ok(s)
    }

    /// L² norm.
    pub fn l2_norm(&self) -> T {
        self.dot(self).expect("same grid").max(T::zero()).sqrt()
    }

    pub fn mean(&self) -> Vec<T> {
        self.components.iter().map(|c| c.mean()).collect()
    }

    pub fn max_abs(&self) -> T {
        self.norm_sq_pointwise().max().max(T::zero()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(|c| c.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GridSpec;

    #[test]
    fn round_trip_is_lossless() {
        let g = Grid::<f64>::new(GridSpec::torus(2, 32)).unwrap();
        let f = ScalarField::from_fn(&g, |x| (2.0 * x[0]).sin() * x[1].cos() + 0.3);
        let back = ScalarField::from_spectrum(&g, f.spectrum().to_vec());
        for (a, b) in f.values().iter().zip(back.values()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let g1 = Grid::<f64>::new(GridSpec::torus(2, 8)).unwrap();
        let g2 = Grid::<f64>::new(GridSpec::torus(2, 16)).unwrap();
        let a = ScalarField::zeros(&g1);
        let b = ScalarField::zeros(&g2);
        assert_eq!(a.add(&b).unwrap_err(), Error::GridMismatch);
        // separately built grids with equal specs are compatible
        let g3 = Grid::<f64>::new(GridSpec::torus(2, 8)).unwrap();
        assert!(a.add(&ScalarField::zeros(&g3)).is_ok());
    }

    #[test]
    fn integral_of_constant_is_volume() {
        let g = Grid::<f64>::new(GridSpec::torus(2, 8)).unwrap();
        let f = ScalarField::constant(&g, 1.0);
        assert!((f.integral() - 4.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12);
        assert!((f.mean() - 1.0).abs() < 1e-15);
    }
}
