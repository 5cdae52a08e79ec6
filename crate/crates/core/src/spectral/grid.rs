use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Shape of a periodic box: points per axis and side lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub points: Vec<usize>,
    pub lengths: Vec<f64>,
}

impl GridSpec {
    /// Cube of side 2π with `n` points per axis.
    pub fn torus(dim: usize, n: usize) -> Self {
        Self { points: vec![n; dim], lengths: vec![2.0 * PI; dim] }
    }

    pub fn dim(&self) -> usize {
        self.points.len()
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.points.len();
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if self.lengths.len() != dim {
            return Err(Error::InvalidGrid(format!("{} lengths for {} axes", self.lengths.len(), dim)));
        }
        for (axis, &n) in self.points.iter().enumerate() {
            if n < 2 || n % 2 != 0 {
                return Err(Error::InvalidGrid(format!("axis {axis}: {n} points (need a positive even count)")));
            }
        }
        for (axis, &l) in self.lengths.iter().enumerate() {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidGrid(format!("axis {axis}: length {l}")));
            }
        }
        Ok(())
    }
}

/// Runtime grid: wavenumbers, dealiasing mask and FFT plans for one [`GridSpec`].
///
/// Grids are shared behind `Arc` by every field living on them. All state is
/// immutable after construction, so a grid can be used from any number of
/// threads at once.
pub struct Grid<T: Real> {
    spec: GridSpec,
    shape: [usize; 3],
    strides: [usize; 3],
    len: usize,
    /// Physical wavenumber per axis index.
    wavenumbers: [Vec<T>; 3],
    /// Signed integer frequency per axis index.
    freqs: [Vec<i64>; 3],
    /// |k|² per grid index.
    k2: Vec<T>,
    /// Index of the conjugate mode −k per grid index.
    conj_index: Vec<usize>,
    keep: Vec<bool>,
    forward: [Arc<dyn Fft<T>>; 3],
    inverse: [Arc<dyn Fft<T>>; 3],
}

impl<T: Real> fmt::Debug for Grid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("spec", &self.spec).finish()
    }
}

impl<T: Real> Grid<T> {
    pub fn new(spec: GridSpec) -> Result<Arc<Self>> {
        spec.validate()?;
        let dim = spec.dim();
        let mut shape = [1usize; 3];
        shape[..dim].copy_from_slice(&spec.points);
        let strides = [shape[1] * shape[2], shape[2], 1];
        let len = shape.iter().product();

        let mut planner = FftPlanner::<T>::new();
        let mut wavenumbers: [Vec<T>; 3] = Default::default();
        let mut freqs: [Vec<i64>; 3] = Default::default();
        let forward: [Arc<dyn Fft<T>>; 3] = std::array::from_fn(|a| planner.plan_fft_forward(shape[a]));
        let inverse: [Arc<dyn Fft<T>>; 3] = std::array::from_fn(|a| planner.plan_fft_inverse(shape[a]));
        for axis in 0..3 {
            let n = shape[axis];
            let scale = if axis < dim { 2.0 * PI / spec.lengths[axis] } else { 0.0 };
            freqs[axis] = (0..n)
                .map(|i| {
                    let i = i as i64;
                    let n = n as i64;
                    if i < n / 2 || n == 1 {
                        i
                    } else {
                        i - n
                    }
                })
                .collect();
            wavenumbers[axis] = freqs[axis].iter().map(|&m| T::lit(scale * m as f64)).collect();
        }

        let mut k2 = Vec::with_capacity(len);
        let mut conj_index = Vec::with_capacity(len);
        let mut keep = Vec::with_capacity(len);
        for i0 in 0..shape[0] {
            for i1 in 0..shape[1] {
                for i2 in 0..shape[2] {
                    let idx = [i0, i1, i2];
                    let mut s = T::zero();
                    let mut kept = true;
                    let mut c = 0;
                    for a in 0..3 {
                        let k = wavenumbers[a][idx[a]];
                        s += k * k;
                        // 2/3 rule: keep |m| <= N/3
                        if a < dim && 3 * freqs[a][idx[a]].unsigned_abs() as usize > shape[a] {
                            kept = false;
                        }
                        c += ((shape[a] - idx[a]) % shape[a]) * strides[a];
                    }
                    k2.push(s);
                    conj_index.push(c);
                    keep.push(kept);
                }
            }
        }

        Ok(Arc::new(Self { spec, shape, strides, len, wavenumbers, freqs, k2, conj_index, keep, forward, inverse }))
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    /// Box volume.
    pub fn volume(&self) -> T {
        T::lit(self.spec.lengths.iter().product())
    }

    /// Quadrature weight of a single grid point (cell volume).
    pub fn cell_volume(&self) -> T {
        self.volume() / T::from_usize_lossy(self.len)
    }

    pub fn k2(&self) -> &[T] {
        &self.k2
    }

    pub fn keep_mask(&self) -> &[bool] {
        &self.keep
    }

    pub fn conj_index(&self) -> &[usize] {
        &self.conj_index
    }

    /// Multi-index of a flat grid index.
    #[inline]
    pub fn unflatten(&self, flat: usize) -> [usize; 3] {
        [flat / self.strides[0], (flat / self.strides[1]) % self.shape[1], flat % self.shape[2]]
    }

    /// Wavenumber component `axis` of the mode stored at `flat`.
    #[inline]
    pub fn k_component(&self, axis: usize, flat: usize) -> T {
        let idx = self.unflatten(flat);
        self.wavenumbers[axis][idx[axis]]
    }

    /// Wavenumber components of the mode stored at `flat`, Nyquist entries of
    /// odd derivatives removed.
    #[inline]
    pub fn k_vector_odd(&self, flat: usize) -> [T; 3] {
        let idx = self.unflatten(flat);
        std::array::from_fn(|a| if self.is_nyquist(a, idx[a]) { T::zero() } else { self.wavenumbers[a][idx[a]] })
    }

    #[inline]
    pub fn k_vector(&self, flat: usize) -> [T; 3] {
        let idx = self.unflatten(flat);
        std::array::from_fn(|a| self.wavenumbers[a][idx[a]])
    }

    #[inline]
    fn is_nyquist(&self, axis: usize, i: usize) -> bool {
        let n = self.shape[axis];
        n > 1 && i == n / 2
    }

    /// Integer frequency along `axis` for index `i`.
    pub fn freq(&self, axis: usize, i: usize) -> i64 {
        self.freqs[axis][i]
    }

    /// Physical coordinates of grid point `flat`.
    pub fn point(&self, flat: usize) -> [T; 3] {
        let idx = self.unflatten(flat);
        std::array::from_fn(|a| {
            if a < self.dim() {
                T::lit(self.spec.lengths[a] * idx[a] as f64 / self.shape[a] as f64)
            } else {
                T::zero()
            }
        })
    }

    /// Normalized forward transform: `f = Σ f̂_k e^{ik·x}`.
    pub fn forward(&self, values: &[T]) -> Vec<Complex<T>> {
        debug_assert_eq!(values.len(), self.len);
        let mut buf: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.transform(&mut buf, &self.forward);
        let norm = T::one() / T::from_usize_lossy(self.len);
        for c in buf.iter_mut() {
            *c *= norm;
        }
        buf
    }

    /// Inverse of [`Grid::forward`], in place.
    pub fn inverse_in_place(&self, buf: &mut [Complex<T>]) {
        debug_assert_eq!(buf.len(), self.len);
        self.transform(buf, &self.inverse);
    }

    fn transform(&self, buf: &mut [Complex<T>], plans: &[Arc<dyn Fft<T>>; 3]) {
        for axis in (0..self.dim()).rev() {
            let n = self.shape[axis];
            let plan = &plans[axis];
            let mut scratch = vec![Complex::new(T::zero(), T::zero()); plan.get_inplace_scratch_len()];
            let stride = self.strides[axis];
            if stride == 1 {
                plan.process_with_scratch(buf, &mut scratch);
                continue;
            }
            // gather every line along `axis` into one contiguous batch
            let lines = self.len / n;
            let mut batch = vec![Complex::new(T::zero(), T::zero()); self.len];
            let outer = self.len / (n * stride);
            let mut line = 0;
            for o in 0..outer {
                for inner in 0..stride {
                    let base = o * n * stride + inner;
                    for j in 0..n {
                        batch[line * n + j] = buf[base + j * stride];
                    }
                    line += 1;
                }
            }
            debug_assert_eq!(line, lines);
            plan.process_with_scratch(&mut batch, &mut scratch);
            let mut line = 0;
            for o in 0..outer {
                for inner in 0..stride {
                    let base = o * n * stride + inner;
                    for j in 0..n {
                        buf[base + j * stride] = batch[line * n + j];
                    }
                    line += 1;
                }
            }
        }
    }

    /// Hermitian part `(c_k + conj(c_{-k}))/2`: the spectrum of the real part of
    /// the field the coefficients describe.
    pub fn hermitian_part(&self, coeffs: &[Complex<T>]) -> Vec<Complex<T>> {
        let half = T::lit(0.5);
        coeffs.iter().zip(&self.conj_index).map(|(c, &j)| (*c + coeffs[j].conj()) * half).collect()
    }

    pub fn same_as(&self, other: &Grid<T>) -> bool {
        std::ptr::eq(self, other) || self.spec == other.spec
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_bad_specs() {
        assert!(GridSpec { points: vec![7], lengths: vec![1.0] }.validate().is_err());
        assert!(GridSpec { points: vec![8, 8], lengths: vec![1.0] }.validate().is_err());
        assert!(GridSpec { points: vec![8], lengths: vec![-1.0] }.validate().is_err());
        assert!(GridSpec { points: vec![4; 4], lengths: vec![1.0; 4] }.validate().is_err());
        assert!(GridSpec::torus(3, 8).validate().is_ok());
    }

    #[test]
    fn conjugate_index_is_involution() {
        let g = Grid::<f64>::new(GridSpec::torus(2, 8)).unwrap();
        for (i, &j) in g.conj_index().iter().enumerate() {
            assert_eq!(g.conj_index()[j], i);
        }
    }

    #[test]
    fn forward_of_single_mode() {
        let g = Grid::<f64>::new(GridSpec::torus(2, 16)).unwrap();
        let vals: Vec<f64> = (0..g.len()).map(|i| g.point(i)[0].cos()).collect();
        let c = g.forward(&vals);
        // cos x = (e^{ix} + e^{-ix})/2 at flat indices (1,0) and (15,0)
        let s = g.shape()[1];
        assert!((c[s].re - 0.5).abs() < 1e-14);
        assert!((c[15 * s].re - 0.5).abs() < 1e-14);
        let total: f64 = c.iter().map(|z| z.norm()).sum();
        assert!((total - 1.0).abs() < 1e-13);
    }
}
