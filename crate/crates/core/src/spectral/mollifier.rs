//! Mollification f ↦ f ∗ ζ_α with ζ_α(x) = α^{−N} ζ(x/α).
//!
//! ζ is the tensor product of the 1D bump `exp(−1/(1−x²))` on (−1, 1),
//! normalized numerically to unit mass. The convolution is applied exactly in
//! Fourier space through the kernel's cosine transform, which is evaluated by
//! trapezoid quadrature (spectrally accurate for a smooth compactly supported
//! integrand).

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::calculus::{apply_multiplier, dealias, gradient};
use super::field::ScalarField;
use super::grid::Grid;
use super::norms::lq_norm;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifierSpec {
    pub alpha: f64,
}

const MIN_NODES: usize = 4096;

fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

fn nodes_for(xi: f64) -> usize {
    MIN_NODES.max((16.0 * xi.abs()) as usize)
}

/// ∫ bump over (−1, 1) with `n` trapezoid intervals.
fn bump_mass(n: usize) -> f64 {
    let h = 2.0 / n as f64;
    (1..n).map(|i| bump(-1.0 + i as f64 * h)).sum::<f64>() * h
}

impl MollifierSpec {
    pub fn new(alpha: f64) -> Self {
        Self { alpha }
    }

    /// Normalized 1D profile ζ₁(x).
    pub fn profile(x: f64) -> f64 {
        bump(x) / bump_mass(MIN_NODES)
    }

    /// Tensor-product kernel ζ(x) in `dim` dimensions.
    pub fn kernel(x: &[f64]) -> f64 {
        x.iter().map(|&xi| Self::profile(xi)).product()
    }

    /// Cosine transform of the normalized 1D profile, ∫ ζ₁(x) cos(ξx) dx.
    pub fn profile_transform(xi: f64) -> f64 {
        let n = nodes_for(xi);
        let h = 2.0 / n as f64;
        let mass = bump_mass(n);
        (1..n)
            .map(|i| {
                let x = -1.0 + i as f64 * h;
                bump(x) * (xi * x).cos()
            })
            .sum::<f64>()
            * h
            / mass
    }

    pub fn validate(&self, half_length: f64) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < half_length) {
            return Err(Error::InvalidParameter(format!(
                "mollifier scale {} outside (0, {})",
                self.alpha, half_length
            )));
        }
        Ok(())
    }
}

/// f ∗ ζ_α on the periodic grid.
pub fn mollify<T: Real>(f: &ScalarField<T>, spec: &MollifierSpec) -> Result<ScalarField<T>> {
    let grid = f.grid().clone();
    let half = grid.spec().lengths.iter().fold(f64::INFINITY, |m, &l| m.min(0.5 * l));
    spec.validate(half)?;
    let dim = grid.dim();
    let shape = grid.shape();
    // one transform value per distinct (axis, |frequency|)
    let mut cache: HashMap<(usize, u64), T> = HashMap::new();
    let mut tables: Vec<Vec<T>> = Vec::with_capacity(dim);
    for axis in 0..dim {
        let scale = 2.0 * std::f64::consts::PI / grid.spec().lengths[axis];
        let table = (0..shape[axis])
            .map(|i| {
                let m = grid.freq(axis, i).unsigned_abs();
                *cache
                    .entry((axis, m))
                    .or_insert_with(|| T::lit(MollifierSpec::profile_transform(spec.alpha * scale * m as f64)))
            })
            .collect();
        tables.push(table);
    }
    Ok(apply_multiplier(f, |flat, c| {
        let idx = grid.unflatten(flat);
        let mut w = T::one();
        for (axis, table) in tables.iter().enumerate() {
            w *= table[idx[axis]];
        }
        c * w
    }))
}

/// Exponent 1 − σ with σ = N(1/2 − 1/q) in the mollifier estimate.
pub fn mollifier_exponent(dim: usize, q: f64) -> f64 {
    1.0 - dim as f64 * (0.5 - 1.0 / q)
}

/// Worst case of ‖f − f∗ζ_α‖_q over a dictionary, per α.
#[derive(Debug, Clone, PartialEq)]
pub struct MollifierScan {
    pub q: f64,
    pub alphas: Vec<f64>,
    pub sup: Vec<f64>,
    /// Bump width attaining the sup.
    pub argmax_width: Vec<f64>,
}

/// Band-limited Gaussian bump of width `w` centred in the box, truncated to
/// the dealiased band and scaled to ‖∇f‖₂ = 1.
pub fn unit_gradient_bump<T: Real>(grid: &Arc<Grid<T>>, width: f64) -> Result<ScalarField<T>> {
    if !(width > 0.0) {
        return Err(Error::InvalidParameter(format!("bump width {width} must be positive")));
    }
    let centre: Vec<f64> = grid.spec().lengths.iter().map(|l| 0.5 * l).collect();
    let f = dealias(&ScalarField::from_fn(grid, |x| {
        let r2: f64 = centre.iter().enumerate().map(|(a, c)| (x[a].as_f64() - c).powi(2)).sum();
        T::lit((-r2 / (2.0 * width * width)).exp())
    }));
    let g = gradient(&f).l2_norm().as_f64();
    if !(g > 0.0) {
        return Err(Error::InvalidParameter(format!("bump width {width} is not resolved")));
    }
    Ok(f.scale(T::lit(1.0 / g)))
}

/// sup over bumps of the given widths of ‖f − f∗ζ_α‖_q, one scan per q.
///
/// The estimate is sharp on functions concentrated at scale α, so the
/// sup over a range of widths realizes the α^{1−σ} law; a single smooth
/// field only shows the α² rate of a symmetric kernel.
pub fn mollifier_defect_scan<T: Real>(
    grid: &Arc<Grid<T>>,
    alphas: &[f64],
    qs: &[f64],
    widths: &[f64],
) -> Result<Vec<MollifierScan>> {
    if alphas.is_empty() || widths.is_empty() || qs.iter().any(|&q| !(q >= 1.0)) {
        return Err(Error::InvalidParameter("mollifier scan needs scales, widths and exponents q ≥ 1".into()));
    }
    let mut scans: Vec<MollifierScan> = qs
        .iter()
        .map(|&q| MollifierScan {
            q,
            alphas: alphas.to_vec(),
            sup: vec![0.0; alphas.len()],
            argmax_width: vec![f64::NAN; alphas.len()],
        })
        .collect();
    for &w in widths {
        let f = unit_gradient_bump(grid, w)?;
        for (i, &alpha) in alphas.iter().enumerate() {
            let defect = f.sub(&mollify(&f, &MollifierSpec::new(alpha))?)?;
            for scan in &mut scans {
                let v = lq_norm(&defect, T::lit(scan.q)).as_f64();
                if v > scan.sup[i] {
                    scan.sup[i] = v;
                    scan.argmax_width[i] = w;
                }
            }
        }
    }
    Ok(scans)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, GridSpec};

    #[test]
    fn kernel_has_unit_mass_and_is_nonnegative() {
        let n = 20_000;
        let h = 2.0 / n as f64;
        let mass: f64 = (1..n).map(|i| MollifierSpec::profile(-1.0 + i as f64 * h)).sum::<f64>() * h;
        assert!((mass - 1.0).abs() < 1e-10);
        assert!((MollifierSpec::profile_transform(0.0) - 1.0).abs() < 1e-12);
        for i in 0..=200 {
            let x = -1.5 + 3.0 * i as f64 / 200.0;
            assert!(MollifierSpec::profile(x) >= 0.0);
        }
    }

    #[test]
    fn constants_and_means_are_preserved() {
        let g = Grid::<f64>::new(GridSpec::torus(2, 32)).unwrap();
        let c = ScalarField::constant(&g, 3.5);
        let m = mollify(&c, &MollifierSpec::new(0.3)).unwrap();
        assert!(m.values().iter().all(|v| (v - 3.5).abs() < 1e-12));
        let f = ScalarField::from_fn(&g, |x| 1.0 + x[0].sin() * (3.0 * x[1]).cos());
        let m = mollify(&f, &MollifierSpec::new(0.2)).unwrap();
        assert!((m.mean() - f.mean()).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_scale_is_rejected() {
        let g = Grid::<f64>::new(GridSpec::torus(1, 16)).unwrap();
        let f = ScalarField::zeros(&g);
        assert!(mollify(&f, &MollifierSpec::new(0.0)).is_err());
        assert!(mollify(&f, &MollifierSpec::new(4.0)).is_err());
    }

    #[test]
    fn bumps_have_unit_gradient() {
        let g = Grid::<f64>::new(GridSpec::torus(2, 64)).unwrap();
        let f = unit_gradient_bump(&g, 0.3).unwrap();
        assert!((gradient(&f).l2_norm() - 1.0).abs() < 1e-12);
        assert!(unit_gradient_bump(&g, 0.0).is_err());
        assert_eq!(mollifier_exponent(2, 4.0), 0.5);
        assert!((mollifier_exponent(2, 6.0) - 1.0 / 3.0).abs() < 1e-15);
    }
}
