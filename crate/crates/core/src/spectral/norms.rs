use super::field::{ScalarField, VectorField};
use crate::scalar::Real;

/// H^s norm from the spectrum with weights (1+|k|²)^s, normalized so that
/// s = 0 gives the L² norm.
pub fn sobolev_norm<T: Real>(f: &ScalarField<T>, s: T) -> T {
    sobolev_norm_sq(f, s).sqrt()
}

pub fn sobolev_norm_sq<T: Real>(f: &ScalarField<T>, s: T) -> T {
    let grid = f.grid();
    let mut acc = T::zero();
    for (c, &k2) in f.spectrum().iter().zip(grid.k2()) {
        let w = if s == T::zero() { T::one() } else { (T::one() + k2).powf(s) };
        acc += w * c.norm_sqr();
    }
    acc * grid.volume()
}

pub fn sobolev_norm_vector<T: Real>(v: &VectorField<T>, s: T) -> T {
    v.components().iter().fold(T::zero(), |acc, c| acc + sobolev_norm_sq(c, s)).sqrt()
}

/// L^q norm by grid quadrature; `q = ∞` gives the max norm.
pub fn lq_norm<T: Real>(f: &ScalarField<T>, q: T) -> T {
    if q.is_infinite() {
        return f.max_abs();
    }
    let mut acc = T::zero();
    for v in f.values() {
        acc += v.abs().powf(q);
    }
    (acc * f.grid().cell_volume()).powf(T::one() / q)
}

/// L^q norm of the pointwise magnitude |v|.
pub fn lq_norm_vector<T: Real>(v: &VectorField<T>, q: T) -> T {
    lq_norm(&v.norm_sq_pointwise().map(|x| x.max(T::zero()).sqrt()), q)
}

pub fn l2_norm<T: Real>(f: &ScalarField<T>) -> T {
    f.dot(f).expect("same grid").max(T::zero()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, GridSpec};
    use std::f64::consts::PI;

    #[test]
    fn zero_field_has_zero_norm() {
        let g = Grid::<f64>::new(GridSpec::torus(2, 16)).unwrap();
        let f = ScalarField::zeros(&g);
        assert_eq!(sobolev_norm(&f, 1.0), 0.0);
        assert_eq!(lq_norm(&f, 4.0), 0.0);
    }

    #[test]
    fn l2_of_sine_on_torus() {
        let g = Grid::<f64>::new(GridSpec::torus(2, 16)).unwrap();
        let f = ScalarField::from_fn(&g, |x| x[0].sin());
        let expected = (2.0 * PI * PI).sqrt();
        assert!((sobolev_norm(&f, 0.0) - expected).abs() < 1e-12);
        assert!((lq_norm(&f, 2.0) - expected).abs() < 1e-12);
        // single mode |k| = 1: H^1 weight 2
        assert!((sobolev_norm(&f, 1.0) - expected * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn norms_are_homogeneous() {
        let g = Grid::<f64>::new(GridSpec::torus(2, 16)).unwrap();
        let f = ScalarField::from_fn(&g, |x| (x[0] + 2.0 * x[1]).cos() + 0.2 * x[1].sin());
        let f2 = f.scale(2.0);
        for s in [-2.0, 0.0, 1.5] {
            assert!((sobolev_norm(&f2, s) - 2.0 * sobolev_norm(&f, s)).abs() < 1e-12);
        }
        assert!((lq_norm(&f2, 4.0) - 2.0 * lq_norm(&f, 4.0)).abs() < 1e-12);
    }
}
