use std::sync::Arc;

use lowmach_core::compressible::{CompressibleState, FluidParams};
use lowmach_core::incompressible::{simulate_inc, IncompressibleState};
use lowmach_core::spectral::{Grid, GridSpec, ScalarField, VectorField};
use lowmach_lab::metrics::{filtered_equicontinuity, metric_suite, trapezoid};
use lowmach_lab::{fit_rate, LabError};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params(eps: f64) -> FluidParams {
    FluidParams { a: 1.0, gamma: 2.0, eps, mu: 0.05, lam: 0.0, nu: 0.05, dim: 2 }
}

fn grid() -> Arc<Grid<f64>> {
    Grid::new(GridSpec::torus(2, 16)).unwrap()
}

fn taylor_green(g: &Arc<Grid<f64>>) -> IncompressibleState<f64> {
    let u = VectorField::from_fn(g, |x| [x[0].sin() * x[1].cos(), -x[0].cos() * x[1].sin(), 0.0]);
    let h = VectorField::from_fn(g, |x| [0.3 * x[1].sin(), 0.3 * x[0].cos(), 0.0]);
    IncompressibleState::new(u, h, 0.0).unwrap()
}

fn embed(s: &IncompressibleState<f64>) -> CompressibleState<f64> {
    CompressibleState::new(ScalarField::constant(s.grid(), 1.0), s.u.clone(), s.h.clone(), s.time).unwrap()
}

fn inc_trace() -> Vec<IncompressibleState<f64>> {
    let tr = simulate_inc(&taylor_green(&grid()), 0.05, 0.05, 0.5, 0.01, 10).unwrap();
    tr.states
}

#[test]
fn embedded_limit_has_no_defects() {
    let inc = inc_trace();
    let compr: Vec<_> = inc.iter().map(embed).collect();
    let m = metric_suite(&compr, &inc, &params(0.1)).unwrap();
    assert!(m.pu_error <= 1e-12, "pu {}", m.pu_error);
    assert!(m.h_error <= 1e-12 && m.qu_norm <= 1e-12);
    assert!(m.rho_l2 == 0.0 && m.rho_lgamma == 0.0);
    assert!(m.qu_pairing_max() <= 1e-12);
    assert!(m.product_defect <= 1e-10);
    assert_eq!(m.product_ratio(), 0.0);
}

#[test]
fn mismatched_times_are_rejected() {
    let inc = inc_trace();
    let mut compr: Vec<_> = inc.iter().map(embed).collect();
    compr[3].time += 1e-3;
    assert!(matches!(metric_suite(&compr, &inc, &params(0.1)), Err(LabError::Mismatch(_))));
    assert!(matches!(metric_suite(&compr[1..], &inc, &params(0.1)), Err(LabError::Mismatch(_))));
}

#[test]
fn coarse_traces_are_rejected() {
    let g = grid();
    let eps = 0.1;
    let state = |t: f64| {
        let rho = ScalarField::from_fn(&g, |x| 1.0 + 0.01 * x[0].cos());
        CompressibleState::new(rho, VectorField::zeros(&g), VectorField::zeros(&g), t).unwrap()
    };
    let fine: Vec<_> = (0..5).map(|k| state(k as f64 * eps / 8.0)).collect();
    let rep = filtered_equicontinuity(&fine, &params(eps)).unwrap();
    assert!((rep.interval - eps / 8.0).abs() < 1e-12);
    let coarse: Vec<_> = (0..5).map(|k| state(k as f64 * eps / 2.0)).collect();
    assert!(matches!(filtered_equicontinuity(&coarse, &params(eps)), Err(LabError::Undersampled { .. })));
}

#[test]
fn trapezoid_is_exact_on_lines() {
    let t = [0.0, 0.1, 0.4, 1.0];
    let v: Vec<f64> = t.iter().map(|x| 3.0 * x + 1.0).collect();
    assert!((trapezoid(&t, &v) - 2.5).abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn noisy_root_rate_is_recovered(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eps = [0.2f64, 0.1, 0.05, 0.025, 0.0125];
        let v: Vec<f64> = eps.iter().map(|e| e.sqrt() * (1.0 + rng.gen_range(-0.05..0.05))).collect();
        let f = fit_rate(&eps, &v).unwrap();
        prop_assert!((0.4..=0.6).contains(&f.slope), "slope {}", f.slope);
    }

    #[test]
    fn fit_is_scale_invariant(c in 0.01f64..100.0, p in 0.1f64..3.0) {
        let eps = [0.2f64, 0.1, 0.05];
        let v: Vec<f64> = eps.iter().map(|e| c * e.powf(p)).collect();
        let f = fit_rate(&eps, &v).unwrap();
        prop_assert!((f.slope - p).abs() < 1e-10);
        prop_assert!((f.intercept - c.ln()).abs() < 1e-9);
    }
}
