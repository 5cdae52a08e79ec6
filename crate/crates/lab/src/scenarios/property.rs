//! Quick invariant checks across every module, run by `lowmach check`.

use std::sync::Arc;

use lowmach_core::acoustic::{apply_group, isometry_defect, pair_norm, AcousticPair, GroupParams};
use lowmach_core::bounded::linalg::Mat;
use lowmach_core::bounded::{gradient_identity_check, mode_gram, neumann_modes, Geometry};
use lowmach_core::compressible::{simulate, well_prepared_init, FluidParams, InitProfile, ProfileKind};
use lowmach_core::incompressible::{simulate_inc, IncompressibleState};
use lowmach_core::spectral::{helmholtz_project, mollify, Grid, GridSpec, MollifierSpec, ScalarField, VectorField};

use crate::fit::fit_rate;
use crate::report::{Check, Report, Table};

/// Deterministic field with energy in many modes.
fn rich_scalar(grid: &Arc<Grid<f64>>, shift: f64) -> ScalarField<f64> {
    ScalarField::from_fn(grid, |x| {
        (1..6)
            .map(|k| {
                let k = k as f64;
                ((k * x[0] + 2.0 * x[1] + shift * k).sin() + (x[0] - k * x[1] + shift).cos()) / k
            })
            .sum::<f64>()
    })
}

fn rich_vector(grid: &Arc<Grid<f64>>, shift: f64) -> VectorField<f64> {
    VectorField::new(vec![rich_scalar(grid, shift), rich_scalar(grid, shift + 1.3)]).expect("same grid")
}

type Outcome = lowmach_core::Result<Check>;
type Group = lowmach_core::Result<Vec<Check>>;
type Named<F> = (&'static str, F);

fn projector_algebra() -> Outcome {
    let g = Grid::<f64>::new(GridSpec::torus(2, 16))?;
    let v = rich_vector(&g, 0.4);
    let (p, q) = helmholtz_project(&v);
    let (pp, pq) = helmholtz_project(&p);
    let (qp, qq) = helmholtz_project(&q);
    let err = [pp.sub(&p)?.max_abs(), pq.max_abs(), qp.max_abs(), qq.sub(&q)?.max_abs(), p.add(&q)?.sub(&v)?.max_abs()]
        .into_iter()
        .fold(0.0, f64::max);
    Ok(Check::target("projector algebra", err, "≤ 1e-12", err <= 1e-12))
}

fn group_law() -> Outcome {
    let g = Grid::<f64>::new(GridSpec::torus(2, 16))?;
    let phi = rich_scalar(&g, 0.1);
    let phi = phi.shift(-phi.mean());
    let pair = AcousticPair::new(phi, rich_vector(&g, 0.7))?;
    let gp = GroupParams::new(2.0)?;
    let two = apply_group(&apply_group(&pair, 0.3, &gp)?, 0.5, &gp)?;
    let one = apply_group(&pair, 0.8, &gp)?;
    let law = pair_norm(&two.sub(&one)?, 0.0, gp.b) / pair_norm(&pair, 0.0, gp.b);
    let iso = isometry_defect(&pair, 1.7, 1.0, &gp)?;
    let err = law.max(iso);
    Ok(Check::target("acoustic group law and isometry", err, "≤ 1e-10", err <= 1e-10))
}

fn mollifier_means() -> Outcome {
    let g = Grid::<f64>::new(GridSpec::torus(2, 32))?;
    let f = rich_scalar(&g, 0.2).shift(0.75);
    let m = mollify(&f, &MollifierSpec::new(0.3))?;
    let err = (m.mean() - f.mean()).abs();
    Ok(Check::target("mollifier preserves the mean", err, "≤ 1e-12", err <= 1e-12))
}

fn rate_fit() -> Outcome {
    let eps = [0.2, 0.1, 0.05, 0.025];
    let slope = fit_rate(&eps, &eps).map(|f| f.slope).unwrap_or(f64::NAN);
    Ok(Check::target("rate fit of eps", slope, "1 ± 1e-12", (slope - 1.0).abs() <= 1e-12))
}

fn compressible_energy() -> Group {
    let g = Grid::<f64>::new(GridSpec::torus(2, 32))?;
    let p = FluidParams { a: 1.0, gamma: 2.0, eps: 0.1, mu: 0.05, lam: 0.0, nu: 0.05, dim: 2 };
    let init = well_prepared_init(&g, &p, &InitProfile::new(ProfileKind::OrszagTangLike))?;
    let trace = simulate(&init, &p, 0.2, 0.01, 5).map_err(|e| e.error.clone())?;
    let bal = trace.records.iter().map(|r| r.energy.balance_excess()).fold(f64::NEG_INFINITY, f64::max);
    let mass = trace.records.iter().map(|r| (r.mass - trace.records[0].mass).abs()).fold(0.0, f64::max);
    let div = trace.records.iter().map(|r| r.div_h).fold(0.0, f64::max);
    Ok(vec![
        Check::target("compressible energy inequality", bal, "≤ 1e-4", bal <= 1e-4),
        Check::target("compressible mass drift", mass, "≤ 1e-12", mass <= 1e-12),
        Check::target("compressible div H", div, "≤ 1e-10", div <= 1e-10),
    ])
}

fn taylor_green_decay() -> Outcome {
    let g = Grid::<f64>::new(GridSpec::torus(2, 16))?;
    let mu = 0.05;
    let u = VectorField::from_fn(&g, |x| [x[0].sin() * x[1].cos(), -x[0].cos() * x[1].sin(), 0.0]);
    let s0 = IncompressibleState::new(u, VectorField::zeros(&g), 0.0)?;
    let tr = simulate_inc(&s0, mu, mu, 0.5, 0.01, 50)?;
    let (e0, e1) = (tr.records[0].energy, tr.records[tr.records.len() - 1].energy);
    // energy decays at twice the amplitude rate 2μ
    let err = ((e1 / e0) / (-4.0 * mu * 0.5f64).exp() - 1.0).abs();
    Ok(Check::target("Taylor-Green decay", err, "≤ 5e-3", err <= 5e-3))
}

fn neumann_checks() -> Group {
    let g = Geometry::rectangle(24);
    let grid = g.grid();
    let modes = neumann_modes(&g, 3)?;
    let gram = mode_gram(&grid, &modes).add_scaled(&Mat::identity(modes.len()), -1.0).max_abs();
    let mut ident = 0.0f64;
    for (i, a) in modes.iter().enumerate() {
        for b in &modes[i + 1..] {
            if (a.lambda - b.lambda).abs() < 1e-12 {
                ident = ident.max(gradient_identity_check(&grid, a, b)?);
            }
        }
    }
    let mut consistent = true;
    for geo in [Geometry::interval(16), Geometry::channel(16, 8), Geometry::rectangle(16)] {
        consistent &= neumann_modes(&geo, 3)?.iter().all(|m| m.classification_consistent(1.0));
    }
    Ok(vec![
        Check::target("Neumann Gram identity", gram, "≤ 1e-10", gram <= 1e-10),
        Check::target("degenerate gradient identity", ident, "≤ 1e-8", ident <= 1e-8),
        Check::target("classification consistency", if consistent { 0.0 } else { 1.0 }, "0", consistent),
    ])
}

/// Every check, in a fixed order. A check that cannot run is reported as failed.
pub fn property_suite() -> Report {
    let singles: [Named<fn() -> Outcome>; 5] = [
        ("projector algebra", projector_algebra),
        ("acoustic group law and isometry", group_law),
        ("mollifier preserves the mean", mollifier_means),
        ("rate fit of eps", rate_fit),
        ("Taylor-Green decay", taylor_green_decay),
    ];
    let mut checks: Vec<Check> = singles
        .iter()
        .map(|(name, f)| f().unwrap_or_else(|e| Check::target(*name, f64::NAN, format!("runs ({e})"), false)))
        .collect();
    let groups: [Named<fn() -> Group>; 2] =
        [("compressible run", compressible_energy), ("Neumann modes", neumann_checks)];
    for (name, f) in groups {
        match f() {
            Ok(cs) => checks.extend(cs),
            Err(e) => checks.push(Check::target(name, f64::NAN, format!("runs ({e})"), false)),
        }
    }
    let mut metrics = Table::new("metrics", &["check", "value", "passed"]);
    for (i, c) in checks.iter().enumerate() {
        metrics.push(vec![i as f64, c.value, if c.passed { 1.0 } else { 0.0 }]);
    }
    Report {
        scenario: "property-suite".into(),
        eps_list: Vec::new(),
        metrics,
        diagnostics: Vec::new(),
        fits: Vec::new(),
        checks,
    }
}
