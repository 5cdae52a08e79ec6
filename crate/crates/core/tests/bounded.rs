use std::f64::consts::PI;

use lowmach_core::bounded::linalg::Mat;
use lowmach_core::bounded::*;
use rustfft::num_complex::Complex64;

fn find<'a>(modes: &'a [NeumannMode], label: &str) -> &'a NeumannMode {
    modes.iter().find(|m| m.label == label).unwrap_or_else(|| panic!("no mode {label}"))
}

fn all_geometries() -> [Geometry; 3] {
    [Geometry::interval(32), Geometry::channel(32, 24), Geometry::rectangle(32)]
}

#[test]
fn interval_first_mode() {
    let g = Geometry::interval(32);
    let modes = neumann_modes(&g, 5).unwrap();
    let m = &modes[0];
    assert_eq!(m.lambda, 1.0);
    for (p, v) in g.grid().points.iter().zip(&m.psi) {
        assert!((v - (2.0 / PI).sqrt() * p[0].cos()).abs() < 1e-15);
    }
}

#[test]
fn rectangle_spectrum_contains_five() {
    let modes = neumann_modes(&Geometry::rectangle(16), 3).unwrap();
    let five: Vec<_> = modes.iter().filter(|m| (m.lambda * m.lambda - 5.0).abs() < 1e-12).collect();
    assert_eq!(five.len(), 2);
    assert!(modes.windows(2).all(|w| w[0].lambda <= w[1].lambda));
}

#[test]
fn modes_are_orthonormal_eigenfunctions() {
    for g in all_geometries() {
        let grid = g.grid();
        let modes = neumann_modes(&g, 6).unwrap();
        let gram = mode_gram(&grid, &modes);
        let dev = gram.add_scaled(&Mat::identity(modes.len()), -1.0).max_abs();
        assert!(dev < 1e-12, "{:?} gram deviation {dev:e}", g.kind);
        for m in &modes {
            assert!(grid.integrate(&m.psi).abs() < 1e-12, "mean of {}", m.label);
            let res = grid.points.iter().map(|&p| m.shape.eigen_residual(m.lambda, p)).fold(0.0, f64::max);
            assert!(res < 1e-10);
        }
        // ∂Ψ/∂n = 0 on every wall
        for m in &modes {
            for b in g.boundary_quadrature(32) {
                let gr = m.shape.grad(b.x);
                let normal = match g.kind {
                    GeometryKind::Interval => gr[0],
                    GeometryKind::Channel => gr[1],
                    GeometryKind::Rectangle => {
                        if b.x[1] == 0.0 || b.x[1] == PI {
                            gr[1]
                        } else {
                            gr[0]
                        }
                    }
                };
                assert!(normal.abs() < 1e-10, "{} normal derivative {normal:e}", m.label);
            }
        }
        assert!(degenerate_boundary_coupling(&g, &modes) < 1e-10);
    }
}

#[test]
fn classification_examples() {
    for m in neumann_modes(&Geometry::interval(16), 6).unwrap() {
        assert_eq!(m.class, ModeClass::J);
    }
    let ch = neumann_modes(&Geometry::channel(16, 16), 3).unwrap();
    for k in 1..=3usize {
        let m = find(&ch, &format!("c({k},0)"));
        assert_eq!(m.class, ModeClass::I);
        assert!((m.boundary_grad_integral - 2.0 * (k * k) as f64 / PI).abs() < 1e-12);
    }
    let rect = neumann_modes(&Geometry::rectangle(16), 2).unwrap();
    assert_eq!(find(&rect, "(1,1)").class, ModeClass::I);
}

#[test]
fn classification_agrees_with_damping_everywhere() {
    for g in all_geometries() {
        for m in neumann_modes(&g, 8).unwrap() {
            assert!(m.classification_consistent(1.0), "{:?} {}", g.kind, m.label);
            let d = predicted_damping(&m, 1.0, 1.0);
            assert!(d.re <= 0.0);
            assert_eq!(m.class == ModeClass::J, d == Complex64::new(0.0, 0.0));
        }
    }
}

#[test]
fn predicted_damping_examples() {
    let ch = neumann_modes(&Geometry::channel(16, 8), 1).unwrap();
    let m1 = find(&ch, "c(1,0)");
    let d = predicted_damping(m1, 1.0, 1.0);
    let oracle = -(1.0 / PI) * 0.5f64.sqrt();
    assert!((d.re - oracle).abs() < 1e-14);
    assert!((d.re + 0.2251).abs() < 5e-5);
    // the ± eigenvalues share their real part and have opposite imaginary parts
    let [plus, minus] = m1.lambda_k1_pm(1.0);
    assert_eq!(plus.re, minus.re);
    assert_eq!(plus.im, -minus.im);
    let q = predicted_damping(m1, 4.0, 1.0);
    assert!((q.norm() / d.norm() - 2.0).abs() < 1e-14);
    let iv = neumann_modes(&Geometry::interval(16), 1).unwrap();
    assert_eq!(predicted_damping(&iv[0], 1.0, 1.0), Complex64::new(0.0, 0.0));
    assert_eq!(predicted_decay_rate(m1, 1.0, 1.0), -d.re);
    assert!((predicted_decay_rate(m1, 1.0, 16.0) / -d.re - 2.0).abs() < 1e-14);
}

#[test]
fn assumption_a_scan() {
    let rect = Geometry::rectangle(16);
    let r = assumption_a_check(&rect, &neumann_modes(&rect, 10).unwrap());
    assert!(r.per_component.is_satisfied() && r.global.is_satisfied());

    let iv = Geometry::interval(16);
    let modes = neumann_modes(&iv, 6).unwrap();
    let r = assumption_a_check(&iv, &modes);
    assert_eq!(r.per_component, AssumptionA::Violated(modes.iter().map(|m| m.label.clone()).collect()));
    // over the whole two-point boundary only even modes have a constant trace
    assert_eq!(r.global, AssumptionA::Violated(vec!["2".into(), "4".into(), "6".into()]));

    // the wall-normal modes cos(ny) have constant trace on each wall
    let ch = Geometry::channel(16, 24);
    let r = assumption_a_check(&ch, &neumann_modes(&ch, 10).unwrap());
    let expect: Vec<String> = (1..=10).map(|n| format!("c(0,{n})")).collect();
    let AssumptionA::Violated(mut flagged) = r.per_component else { panic!("expected violation") };
    flagged.sort();
    let mut e = expect.clone();
    e.sort();
    assert_eq!(flagged, e);
    let AssumptionA::Violated(global) = r.global else { panic!("expected violation") };
    assert!(global.iter().all(|l| l.starts_with("c(0,")));
}

#[test]
fn inviscid_energy_is_conserved() {
    let g = Geometry::interval(32);
    let grid = g.grid();
    let modes = neumann_modes(&g, 4).unwrap();
    let p = WaveParams::new(0.05, 0.0, 0.0, 1.0, 2.0);
    let mut init = WaveState::eigen(&grid, &modes[0], 1.0, p.b);
    init.add_scaled(&WaveState::eigen(&grid, &modes[3], -1.0, p.b), Complex64::new(0.5, -0.2));
    let tr = simulate_linear_waves(&grid, p, &init, 1.0, 0.01, 10).unwrap();
    assert!(tr.energy_drift() < 1e-8, "{:e}", tr.energy_drift());
}

#[test]
fn viscous_runs_dissipate_every_step() {
    for g in [Geometry::interval(48), Geometry::channel(48, 8), Geometry::rectangle(14)] {
        // the dense rectangle solve stays small only with a thick layer
        let (eps, mu) = if g.kind == GeometryKind::Rectangle { (1.0, 4.0) } else { (0.2, 0.05) };
        let g = Geometry { wall_nodes: g.wall_nodes.max(Geometry::required_wall_nodes(eps, mu)), ..g };
        let grid = g.grid();
        let modes = neumann_modes(&g, 2).unwrap();
        let p = WaveParams::new(eps, mu, 0.02, 1.0, 2.0);
        let mut init = WaveState::zeros(&grid);
        for (j, m) in modes.iter().enumerate().take(3) {
            init.add_scaled(&WaveState::eigen(&grid, m, 1.0, p.b), Complex64::new(1.0 / (j + 1) as f64, 0.0));
        }
        let tr = simulate_linear_waves(&grid, p, &init, 0.3, 0.01, 5).unwrap();
        assert!(tr.max_energy_increase() <= 1e-12, "{:?} {:e}", g.kind, tr.max_energy_increase());
    }
}

#[test]
fn resolution_check_rejects_thin_layers() {
    let g = Geometry::channel(16, 8);
    let grid = g.grid();
    let modes = neumann_modes(&g, 1).unwrap();
    let init = WaveState::eigen(&grid, &modes[0], 1.0, 2.0);
    let err = simulate_linear_waves(&grid, WaveParams::new(1e-2, 1.0, 0.0, 1.0, 2.0), &init, 0.1, 0.01, 1).unwrap_err();
    assert!(matches!(err, lowmach_core::Error::Resolution(_)));
}

/// Fitted decay rate of |b^+| for the channel mode cos(mx)/π.
fn channel_decay(m: usize, eps: f64, mu: f64, b: f64) -> (f64, NeumannMode) {
    let g = Geometry::channel(Geometry::required_wall_nodes(eps, mu), 8);
    let grid = g.grid();
    let modes = neumann_modes(&g, m).unwrap();
    let mode = find(&modes, &format!("c({m},0)")).clone();
    let guess = predicted_decay_rate(&mode, mu, b) / eps.sqrt() + interior_decay_rate(&mode, mu, 0.0);
    let t_final = 2.0 / guess;
    let p = WaveParams { eps, mu, lam: 0.0, b };
    let tr =
        simulate_linear_waves(&grid, p, &WaveState::eigen(&grid, &mode, 1.0, b), t_final, t_final / 400.0, 1).unwrap();
    let mt = &mode_amplitudes(&grid, &tr.states, std::slice::from_ref(&mode), b)[0];
    (fit_decay_rate(&mt.times, &mt.abs_plus(), 0.2 * t_final).unwrap(), mode)
}

#[test]
fn boundary_layer_damping_matches_first_order_rate() {
    // after removing the O(1) bulk-viscous rate, r√ε tracks the boundary-layer
    // prediction; at b = 1 it is the verbatim constant 1/(π√2)
    let eps = 1e-2;
    for b in [1.0, 2.0] {
        let (r, mode) = channel_decay(1, eps, 1.0, b);
        let pred = predicted_decay_rate(&mode, 1.0, b);
        let corrected = (r - interior_decay_rate(&mode, 1.0, 0.0)) * eps.sqrt();
        assert!((corrected - pred).abs() / pred <= 0.15, "b = {b}: {corrected} vs {pred}");
    }
}

#[test]
fn damping_extrapolates_to_the_b_scaled_constant() {
    // r√ε = c₀ + c₁√ε + …; a two-point extrapolation recovers c₀
    let b = 2.0;
    let (r1, mode) = channel_decay(1, 1e-2, 1.0, b);
    let (r2, _) = channel_decay(1, 4e-3, 1.0, b);
    let (s1, s2) = (1e-2f64.sqrt(), 4e-3f64.sqrt());
    let (y1, y2) = (r1 * s1, r2 * s2);
    let c0 = y2 - (y1 - y2) / (s1 - s2) * s2;
    let pred = predicted_decay_rate(&mode, 1.0, b);
    assert!((c0 - pred).abs() / pred < 0.03, "{c0} vs {pred}");
}

#[test]
fn single_mode_amplitudes() {
    for b in [1.0, 2.0] {
        let g = Geometry::rectangle(20);
        let grid = g.grid();
        let modes = neumann_modes(&g, 3).unwrap();
        let init = WaveState::eigen(&grid, &modes[0], 1.0, b);
        let traces = mode_amplitudes(&grid, &[init], &modes, b);
        assert!((traces[0].b_plus[0].norm() - 1.0).abs() < 1e-12);
        assert!(traces[0].b_minus[0].norm() < 1e-10);
        for t in &traces[1..] {
            assert!(t.b_plus[0].norm() < 1e-10 && t.b_minus[0].norm() < 1e-10);
        }
    }
}

#[test]
fn inviscid_amplitudes_rotate_at_the_eigenfrequency() {
    let g = Geometry::interval(32);
    let grid = g.grid();
    let modes = neumann_modes(&g, 3).unwrap();
    let eps = 0.05;
    let p = WaveParams { eps, mu: 0.0, lam: 0.0, b: 1.0 };
    let mut init = WaveState::eigen(&grid, &modes[1], 1.0, 1.0);
    init.add_scaled(&WaveState::eigen(&grid, &modes[1], -1.0, 1.0), Complex64::new(0.0, 0.5));
    let tr = simulate_linear_waves(&grid, p, &init, 1.0, 1e-3, 1).unwrap();
    let mt = &mode_amplitudes(&grid, &tr.states, &modes[1..2], 1.0)[0];
    let (p0, m0) = (mt.b_plus[0].norm(), mt.b_minus[0].norm());
    for (bp, bm) in mt.b_plus.iter().zip(&mt.b_minus) {
        assert!((bp.norm() - p0).abs() < 1e-8 && (bm.norm() - m0).abs() < 1e-8);
    }
    let omega = modes[1].lambda / eps;
    let dt = mt.times[1] - mt.times[0];
    for i in 1..mt.times.len() {
        let dp = (mt.b_plus[i] / mt.b_plus[i - 1]).arg() / dt;
        let dm = (mt.b_minus[i] / mt.b_minus[i - 1]).arg() / dt;
        assert!((dp + omega).abs() < 0.01 * omega, "{dp} vs {}", -omega);
        assert!((dm - omega).abs() < 0.01 * omega);
    }
    assert!(mt.beta_identity_defect() < 1e-10);
    let env = demodulate(mt, modes[1].lambda, eps);
    for v in &env.plus {
        assert!((v - env.plus[0]).norm() < 1e-8);
    }
    let zero = ModeTrace {
        b_plus: vec![Complex64::new(0.0, 0.0); 3],
        b_minus: vec![Complex64::new(0.0, 0.0); 3],
        times: vec![0.0, 0.1, 0.2],
        ..mt.clone()
    };
    let ze = demodulate(&zero, 1.0, eps);
    assert!(ze.plus.iter().chain(&ze.minus).all(|v| v.norm() == 0.0));
}

#[test]
fn demodulation_removes_the_fast_scale() {
    // viscous J mode: the raw amplitude turns at λ/ε, the envelope only decays
    let mu = 1e-2;
    let mut raw = Vec::new();
    let mut env = Vec::new();
    for eps in [1e-2, 5e-3] {
        let g = Geometry::interval(Geometry::required_wall_nodes(eps, mu));
        let grid = g.grid();
        let modes = neumann_modes(&g, 1).unwrap();
        let p = WaveParams { eps, mu, lam: 0.0, b: 1.0 };
        let init = WaveState::eigen(&grid, &modes[0], 1.0, 1.0);
        let tr = simulate_linear_waves(&grid, p, &init, 0.2, eps / 100.0, 1).unwrap();
        let mt = &mode_amplitudes(&grid, &tr.states, &modes, 1.0)[0];
        raw.push(max_time_derivative(&mt.times, &mt.b_plus));
        let e = demodulate(mt, modes[0].lambda, eps);
        env.push(max_time_derivative(&e.times, &e.plus));
    }
    let (rr, er) = (raw[1] / raw[0], env[1] / env[0]);
    assert!((rr - 2.0).abs() <= 0.2, "raw ratio {rr}");
    assert!((er - 1.0).abs() <= 0.1, "envelope ratio {er} ({env:?})");
    assert!(env[0] < 1e-2 * raw[0]);
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn damped_convolution_scaling() {
    let epss = [1e-3, 4e-4, 1e-4, 4e-5];
    let times: Vec<f64> = (0..=20000).map(|i| i as f64 / 20000.0).collect();
    let ones = vec![1.0; times.len()];
    let sine: Vec<f64> = times.iter().map(|t| (10.0 * t).sin()).collect();
    let mut v1 = Vec::new();
    let mut v2 = Vec::new();
    for &eps in &epss {
        let r = damped_convolution(&times, &ones, eps, -0.2251, f64::INFINITY).unwrap();
        let exact = eps.sqrt() / 0.2251 * (1.0 - (-0.2251 / eps.sqrt()).exp());
        assert!((r.value - exact).abs() < 1e-12);
        assert!(r.value <= eps.sqrt() / 0.2251);
        v1.push(r.value);
        let s = damped_convolution(&times, &sine, eps, -0.2251, 2.0).unwrap();
        assert_eq!(s.exponent, 0.25);
        v2.push(s.value);
    }
    assert!((slope(&epss, &v1) - 0.5).abs() < 0.02);
    assert!(slope(&epss, &v2) >= 0.25 - 0.1, "{}", slope(&epss, &v2));
}

#[test]
fn riemann_lebesgue_decay() {
    let times: Vec<f64> = (0..=20000).map(|i| i as f64 / 20000.0).collect();
    let env: Vec<Complex64> = times.iter().map(|t| Complex64::new((-t).exp(), 0.0)).collect();
    // the endpoint term carries a factor |1 − e^{−2}e^{i/ε}| that wobbles by
    // ±13%, so the sweep spans two decades
    let epss = [1e-2, 1e-3, 1e-4];
    let vals: Vec<f64> =
        epss.iter().map(|&e| riemann_lebesgue_defect(&times, &env, &env, 2.0, 1.0, e).unwrap().norm()).collect();
    assert!(slope(&epss, &vals) >= 0.9);
    let one = vec![Complex64::new(1.0, 0.0); times.len()];
    for &e in &epss {
        let v = riemann_lebesgue_defect(&times, &one, &one, 3.0, 1.0, e).unwrap();
        let exact = Complex64::new(0.0, -e / 2.0) * (Complex64::from_polar(1.0, 2.0 / e) - 1.0);
        assert!((v - exact).norm() < 1e-12);
        assert!(v.norm() <= 2.0 * e / 2.0 + 1e-15);
    }
}

#[test]
fn gradient_identity_on_rectangle() {
    let g = Geometry::rectangle(32);
    let grid = g.grid();
    let modes = neumann_modes(&g, 3).unwrap();
    let m10 = find(&modes, "(1,0)");
    assert!(gradient_identity_check(&grid, m10, m10).unwrap() < 1e-10);
    let pair: Vec<_> = modes.iter().filter(|m| (m.lambda * m.lambda - 5.0).abs() < 1e-12).collect();
    for a in &pair {
        for b in &pair {
            assert!(gradient_identity_check(&grid, a, b).unwrap() < 1e-8);
        }
    }
    assert!(gradient_identity_check(&grid, m10, pair[0]).is_err());
    let mut zero = m10.clone();
    zero.psi.iter_mut().for_each(|v| *v = 0.0);
    zero.grad.iter_mut().for_each(|v| *v = [0.0; 2]);
    assert_eq!(gradient_identity_check(&grid, &zero, &zero).unwrap(), 0.0);
}

#[test]
fn catalog_csv_round_trip() {
    let g = Geometry::channel(16, 8);
    let modes = neumann_modes(&g, 2).unwrap();
    let rows: Vec<CatalogRow> = modes.iter().map(|m| CatalogRow::from_mode(m, 1.0)).collect();
    let path = std::env::temp_dir().join(format!("lowmach-catalog-{}.csv", std::process::id()));
    write_mode_catalog_csv(&rows, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(text.lines().count(), rows.len() + 1);
    assert!(text.starts_with("k,label,lambda,class"));
    // quoted labels keep the column count at eight
    for line in text.lines().skip(1) {
        let rest = line.split('"').nth(2).unwrap();
        assert_eq!(rest.matches(',').count(), 6, "{line}");
    }
}
