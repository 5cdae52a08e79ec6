//! Closed-form Neumann eigenmodes of the model geometries, their I/J
//! classification and the first-order boundary-layer damping.

use std::f64::consts::PI;
use std::fmt;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::geometry::{Geometry, GeometryKind, WaveGrid};
use super::linalg::{symmetric_eigen, Mat};
use crate::error::{Error, Result};

/// Threshold separating damped from undamped modes.
pub const CLASS_TOL: f64 = 1e-10;

const BOUNDARY_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Trig {
    Cos(usize),
    Sin(usize),
}

impl Trig {
    pub fn value(self, x: f64) -> f64 {
        match self {
            Trig::Cos(k) => (k as f64 * x).cos(),
            Trig::Sin(k) => (k as f64 * x).sin(),
        }
    }

    pub fn deriv(self, x: f64) -> f64 {
        match self {
            Trig::Cos(k) => -(k as f64) * (k as f64 * x).sin(),
            Trig::Sin(k) => k as f64 * (k as f64 * x).cos(),
        }
    }

    pub fn wavenumber(self) -> usize {
        match self {
            Trig::Cos(k) | Trig::Sin(k) => k,
        }
    }
}

/// Ψ(x, y) = Σ c · X(x) · Y(y) with trigonometric factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeShape {
    pub terms: Vec<(f64, Trig, Trig)>,
}

impl ModeShape {
    pub fn value(&self, p: [f64; 2]) -> f64 {
        self.terms.iter().map(|(c, x, y)| c * x.value(p[0]) * y.value(p[1])).sum()
    }

    pub fn grad(&self, p: [f64; 2]) -> [f64; 2] {
        let mut g = [0.0; 2];
        for (c, x, y) in &self.terms {
            g[0] += c * x.deriv(p[0]) * y.value(p[1]);
            g[1] += c * x.value(p[0]) * y.deriv(p[1]);
        }
        g
    }

    /// Eigenvalue residual |ΔΨ + λ²Ψ| evaluated term by term.
    pub fn eigen_residual(&self, lambda: f64, p: [f64; 2]) -> f64 {
        let lap: f64 = self
            .terms
            .iter()
            .map(|(c, x, y)| {
                let k2 = (x.wavenumber().pow(2) + y.wavenumber().pow(2)) as f64;
                -k2 * c * x.value(p[0]) * y.value(p[1])
            })
            .sum();
        (lap + lambda * lambda * self.value(p)).abs()
    }

    fn combine(shapes: &[&ModeShape], coefs: &[f64]) -> ModeShape {
        let mut terms = Vec::new();
        for (s, &a) in shapes.iter().zip(coefs) {
            if a.abs() < 1e-15 {
                continue;
            }
            terms.extend(s.terms.iter().map(|(c, x, y)| (a * c, *x, *y)));
        }
        ModeShape { terms }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModeClass {
    /// Nonvanishing tangential boundary gradient: damped at rate ~ 1/√ε.
    I,
    /// m^± vanishes on the boundary: no first-order damping.
    J,
}

impl fmt::Display for ModeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModeClass::I => "I",
            ModeClass::J => "J",
        })
    }
}

/// A zero-mean, unit-norm Neumann eigenfunction sampled on a wave grid.
#[derive(Debug, Clone)]
pub struct NeumannMode {
    pub index: usize,
    pub label: String,
    /// λ_{k,0} with −ΔΨ = λ²Ψ.
    pub lambda: f64,
    pub shape: ModeShape,
    pub psi: Vec<f64>,
    pub grad: Vec<[f64; 2]>,
    /// ∫_{∂Ω} |∇Ψ|² ds.
    pub boundary_grad_integral: f64,
    /// max_{∂Ω} |∇Ψ| / λ, the largest wall value of |m^±|.
    pub boundary_m_max: f64,
    pub class: ModeClass,
}

impl NeumannMode {
    /// m^±_{k,0} = ±∇Ψ/(iλ) at grid point `i`.
    pub fn m_pm(&self, i: usize, sign: f64) -> [Complex64; 2] {
        let c = Complex64::new(0.0, -sign / self.lambda);
        [c * self.grad[i][0], c * self.grad[i][1]]
    }

    /// iλ^±_{k,1} for both signs, evaluated verbatim from the boundary
    /// integral (index 0 is "+").
    pub fn lambda_k1_pm(&self, mu: f64) -> [Complex64; 2] {
        [predicted_damping(self, mu, 1.0), predicted_damping(self, mu, -1.0)]
    }

    /// Whether the classification, the boundary values of m^± and the
    /// predicted damping all agree.
    pub fn classification_consistent(&self, mu: f64) -> bool {
        let zero = predicted_damping(self, mu, 1.0) == Complex64::new(0.0, 0.0);
        match self.class {
            ModeClass::J => zero && self.boundary_m_max <= CLASS_TOL,
            ModeClass::I => !zero || mu == 0.0,
        }
    }
}

/// I iff ∫_{∂Ω}|∇Ψ|² ds exceeds the tolerance.
pub fn classify_mode(boundary_grad_integral: f64) -> ModeClass {
    if boundary_grad_integral > CLASS_TOL {
        ModeClass::I
    } else {
        ModeClass::J
    }
}

/// iλ^±_{k,1} = −((1 ± i)/2) √(μ/(2λ³)) ∫_{∂Ω}|∇Ψ|² ds, exactly zero on J.
pub fn predicted_damping(mode: &NeumannMode, mu: f64, sign: f64) -> Complex64 {
    if mode.class == ModeClass::J {
        return Complex64::new(0.0, 0.0);
    }
    let mag = (mu / (2.0 * mode.lambda.powi(3))).sqrt() * mode.boundary_grad_integral;
    -Complex64::new(0.5, 0.5 * sign) * mag
}

/// First-order decay rate of the wave amplitude for a general wave
/// coefficient b: a boundary layer driven at frequency √b·λ/ε is thinner by
/// b^{−1/4} and dissipates proportionally more, so the rate of
/// [`predicted_damping`] scales by b^{1/4}. Equal to the verbatim formula at
/// b = 1.
pub fn predicted_decay_rate(mode: &NeumannMode, mu: f64, b: f64) -> f64 {
    -predicted_damping(mode, mu, 1.0).re * b.powf(0.25)
}

/// Amplitude decay from bulk viscosity, (μ + λ)λ²_{k,0}/2, which is O(1)
/// and therefore one order below the boundary-layer term.
pub fn interior_decay_rate(mode: &NeumannMode, mu: f64, lam: f64) -> f64 {
    0.5 * (mu + lam) * mode.lambda * mode.lambda
}

struct Candidate {
    label: String,
    lambda2: usize,
    shape: ModeShape,
}

fn candidates(kind: GeometryKind, cutoff: usize) -> Vec<Candidate> {
    let mut out = Vec::new();
    let norm_x = |m: usize, len: f64| if m == 0 { 1.0 / len.sqrt() } else { (2.0 / len).sqrt() };
    match kind {
        GeometryKind::Interval => {
            for k in 1..=cutoff {
                out.push(Candidate {
                    label: format!("{k}"),
                    lambda2: k * k,
                    shape: ModeShape { terms: vec![((2.0 / PI).sqrt(), Trig::Cos(k), Trig::Cos(0))] },
                });
            }
        }
        GeometryKind::Channel => {
            for m in 0..=cutoff {
                for n in 0..=cutoff {
                    if m == 0 && n == 0 {
                        continue;
                    }
                    let c = norm_x(m, 2.0 * PI) * norm_x(n, PI);
                    out.push(Candidate {
                        label: format!("c({m},{n})"),
                        lambda2: m * m + n * n,
                        shape: ModeShape { terms: vec![(c, Trig::Cos(m), Trig::Cos(n))] },
                    });
                    if m > 0 {
                        out.push(Candidate {
                            label: format!("s({m},{n})"),
                            lambda2: m * m + n * n,
                            shape: ModeShape { terms: vec![(c, Trig::Sin(m), Trig::Cos(n))] },
                        });
                    }
                }
            }
        }
        GeometryKind::Rectangle => {
            for m in 0..=cutoff {
                for n in 0..=cutoff {
                    if m == 0 && n == 0 {
                        continue;
                    }
                    out.push(Candidate {
                        label: format!("({m},{n})"),
                        lambda2: m * m + n * n,
                        shape: ModeShape { terms: vec![(norm_x(m, PI) * norm_x(n, PI), Trig::Cos(m), Trig::Cos(n))] },
                    });
                }
            }
        }
    }
    out.sort_by(|a, b| a.lambda2.cmp(&b.lambda2).then_with(|| a.label.cmp(&b.label)));
    out
}

fn boundary_gram(g: &Geometry, shapes: &[&ModeShape]) -> Mat {
    let bq = g.boundary_quadrature(BOUNDARY_POINTS);
    let grads: Vec<Vec<[f64; 2]>> = shapes.iter().map(|s| bq.iter().map(|b| s.grad(b.x)).collect()).collect();
    Mat::from_fn(shapes.len(), shapes.len(), |i, j| {
        bq.iter()
            .enumerate()
            .map(|(q, b)| b.weight * (grads[i][q][0] * grads[j][q][0] + grads[i][q][1] * grads[j][q][1]))
            .sum()
    })
}

fn finish(g: &Geometry, grid: &WaveGrid, index: usize, label: String, lambda: f64, shape: ModeShape) -> NeumannMode {
    let bq = g.boundary_quadrature(BOUNDARY_POINTS);
    let mut integral = 0.0;
    let mut gmax: f64 = 0.0;
    for b in &bq {
        let gr = shape.grad(b.x);
        let s = gr[0] * gr[0] + gr[1] * gr[1];
        integral += b.weight * s;
        gmax = gmax.max(s.sqrt());
    }
    let psi = grid.points.iter().map(|&p| shape.value(p)).collect();
    let grad = grid.points.iter().map(|&p| shape.grad(p)).collect();
    NeumannMode {
        index,
        label,
        lambda,
        shape,
        psi,
        grad,
        boundary_grad_integral: integral,
        boundary_m_max: gmax / lambda,
        class: classify_mode(integral),
    }
}

/// Neumann eigenmodes up to the wavenumber cutoff, sorted by λ. Within each
/// degenerate eigenspace the basis is rotated so that the boundary
/// cross-integrals ∫_{∂Ω}∇Ψ_k·∇Ψ_l ds vanish.
pub fn neumann_modes(g: &Geometry, cutoff: usize) -> Result<Vec<NeumannMode>> {
    if cutoff == 0 {
        return Err(Error::InvalidParameter("mode cutoff must be at least 1".into()));
    }
    g.validate()?;
    let grid = g.grid();
    let cands = candidates(g.kind, cutoff);
    let mut modes = Vec::with_capacity(cands.len());
    let mut start = 0;
    while start < cands.len() {
        let mut end = start + 1;
        while end < cands.len() && cands[end].lambda2 == cands[start].lambda2 {
            end += 1;
        }
        let group = &cands[start..end];
        let lambda = (group[0].lambda2 as f64).sqrt();
        if group.len() == 1 {
            let c = &group[0];
            modes.push(finish(g, &grid, modes.len(), c.label.clone(), lambda, c.shape.clone()));
        } else {
            let shapes: Vec<&ModeShape> = group.iter().map(|c| &c.shape).collect();
            let gram = boundary_gram(g, &shapes);
            let scale = gram.max_abs();
            let rotate = scale > 0.0
                && (0..gram.rows()).any(|i| (0..gram.cols()).any(|j| i != j && gram[(i, j)].abs() > 1e-13 * scale));
            let base: String = group.iter().map(|c| c.label.as_str()).collect::<Vec<_>>().join("+");
            if rotate {
                let (_, vecs) = symmetric_eigen(&gram);
                for a in 0..group.len() {
                    let coefs: Vec<f64> = (0..group.len()).map(|i| vecs[(i, a)]).collect();
                    let shape = ModeShape::combine(&shapes, &coefs);
                    modes.push(finish(g, &grid, modes.len(), format!("{base}#{a}"), lambda, shape));
                }
            } else {
                for c in group {
                    modes.push(finish(g, &grid, modes.len(), c.label.clone(), lambda, c.shape.clone()));
                }
            }
        }
        start = end;
    }
    Ok(modes)
}

/// Gram matrix of the sampled modes under the grid quadrature.
pub fn mode_gram(grid: &WaveGrid, modes: &[NeumannMode]) -> Mat {
    Mat::from_fn(modes.len(), modes.len(), |i, j| grid.inner(&modes[i].psi, &modes[j].psi))
}

/// Largest boundary cross-integral between distinct modes of equal λ.
pub fn degenerate_boundary_coupling(g: &Geometry, modes: &[NeumannMode]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in modes.iter().enumerate() {
        for b in &modes[i + 1..] {
            if (a.lambda - b.lambda).abs() < 1e-12 {
                let gram = boundary_gram(g, &[&a.shape, &b.shape]);
                worst = worst.max(gram[(0, 1)].abs());
            }
        }
    }
    worst
}

/// Outcome of scanning for nontrivial solutions of the over-determined
/// Neumann problem (eigenfunction with constant boundary trace).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AssumptionA {
    Satisfied,
    Violated(Vec<String>),
}

impl AssumptionA {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, AssumptionA::Satisfied)
    }
}

/// Both readings of "constant on ∂Ω": per connected boundary component,
/// and over the whole boundary at once. They differ only when the boundary
/// is disconnected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub per_component: AssumptionA,
    pub global: AssumptionA,
}

fn trace_variance(values: &[(f64, f64)]) -> f64 {
    let w: f64 = values.iter().map(|v| v.1).sum();
    let mean = values.iter().map(|(v, wt)| v * wt).sum::<f64>() / w;
    values.iter().map(|(v, wt)| wt * (v - mean).powi(2)).sum::<f64>() / w
}

/// Flags modes whose boundary trace has variance ≤ 1e-10.
pub fn assumption_a_check(g: &Geometry, modes: &[NeumannMode]) -> AssumptionReport {
    let bq = g.boundary_quadrature(BOUNDARY_POINTS);
    let mut per = Vec::new();
    let mut global = Vec::new();
    for m in modes {
        let trace: Vec<(usize, f64, f64)> = bq.iter().map(|b| (b.component, m.shape.value(b.x), b.weight)).collect();
        let all: Vec<(f64, f64)> = trace.iter().map(|t| (t.1, t.2)).collect();
        if trace_variance(&all) <= CLASS_TOL {
            global.push(m.label.clone());
        }
        let each_const = (0..g.boundary_components()).all(|c| {
            let part: Vec<(f64, f64)> = trace.iter().filter(|t| t.0 == c).map(|t| (t.1, t.2)).collect();
            trace_variance(&part) <= CLASS_TOL
        });
        if each_const {
            per.push(m.label.clone());
        }
    }
    let verdict = |v: Vec<String>| if v.is_empty() { AssumptionA::Satisfied } else { AssumptionA::Violated(v) };
    AssumptionReport { per_component: verdict(per), global: verdict(global) }
}

/// L² residual on interior grid points of
/// div(∇Ψ_k⊗∇Ψ_l + ∇Ψ_l⊗∇Ψ_k) = −λ²∇(Ψ_kΨ_l) + ∇(∇Ψ_k·∇Ψ_l),
/// with every derivative taken by grid differentiation of sampled values.
pub fn gradient_identity_check(grid: &WaveGrid, k: &NeumannMode, l: &NeumannMode) -> Result<f64> {
    if (k.lambda - l.lambda).abs() > 1e-12 * k.lambda.max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "gradient identity needs equal eigenvalues, got {} and {}",
            k.lambda, l.lambda
        )));
    }
    let n = grid.len();
    let dim = grid.dim();
    let comp = |m: &NeumannMode, c: usize| -> Vec<f64> { m.grad.iter().map(|g| g[c]).collect() };
    let (gk, gl): (Vec<Vec<f64>>, Vec<Vec<f64>>) =
        ((0..dim).map(|c| comp(k, c)).collect(), (0..dim).map(|c| comp(l, c)).collect());
    let d = |c: usize, f: &[f64]| if c == 0 { grid.dx(f) } else { grid.dy(f) };
    let prod: Vec<f64> = (0..n).map(|i| k.psi[i] * l.psi[i]).collect();
    let dot: Vec<f64> = (0..n).map(|i| (0..dim).map(|c| gk[c][i] * gl[c][i]).sum()).collect();
    let lam2 = k.lambda * k.lambda;
    let mut sum = 0.0;
    for j in 0..dim {
        let mut lhs = vec![0.0; n];
        for i in 0..dim {
            let t: Vec<f64> = (0..n).map(|p| gk[i][p] * gl[j][p] + gl[i][p] * gk[j][p]).collect();
            for (o, v) in lhs.iter_mut().zip(d(i, &t)) {
                *o += v;
            }
        }
        let dp = d(j, &prod);
        let dd = d(j, &dot);
        for p in 0..n {
            if grid.on_wall(p) {
                continue;
            }
            let rhs = -lam2 * dp[p] + dd[p];
            sum += grid.weights[p] * (lhs[p] - rhs).powi(2);
        }
    }
    Ok(sum.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_spectrum_and_class() {
        let g = Geometry::interval(24);
        let modes = neumann_modes(&g, 4).unwrap();
        assert_eq!(modes.len(), 4);
        assert_eq!(modes[0].lambda, 1.0);
        for m in &modes {
            assert_eq!(m.class, ModeClass::J);
            assert_eq!(predicted_damping(m, 1.0, 1.0), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn channel_first_mode_integral() {
        let g = Geometry::channel(24, 8);
        let modes = neumann_modes(&g, 2).unwrap();
        let m1 = modes.iter().find(|m| m.label == "c(1,0)").unwrap();
        assert!((m1.boundary_grad_integral - 2.0 / PI).abs() < 1e-12);
        let d = predicted_damping(m1, 1.0, 1.0);
        assert!((d.re + 1.0 / (PI * 2f64.sqrt())).abs() < 1e-12);
        assert!(modes.iter().any(|m| m.class == ModeClass::J));
    }

    #[test]
    fn rectangle_degenerate_pair_is_boundary_orthogonal() {
        let g = Geometry::rectangle(24);
        let modes = neumann_modes(&g, 3).unwrap();
        assert!(modes.iter().any(|m| (m.lambda * m.lambda - 5.0).abs() < 1e-12));
        assert!(degenerate_boundary_coupling(&g, &modes) < 1e-12);
        let gram = mode_gram(&g.grid(), &modes);
        assert!(gram.add_scaled(&Mat::identity(modes.len()), -1.0).max_abs() < 1e-12);
    }
}
