//! Mode amplitudes of wave traces, envelope demodulation, the damped
//! Duhamel convolution and the Riemann–Lebesgue interaction defect.

use std::io::Write;
use std::path::Path;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::geometry::WaveGrid;
use super::modes::{ModeClass, NeumannMode};
use super::waves::WaveState;
use crate::error::{Error, Result};

type C = Complex64;

/// Amplitudes of one mode along a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeTrace {
    pub label: String,
    pub lambda: f64,
    /// Wave coefficient b of the run; the eigenfrequency is √b·λ/ε.
    pub b: f64,
    pub times: Vec<f64>,
    /// b^±(t) = ½⟨(φ, m), (Ψ, √b·m^±)⟩ in the pairing ∫φψ̄ + (1/b)∫m·n̄.
    pub b_plus: Vec<C>,
    pub b_minus: Vec<C>,
    /// β^±(t) = ∫φΨ + ∫m·m̄^± (unweighted pairing against (Ψ, m^±)).
    pub beta_plus: Vec<C>,
    pub beta_minus: Vec<C>,
    /// 2(Qm, m^±). Qm and m differ by a field orthogonal to gradients, so
    /// the pairing is evaluated with m.
    pub qm_plus: Vec<C>,
    pub qm_minus: Vec<C>,
}

impl ModeTrace {
    /// max over samples and signs of |2(Qm, m^±) − (β^± − β^∓)|.
    pub fn beta_identity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.times.len() {
            worst = worst.max((self.qm_plus[i] - (self.beta_plus[i] - self.beta_minus[i])).norm());
            worst = worst.max((self.qm_minus[i] - (self.beta_minus[i] - self.beta_plus[i])).norm());
        }
        worst
    }

    pub fn abs_plus(&self) -> Vec<f64> {
        self.b_plus.iter().map(|v| v.norm()).collect()
    }
}

/// (b^+, b^−, β^+, β^−, 2(m, m^+), 2(m, m^−)) of a single state.
fn pairings(grid: &WaveGrid, state: &WaveState, mode: &NeumannMode, b: f64) -> [C; 6] {
    let mut phi_psi = C::new(0.0, 0.0);
    let mut m_plus = C::new(0.0, 0.0);
    let mut m_minus = C::new(0.0, 0.0);
    for i in 0..grid.len() {
        let w = grid.weights[i];
        phi_psi += state.phi[i] * mode.psi[i] * w;
        let mp = mode.m_pm(i, 1.0);
        let mm = mode.m_pm(i, -1.0);
        m_plus += (state.m[i][0] * mp[0].conj() + state.m[i][1] * mp[1].conj()) * w;
        m_minus += (state.m[i][0] * mm[0].conj() + state.m[i][1] * mm[1].conj()) * w;
    }
    let rb = b.sqrt();
    [
        0.5 * (phi_psi + m_plus / rb),
        0.5 * (phi_psi + m_minus / rb),
        phi_psi + m_plus,
        phi_psi + m_minus,
        2.0 * m_plus,
        2.0 * m_minus,
    ]
}

pub fn mode_amplitudes(grid: &WaveGrid, states: &[WaveState], modes: &[NeumannMode], b: f64) -> Vec<ModeTrace> {
    modes
        .iter()
        .map(|mode| {
            let mut t = ModeTrace {
                label: mode.label.clone(),
                lambda: mode.lambda,
                b,
                times: Vec::with_capacity(states.len()),
                b_plus: Vec::new(),
                b_minus: Vec::new(),
                beta_plus: Vec::new(),
                beta_minus: Vec::new(),
                qm_plus: Vec::new(),
                qm_minus: Vec::new(),
            };
            for s in states {
                let [bp, bm, beta_p, beta_m, qp, qm] = pairings(grid, s, mode, b);
                t.times.push(s.time);
                t.b_plus.push(bp);
                t.b_minus.push(bm);
                t.beta_plus.push(beta_p);
                t.beta_minus.push(beta_m);
                t.qm_plus.push(qp);
                t.qm_minus.push(qm);
            }
            t
        })
        .collect()
}

/// b^± with the fast rotation removed.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub times: Vec<f64>,
    pub plus: Vec<C>,
    pub minus: Vec<C>,
}

/// envelope^±(t) = e^{±iωt} b^±(t) with ω = √b·λ/ε, the eigenfrequency of the
/// wave operator (λ/ε when b = 1).
pub fn demodulate(trace: &ModeTrace, lambda: f64, eps: f64) -> Envelope {
    let omega = trace.b.sqrt() * lambda / eps;
    let rot = |t: f64, s: f64| C::from_polar(1.0, s * omega * t);
    Envelope {
        times: trace.times.clone(),
        plus: trace.times.iter().zip(&trace.b_plus).map(|(&t, v)| rot(t, 1.0) * v).collect(),
        minus: trace.times.iter().zip(&trace.b_minus).map(|(&t, v)| rot(t, -1.0) * v).collect(),
    }
}

/// max |Δv/Δt| over consecutive samples.
pub fn max_time_derivative(times: &[f64], values: &[C]) -> f64 {
    times.windows(2).zip(values.windows(2)).map(|(t, v)| (v[1] - v[0]).norm() / (t[1] - t[0])).fold(0.0, f64::max)
}

/// Least-squares slope r of ln|v| ≈ c − r t over samples with t ≥ `from`.
pub fn fit_decay_rate(times: &[f64], values: &[f64], from: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = times.iter().zip(values).filter(|(t, _)| **t >= from).map(|(t, v)| (*t, *v)).collect();
    if pts.len() < 3 || pts.iter().any(|p| p.1 <= 0.0) {
        return Err(Error::InvalidParameter("decay fit needs ≥ 3 positive samples".into()));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ml = pts.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1.ln() - ml)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    Ok(-sxy / sxx)
}

/// φ₁(z) = (e^z − 1)/z and φ₂(z) = (e^z − 1 − z)/z², with series near 0.
fn phi12(z: C) -> (C, C) {
    if z.norm() < 1e-2 {
        let mut p1 = C::new(0.0, 0.0);
        let mut p2 = C::new(0.0, 0.0);
        let mut term = C::new(1.0, 0.0);
        for j in 0..10 {
            // term = z^j / j!
            p1 += term / (j + 1) as f64;
            p2 += term / ((j + 1) * (j + 2)) as f64;
            term = term * z / (j + 1) as f64;
        }
        (p1, p2)
    } else {
        let e = z.exp();
        ((e - 1.0) / z, (e - 1.0 - z) / (z * z))
    }
}

/// ∫ over one step of length h of e^{c(h − s)} g(s) ds with g linear between
/// g0 and g1; exact for any c.
fn exp_linear_step(c: C, h: f64, g0: C, g1: C) -> C {
    let (p1, p2) = phi12(c * h);
    h * (g0 * (p1 - p2) + g1 * p2)
}

/// sup_t ∫₀ᵗ e^{rate(t−s)/√ε}|a(s)| ds and the Hölder bound ingredients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionReport {
    pub value: f64,
    /// ‖a‖_{L^q(0,T)}.
    pub a_norm: f64,
    /// Conjugate exponent p with 1/p + 1/q = 1.
    pub p: f64,
    /// Predicted ε exponent 1/(2p).
    pub exponent: f64,
}

/// Evaluates the damped Duhamel convolution on uniformly spaced samples of
/// a, integrating e^{rate(t−s)/√ε} exactly against the piecewise-linear
/// interpolant of |a|. `q = f64::INFINITY` selects the sup norm.
pub fn damped_convolution(times: &[f64], a: &[f64], eps: f64, rate: f64, q: f64) -> Result<ConvolutionReport> {
    if !(rate < 0.0) {
        return Err(Error::InvalidParameter(format!("damping rate must be negative, got {rate}")));
    }
    if !(q >= 1.0) {
        return Err(Error::InvalidParameter(format!("need q ≥ 1, got {q}")));
    }
    if times.len() != a.len() || times.len() < 2 {
        return Err(Error::InvalidParameter("need ≥ 2 matching samples".into()));
    }
    let c = C::new(rate / eps.sqrt(), 0.0);
    let mut acc = C::new(0.0, 0.0);
    let mut sup: f64 = 0.0;
    for i in 1..times.len() {
        let h = times[i] - times[i - 1];
        acc = acc * (c * h).exp() + exp_linear_step(c, h, C::new(a[i - 1].abs(), 0.0), C::new(a[i].abs(), 0.0));
        sup = sup.max(acc.re);
    }
    let a_norm = if q.is_infinite() {
        a.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
    } else {
        let s: f64 = (1..times.len())
            .map(|i| 0.5 * (times[i] - times[i - 1]) * (a[i - 1].abs().powf(q) + a[i].abs().powf(q)))
            .sum();
        s.powf(1.0 / q)
    };
    let p = if q.is_infinite() {
        1.0
    } else if q == 1.0 {
        f64::INFINITY
    } else {
        q / (q - 1.0)
    };
    Ok(ConvolutionReport { value: sup, a_norm, p, exponent: 0.5 / p })
}

/// ∫₀ᵀ e^{i(λ_k − λ_l)t/ε} e_k(t) e_l(t) dt with a Filon-type rule: the
/// envelope product is interpolated linearly and the oscillation integrated
/// exactly.
pub fn riemann_lebesgue_defect(
    times: &[f64],
    env_k: &[C],
    env_l: &[C],
    lambda_k: f64,
    lambda_l: f64,
    eps: f64,
) -> Result<C> {
    if times.len() != env_k.len() || times.len() != env_l.len() || times.len() < 2 {
        return Err(Error::InvalidParameter("envelopes must share a time grid of ≥ 2 samples".into()));
    }
    let w = (lambda_k - lambda_l) / eps;
    let mut total = C::new(0.0, 0.0);
    for i in 1..times.len() {
        let (t0, t1) = (times[i - 1], times[i]);
        let h = t1 - t0;
        let g0 = env_k[i - 1] * env_l[i - 1];
        let g1 = env_k[i] * env_l[i];
        // ∫₀ʰ e^{iw(t0+s)} g(s) ds = e^{iw t1} ∫₀ʰ e^{−iw(h−s)} g(s) ds
        total += C::from_polar(1.0, w * t1) * exp_linear_step(C::new(0.0, -w), h, g0, g1);
    }
    Ok(total)
}

/// One row of the exported mode catalog.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogRow {
    pub index: usize,
    pub label: String,
    pub lambda: f64,
    pub class: ModeClass,
    pub boundary_grad_integral: f64,
    pub re_lambda1: f64,
    pub fitted_rate: Option<f64>,
    pub relative_error: Option<f64>,
}

impl CatalogRow {
    pub fn from_mode(mode: &NeumannMode, mu: f64) -> Self {
        Self {
            index: mode.index,
            label: mode.label.clone(),
            lambda: mode.lambda,
            class: mode.class,
            boundary_grad_integral: mode.boundary_grad_integral,
            re_lambda1: super::modes::predicted_damping(mode, mu, 1.0).re,
            fitted_rate: None,
            relative_error: None,
        }
    }
}

/// Labels such as `c(1,0)` contain commas and are written quoted.
pub fn write_mode_catalog_csv(rows: &[CatalogRow], path: &Path) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "k,label,lambda,class,boundary_grad_integral,re_lambda1,fitted_rate,relative_error")?;
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.12e}")).unwrap_or_default();
    for r in rows {
        writeln!(
            f,
            "{},\"{}\",{:.12e},{},{:.12e},{:.12e},{},{}",
            r.index,
            r.label,
            r.lambda,
            r.class,
            r.boundary_grad_integral,
            r.re_lambda1,
            opt(r.fitted_rate),
            opt(r.relative_error)
        )?;
    }
    f.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_envelope_matches_closed_form() {
        let eps = 1e-2;
        let times: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let one = vec![C::new(1.0, 0.0); times.len()];
        let v = riemann_lebesgue_defect(&times, &one, &one, 2.0, 1.0, eps).unwrap();
        // ∫₀¹ e^{it/ε} dt = −iε(e^{i/ε} − 1)
        let exact = C::new(0.0, -eps) * (C::from_polar(1.0, 1.0 / eps) - 1.0);
        assert!((v - exact).norm() < 1e-13);
        assert!(v.norm() <= 2.0 * eps);
        let same = riemann_lebesgue_defect(&times, &one, &one, 1.0, 1.0, eps).unwrap();
        assert!((same - 1.0).norm() < 1e-14);
    }

    #[test]
    fn damped_convolution_of_constant() {
        let eps: f64 = 1e-2;
        let rate = -0.3;
        let times: Vec<f64> = (0..=50).map(|i| i as f64 / 50.0).collect();
        let a = vec![1.0; times.len()];
        let r = damped_convolution(&times, &a, eps, rate, f64::INFINITY).unwrap();
        let exact = eps.sqrt() / rate.abs() * (1.0 - (rate / eps.sqrt()).exp());
        assert!((r.value - exact).abs() < 1e-13);
        assert_eq!(r.exponent, 0.5);
        let zero = damped_convolution(&times, &vec![0.0; times.len()], eps, rate, 2.0).unwrap();
        assert_eq!(zero.value, 0.0);
        assert!(damped_convolution(&times, &a, eps, 0.0, 2.0).is_err());
    }

    #[test]
    fn decay_fit_recovers_rate() {
        let times: Vec<f64> = (0..40).map(|i| i as f64 * 0.05).collect();
        let v: Vec<f64> = times.iter().map(|t| 3.0 * (-1.7 * t).exp()).collect();
        assert!((fit_decay_rate(&times, &v, 0.0).unwrap() - 1.7).abs() < 1e-12);
    }
}
