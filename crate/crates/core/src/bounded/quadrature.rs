//! Legendre quadrature and Legendre–Gauss–Lobatto collocation.

use super::linalg::Mat;

/// P_n(x) and P_n'(x) by the three-term recurrence.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = if (1.0 - x * x).abs() < 1e-300 {
        0.5 * nf * (nf + 1.0) * x.powi(n as i32 + 1)
    } else {
        nf * (p0 - x * p1) / (1.0 - x * x)
    };
    (p1, dp)
}

/// Gauss–Legendre nodes and weights on [a, b].
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        nodes[i] = 0.5 * (b - a) * x + 0.5 * (a + b);
        weights[i] = (b - a) / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Legendre–Gauss–Lobatto collocation on [a, b] with `n + 1` nodes.
///
/// The differentiation matrix and the diagonal weights satisfy the
/// summation-by-parts relation W D + Dᵀ W = diag(−1, 0, …, 0, 1).
#[derive(Debug, Clone)]
pub struct Lobatto {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub diff: Mat,
}

impl Lobatto {
    pub fn new(n: usize, a: f64, b: f64) -> Self {
        assert!(n >= 2, "need at least three Lobatto nodes");
        let nf = n as f64;
        let mut xi = vec![0.0; n + 1];
        xi[0] = -1.0;
        xi[n] = 1.0;
        // interior nodes are the roots of P_n'; Newton on (1 − x²)P_n' = n(P_{n−1} − xP_n)
        for (j, x_out) in xi.iter_mut().enumerate().take(n).skip(1) {
            let mut x = -(std::f64::consts::PI * j as f64 / nf).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                // q = P_n', q' = (2x P_n' − n(n+1) P_n)/(1 − x²)
                let ddp = (2.0 * x * dp - nf * (nf + 1.0) * p) / (1.0 - x * x);
                let dx = dp / ddp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            *x_out = x;
        }
        let pn: Vec<f64> = xi.iter().map(|&x| legendre(n, x).0).collect();
        let half = 0.5 * (b - a);
        let weights = pn.iter().map(|p| half * 2.0 / (nf * (nf + 1.0) * p * p)).collect();
        let mut diff = Mat::zeros(n + 1, n + 1);
        for i in 0..=n {
            let mut row_sum = 0.0;
            for j in 0..=n {
                if i != j {
                    let d = pn[i] / (pn[j] * (xi[i] - xi[j])) / half;
                    diff[(i, j)] = d;
                    row_sum += d;
                }
            }
            // rows of D annihilate constants
            diff[(i, i)] = -row_sum;
        }
        let nodes = xi.iter().map(|&x| a + half * (x + 1.0)).collect();
        Self { nodes, weights, diff }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gauss_integrates_polynomials_and_trig() {
        let (x, w) = gauss_legendre(5, -1.0, 1.0);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-14);
        let (x, w) = gauss_legendre(40, 0.0, PI);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.sin()).sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn lobatto_differentiates_and_integrates() {
        let l = Lobatto::new(32, 0.0, PI);
        let f: Vec<f64> = l.nodes.iter().map(|x| (3.0 * x).cos()).collect();
        let df = l.diff.matvec(&f);
        for (x, d) in l.nodes.iter().zip(&df) {
            assert!((d + 3.0 * (3.0 * x).sin()).abs() < 1e-10);
        }
        let s: f64 = l.nodes.iter().zip(&l.weights).map(|(x, w)| w * x.sin()).sum();
        assert!((s - 2.0).abs() < 1e-13);
    }

    #[test]
    fn summation_by_parts() {
        let l = Lobatto::new(24, 0.0, 2.0);
        let n = l.len();
        for i in 0..n {
            for j in 0..n {
                let q = l.weights[i] * l.diff[(i, j)] + l.weights[j] * l.diff[(j, i)];
                let b = if i == j && i == 0 {
                    -1.0
                } else if i == j && i == n - 1 {
                    1.0
                } else {
                    0.0
                };
                assert!((q - b).abs() < 1e-11, "({i},{j}) {q}");
            }
        }
    }
}
