//! Model geometries and their collocation grids.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::quadrature::{gauss_legendre, Lobatto};
use crate::error::{Error, Result};

/// Fewest collocation nodes required inside the viscous wall layer.
pub const LAYER_NODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryKind {
    /// (0, π) with walls at both ends.
    Interval,
    /// [0, 2π) periodic × (0, π) with walls at y = 0 and y = π.
    Channel,
    /// (0, π)² with walls on all four sides.
    Rectangle,
}

impl GeometryKind {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "interval" => Ok(Self::Interval),
            "channel" => Ok(Self::Channel),
            "rectangle" => Ok(Self::Rectangle),
            other => Err(Error::InvalidParameter(format!("unknown geometry `{other}`"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Interval => "interval",
            Self::Channel => "channel",
            Self::Rectangle => "rectangle",
        }
    }
}

/// A model domain together with its wall resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub kind: GeometryKind,
    /// Polynomial degree of the Lobatto collocation across each wall-bounded
    /// direction (`wall_nodes + 1` nodes).
    pub wall_nodes: usize,
    /// Equispaced samples along the periodic direction of the channel.
    pub periodic_points: usize,
}

impl Geometry {
    pub fn interval(wall_nodes: usize) -> Self {
        Self { kind: GeometryKind::Interval, wall_nodes, periodic_points: 1 }
    }

    pub fn channel(wall_nodes: usize, periodic_points: usize) -> Self {
        Self { kind: GeometryKind::Channel, wall_nodes, periodic_points }
    }

    pub fn rectangle(wall_nodes: usize) -> Self {
        Self { kind: GeometryKind::Rectangle, wall_nodes, periodic_points: 1 }
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            GeometryKind::Interval => 1,
            _ => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.wall_nodes < 4 {
            return Err(Error::InvalidGrid(format!("need at least 4 wall nodes, got {}", self.wall_nodes)));
        }
        if self.kind == GeometryKind::Channel && (self.periodic_points < 4 || !self.periodic_points.is_multiple_of(2)) {
            return Err(Error::InvalidGrid(format!(
                "channel needs an even number ≥ 4 of periodic points, got {}",
                self.periodic_points
            )));
        }
        Ok(())
    }

    /// Collocation nodes strictly inside a wall layer of the given width.
    pub fn nodes_in_layer(&self, width: f64) -> usize {
        let l = Lobatto::new(self.wall_nodes, 0.0, PI);
        l.nodes.iter().filter(|&&x| x > 0.0 && x < width).count()
    }

    /// Rejects resolutions that leave fewer than eight nodes inside the
    /// √(εμ) viscous layer. Inviscid runs have no layer and always pass.
    pub fn check_resolution(&self, eps: f64, mu: f64) -> Result<()> {
        self.validate()?;
        if mu <= 0.0 {
            return Ok(());
        }
        let width = (eps * mu).sqrt();
        let inside = self.nodes_in_layer(width);
        if inside < LAYER_NODES {
            return Err(Error::Resolution(format!(
                "{} nodes inside the wall layer of width {width:.3e}, need {LAYER_NODES}; raise wall_nodes above {}",
                inside, self.wall_nodes
            )));
        }
        Ok(())
    }

    /// Smallest `wall_nodes` that resolves the √(εμ) layer.
    pub fn required_wall_nodes(eps: f64, mu: f64) -> usize {
        let width = (eps * mu).sqrt();
        let mut n = 8;
        while Geometry::interval(n).nodes_in_layer(width) < LAYER_NODES {
            n += 8;
        }
        n
    }

    pub fn grid(&self) -> WaveGrid {
        WaveGrid::new(*self)
    }

    /// Quadrature on the boundary, tagged by connected component.
    pub fn boundary_quadrature(&self, per_side: usize) -> Vec<BoundaryPoint> {
        match self.kind {
            GeometryKind::Interval => vec![
                BoundaryPoint { x: [0.0, 0.0], weight: 1.0, component: 0 },
                BoundaryPoint { x: [PI, 0.0], weight: 1.0, component: 1 },
            ],
            GeometryKind::Channel => {
                let h = 2.0 * PI / per_side as f64;
                (0..2)
                    .flat_map(|c| {
                        (0..per_side).map(move |i| BoundaryPoint {
                            x: [i as f64 * h, c as f64 * PI],
                            weight: h,
                            component: c,
                        })
                    })
                    .collect()
            }
            GeometryKind::Rectangle => {
                let (s, w) = gauss_legendre(per_side, 0.0, PI);
                let mut out = Vec::with_capacity(4 * per_side);
                for (&t, &wt) in s.iter().zip(&w) {
                    for x in [[t, 0.0], [t, PI], [0.0, t], [PI, t]] {
                        out.push(BoundaryPoint { x, weight: wt, component: 0 });
                    }
                }
                out
            }
        }
    }

    pub fn boundary_components(&self) -> usize {
        match self.kind {
            GeometryKind::Rectangle => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub x: [f64; 2],
    pub weight: f64,
    pub component: usize,
}

/// Tensor collocation grid with quadrature weights and differentiation.
///
/// Points are ordered with x outermost: index = ix · ny + iy. The interval
/// uses ny = 1 and stores its coordinate in x.
#[derive(Debug, Clone)]
pub struct WaveGrid {
    pub geometry: Geometry,
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub nx: usize,
    pub ny: usize,
    pub lobatto: Lobatto,
}

impl WaveGrid {
    fn new(g: Geometry) -> Self {
        let lobatto = Lobatto::new(g.wall_nodes, 0.0, PI);
        let (xs, wx, ys, wy): (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) = match g.kind {
            GeometryKind::Interval => (lobatto.nodes.clone(), lobatto.weights.clone(), vec![0.0], vec![1.0]),
            GeometryKind::Channel => {
                let n = g.periodic_points;
                let h = 2.0 * PI / n as f64;
                ((0..n).map(|i| i as f64 * h).collect(), vec![h; n], lobatto.nodes.clone(), lobatto.weights.clone())
            }
            GeometryKind::Rectangle => {
                (lobatto.nodes.clone(), lobatto.weights.clone(), lobatto.nodes.clone(), lobatto.weights.clone())
            }
        };
        let mut points = Vec::with_capacity(xs.len() * ys.len());
        let mut weights = Vec::with_capacity(xs.len() * ys.len());
        for (x, a) in xs.iter().zip(&wx) {
            for (y, b) in ys.iter().zip(&wy) {
                points.push([*x, *y]);
                weights.push(a * b);
            }
        }
        Self { geometry: g, points, weights, nx: xs.len(), ny: ys.len(), lobatto }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.geometry.dim()
    }

    /// Whether a point lies on a wall.
    pub fn on_wall(&self, idx: usize) -> bool {
        let (ix, iy) = (idx / self.ny, idx % self.ny);
        let last = self.lobatto.len() - 1;
        match self.geometry.kind {
            GeometryKind::Interval => ix == 0 || ix == last,
            GeometryKind::Channel => iy == 0 || iy == last,
            GeometryKind::Rectangle => ix == 0 || ix == last || iy == 0 || iy == last,
        }
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }

    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        f.iter().zip(g).zip(&self.weights).map(|((a, b), w)| a * b * w).sum()
    }

    /// ∂/∂x of grid samples: Lobatto along walls, Fourier along the channel.
    pub fn dx(&self, f: &[f64]) -> Vec<f64> {
        match self.geometry.kind {
            GeometryKind::Interval => self.lobatto.diff.matvec(f),
            GeometryKind::Rectangle => self.apply_x(f),
            GeometryKind::Channel => self.fourier_x(f),
        }
    }

    /// ∂/∂y of grid samples; identically zero on the interval.
    pub fn dy(&self, f: &[f64]) -> Vec<f64> {
        match self.geometry.kind {
            GeometryKind::Interval => vec![0.0; f.len()],
            _ => {
                let mut out = vec![0.0; f.len()];
                for ix in 0..self.nx {
                    let col = &f[ix * self.ny..(ix + 1) * self.ny];
                    out[ix * self.ny..(ix + 1) * self.ny].copy_from_slice(&self.lobatto.diff.matvec(col));
                }
                out
            }
        }
    }

    fn apply_x(&self, f: &[f64]) -> Vec<f64> {
        let d = &self.lobatto.diff;
        let mut out = vec![0.0; f.len()];
        for ix in 0..self.nx {
            for jx in 0..self.nx {
                let c = d[(ix, jx)];
                for iy in 0..self.ny {
                    out[ix * self.ny + iy] += c * f[jx * self.ny + iy];
                }
            }
        }
        out
    }

    fn fourier_x(&self, f: &[f64]) -> Vec<f64> {
        let n = self.nx;
        let mut out = vec![0.0; f.len()];
        for iy in 0..self.ny {
            for k in 1..n.div_ceil(2) {
                let (mut c, mut s) = (0.0, 0.0);
                for ix in 0..n {
                    let th = 2.0 * PI * (k * ix) as f64 / n as f64;
                    c += f[ix * self.ny + iy] * th.cos();
                    s += f[ix * self.ny + iy] * th.sin();
                }
                let (c, s) = (2.0 * c / n as f64, 2.0 * s / n as f64);
                // f ⊃ c cos kx + s sin kx
                for ix in 0..n {
                    let th = 2.0 * PI * (k * ix) as f64 / n as f64;
                    out[ix * self.ny + iy] += k as f64 * (s * th.cos() - c * th.sin());
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_area_and_derivatives() {
        for g in [Geometry::interval(16), Geometry::channel(16, 8), Geometry::rectangle(16)] {
            let grid = g.grid();
            let area = grid.integrate(&vec![1.0; grid.len()]);
            let expect = match g.kind {
                GeometryKind::Interval => PI,
                GeometryKind::Channel => 2.0 * PI * PI,
                GeometryKind::Rectangle => PI * PI,
            };
            assert!((area - expect).abs() < 1e-12, "{g:?}");
            let f: Vec<f64> = grid.points.iter().map(|p| (2.0 * p[0]).sin() * p[1].cos()).collect();
            let fx = grid.dx(&f);
            for (p, d) in grid.points.iter().zip(&fx) {
                assert!((d - 2.0 * (2.0 * p[0]).cos() * p[1].cos()).abs() < 1e-9);
            }
            if g.dim() == 2 {
                let fy = grid.dy(&f);
                for (p, d) in grid.points.iter().zip(&fy) {
                    assert!((d + (2.0 * p[0]).sin() * p[1].sin()).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn resolution_counts_layer_nodes() {
        let n = Geometry::required_wall_nodes(1e-2, 1e-2);
        assert!(Geometry::interval(n).check_resolution(1e-2, 1e-2).is_ok());
        assert!(matches!(Geometry::interval(n - 8).check_resolution(1e-2, 1e-2), Err(Error::Resolution(_))));
        assert!(Geometry::interval(8).check_resolution(1e-2, 0.0).is_ok());
        assert!(Geometry::channel(16, 5).validate().is_err());
    }

    #[test]
    fn boundary_length() {
        let len = |g: Geometry| g.boundary_quadrature(16).iter().map(|b| b.weight).sum::<f64>();
        assert!((len(Geometry::channel(8, 8)) - 4.0 * PI).abs() < 1e-12);
        assert!((len(Geometry::rectangle(8)) - 4.0 * PI).abs() < 1e-12);
    }
}
