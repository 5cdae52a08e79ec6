//! Acoustic waves in bounded model domains: Neumann eigenmodes, their
//! boundary-layer damping, and linear dissipative wave simulation with
//! no-slip walls.

pub mod amplitudes;
pub mod geometry;
pub mod linalg;
pub mod modes;
pub mod quadrature;
pub mod waves;

pub use amplitudes::*;
pub use geometry::{BoundaryPoint, Geometry, GeometryKind, WaveGrid, LAYER_NODES};
pub use modes::*;
pub use waves::*;
