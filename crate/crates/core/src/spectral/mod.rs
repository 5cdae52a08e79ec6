//! Periodic fields, spectral calculus, Helmholtz projection, norms and mollifiers.

mod calculus;
mod field;
mod grid;
mod mollifier;
mod norms;
mod projection;

pub use calculus::{
    apply_multiplier, cross, cross_curl, curl, curl_of, dealias, dealias_vector, div_outer, divergence, gradient,
    inverse_laplacian, laplacian, partial, product, vector_laplacian, Curl,
};
pub use field::{ScalarField, VectorField};
pub use grid::{Grid, GridSpec};
pub use mollifier::{
    mollifier_defect_scan, mollifier_exponent, mollify, unit_gradient_bump, MollifierScan, MollifierSpec,
};
pub use norms::{l2_norm, lq_norm, lq_norm_vector, sobolev_norm, sobolev_norm_sq, sobolev_norm_vector};
pub use projection::{gradient_part, gradient_potential, helmholtz_project, solenoidal_part};
