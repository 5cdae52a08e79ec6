//! Spectral laboratory for the low Mach number limit of compressible,
//! isentropic MHD.
//!
//! The numerical kernels are generic over the floating point type through
//! [`Real`]; the aliases at the bottom of this file fix the common choices.

// `!(x > 0.0)` is used on purpose so that NaN is rejected; index loops over
// several parallel spectra read better than zipped iterators.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod acoustic;
pub mod bounded;
pub mod compressible;
pub mod error;
pub mod incompressible;
pub mod rk;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Real;

pub type ScalarField64 = spectral::ScalarField<f64>;
pub type VectorField64 = spectral::VectorField<f64>;
pub type AcousticPair64 = acoustic::AcousticPair<f64>;
pub type ScalarField32 = spectral::ScalarField<f32>;
pub type VectorField32 = spectral::VectorField<f32>;
