//! Leray-projected pseudo-spectral solver for incompressible MHD, the limit
//! system of the low Mach number analysis.

mod solver;
mod weak;

pub use solver::{pressure, simulate_inc, step_inc, IncRecord, IncTrace, IncompressibleParams, IncompressibleState};
pub use weak::{standard_test_bank, weak_residual, TestPair, TimeWindow, WeakDefect};
