//! Experiment runner for the low Mach number laboratory: configuration,
//! ε-sweeps, convergence metrics, rate fits and reports.

// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod fit;
pub mod metrics;

pub use config::{ExperimentConfig, Scenario};
pub use error::{LabError, Result};
pub use fit::{fit_rate, RateFit};
pub mod report;
pub mod scenarios;

pub use report::{Check, Report, Severity, Table};
pub use scenarios::run_scenario;
