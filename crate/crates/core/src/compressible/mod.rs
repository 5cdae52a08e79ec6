//! Scaled compressible isentropic MHD on the torus.

mod diagnostics;
mod init;
mod params;
mod physics;
mod solver;
mod state;

pub use diagnostics::{
    coercivity_scan, dissipation, energy_report, fluctuation_norms, relative_energy, total_energy, CoercivityScan,
    EnergyLedger, EnergyReport, FluctuationReport,
};
pub use init::{scaled_excess, well_prepared_init, DensityInit, InitProfile, ProfileKind};
pub use params::{validate_params, FluidParams, ParamViolation};
pub use physics::{induction_rhs, lorentz_force, nonstiff_rhs_f, pressure_remainder};
pub use solver::{
    simulate, simulate_with, step, step_count, suggest_dt, write_records_csv, CompressibleSolver, SimulationError,
    Trace, TraceRecord,
};
pub use state::{
    rescale_to_original, velocity_split, Checkpoint, CompressibleState, FluctuationView, OriginalSnapshot,
};
