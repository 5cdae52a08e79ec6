use std::fmt;

use serde::{Deserialize, Serialize};

/// Coefficients of the scaled compressible system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluidParams {
    /// Pressure constant in p = aρ^γ.
    pub a: f64,
    pub gamma: f64,
    /// Mach-number scaling ε.
    pub eps: f64,
    /// Shear viscosity.
    pub mu: f64,
    /// Bulk viscosity.
    pub lam: f64,
    /// Magnetic diffusivity.
    pub nu: f64,
    pub dim: usize,
}

impl FluidParams {
    /// Wave coefficient b = aγρ̄^{γ−1}.
    pub fn wave_coefficient(&self, rho_bar: f64) -> f64 {
        self.a * self.gamma * rho_bar.powf(self.gamma - 1.0)
    }

    pub fn with_eps(&self, eps: f64) -> Self {
        Self { eps, ..self.clone() }
    }
}

/// One violated constraint on [`FluidParams`].
#[derive(Debug, Clone, PartialEq)]
pub enum ParamViolation {
    Dimension(usize),
    PressureConstant(f64),
    ShearViscosity(f64),
    /// 2μ + Nλ ≤ 0.
    BulkViscosity {
        mu: f64,
        lam: f64,
        dim: usize,
    },
    MagneticViscosity(f64),
    /// γ ≤ N/2 (or γ ≤ 1).
    AdiabaticExponent {
        gamma: f64,
        dim: usize,
    },
    MachNumber(f64),
}

impl fmt::Display for ParamViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Dimension(n) => write!(f, "dimension {n} is not 2 or 3"),
            Self::PressureConstant(a) => write!(f, "pressure constant a = {a} must be positive"),
            Self::ShearViscosity(mu) => write!(f, "shear viscosity mu = {mu} must be positive"),
            Self::BulkViscosity { mu, lam, dim } => write!(
                f,
                "2mu + N*lam = {} must be positive (mu = {mu}, lam = {lam}, N = {dim})",
                2.0 * mu + *dim as f64 * lam
            ),
            Self::MagneticViscosity(nu) => write!(f, "magnetic viscosity nu = {nu} must be positive"),
            Self::AdiabaticExponent { gamma, dim } => {
                write!(f, "gamma = {gamma} must exceed max(1, N/2) = {}", (*dim as f64 / 2.0).max(1.0))
            }
            Self::MachNumber(eps) => write!(f, "eps = {eps} must lie in (0, 1]"),
        }
    }
}

/// Checks every constraint and reports all violations at once.
pub fn validate_params(p: &FluidParams) -> Result<(), Vec<ParamViolation>> {
    let mut v = Vec::new();
    let finite_pos = |x: f64| x.is_finite() && x > 0.0;
    if !(p.dim == 2 || p.dim == 3) {
        v.push(ParamViolation::Dimension(p.dim));
    }
    if !finite_pos(p.a) {
        v.push(ParamViolation::PressureConstant(p.a));
    }
    if !finite_pos(p.mu) {
        v.push(ParamViolation::ShearViscosity(p.mu));
    }
    if !(p.lam.is_finite() && 2.0 * p.mu + p.dim as f64 * p.lam > 0.0) {
        v.push(ParamViolation::BulkViscosity { mu: p.mu, lam: p.lam, dim: p.dim });
    }
    if !finite_pos(p.nu) {
        v.push(ParamViolation::MagneticViscosity(p.nu));
    }
    if !(p.gamma.is_finite() && p.gamma > 1.0 && p.gamma > p.dim as f64 / 2.0) {
        v.push(ParamViolation::AdiabaticExponent { gamma: p.gamma, dim: p.dim });
    }
    if !(p.eps > 0.0 && p.eps <= 1.0) {
        v.push(ParamViolation::MachNumber(p.eps));
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

impl From<Vec<ParamViolation>> for crate::Error {
    fn from(v: Vec<ParamViolation>) -> Self {
        let msg: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        crate::Error::InvalidParameter(msg.join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> FluidParams {
        FluidParams { a: 1.0, gamma: 5.0 / 3.0, eps: 0.1, mu: 1.0, lam: 0.0, nu: 1.0, dim: 3 }
    }

    #[test]
    fn accepts_reference_parameters() {
        assert!(validate_params(&base()).is_ok());
    }

    #[test]
    fn gamma_below_half_dimension() {
        let p = FluidParams { gamma: 1.4, ..base() };
        let v = validate_params(&p).unwrap_err();
        assert_eq!(v, vec![ParamViolation::AdiabaticExponent { gamma: 1.4, dim: 3 }]);
    }

    #[test]
    fn bulk_viscosity_on_the_boundary() {
        let p = FluidParams { lam: -1.0, dim: 2, gamma: 2.0, ..base() };
        assert!(matches!(validate_params(&p).unwrap_err()[..], [ParamViolation::BulkViscosity { .. }]));
    }

    #[test]
    fn reports_every_violation() {
        let p = FluidParams { a: 0.0, mu: -1.0, nu: 0.0, eps: 1.5, dim: 4, ..base() };
        assert!(validate_params(&p).unwrap_err().len() >= 5);
    }
}
