//! Experiment configuration, read from JSON.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use lowmach_core::bounded::GeometryKind;
use lowmach_core::compressible::{validate_params, DensityInit, FluidParams, InitProfile, ProfileKind};
use lowmach_core::spectral::GridSpec;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    PeriodicLimit,
    FilteredOscillations,
    BoundedDamping,
    PropertySuite,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Self::PeriodicLimit => "periodic-limit",
            Self::FilteredOscillations => "filtered-oscillations",
            Self::BoundedDamping => "bounded-damping",
            Self::PropertySuite => "property-suite",
        }
    }

    fn needs_eps(&self) -> bool {
        !matches!(self, Self::PropertySuite)
    }
}

/// Periodic box with `points` per axis and side `length` (default 2π).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub points: usize,
    #[serde(default = "two_pi")]
    pub length: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { dim: 2, points: 64, length: two_pi() }
    }
}

impl GridConfig {
    pub fn spec(&self) -> GridSpec {
        GridSpec { points: vec![self.points; self.dim], lengths: vec![self.length; self.dim] }
    }
}

/// Fluid coefficients without ε, which comes from the sweep list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidTemplate {
    pub a: f64,
    pub gamma: f64,
    pub mu: f64,
    #[serde(default)]
    pub lam: f64,
    pub nu: f64,
}

impl Default for FluidTemplate {
    fn default() -> Self {
        Self { a: 1.0, gamma: 2.0, mu: 0.05, lam: 0.0, nu: 0.05 }
    }
}

impl FluidTemplate {
    pub fn params(&self, eps: f64, dim: usize) -> FluidParams {
        FluidParams { a: self.a, gamma: self.gamma, eps, mu: self.mu, lam: self.lam, nu: self.nu, dim }
    }

    /// b = aγ at the reference density 1.
    pub fn wave_coefficient(&self) -> f64 {
        self.a * self.gamma
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "policy")]
pub enum DtPolicy {
    Fixed {
        dt: f64,
    },
    /// `safety` times the advective CFL step of the initial state. The
    /// default 0.5 keeps the time error below the ε = 0.025 limit error.
    Cfl {
        #[serde(default = "half")]
        safety: f64,
    },
}

impl Default for DtPolicy {
    fn default() -> Self {
        Self::Cfl { safety: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preparation {
    #[default]
    Well,
    Ill,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub name: String,
    #[serde(default = "one")]
    pub u_amplitude: f64,
    #[serde(default)]
    pub h_amplitude: Option<f64>,
    #[serde(default)]
    pub density: Option<DensityInit>,
    /// Amplitude of the acoustic add-on used for ill-prepared data. At 0.5
    /// the acoustic fronts stay smooth up to T = 1 for ε ≤ 0.2.
    #[serde(default = "half")]
    pub ill_amplitude: f64,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        Self { name: "orszag-tang-like".into(), u_amplitude: 1.0, h_amplitude: None, density: None, ill_amplitude: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundedConfig {
    #[serde(default = "channel")]
    pub geometry: GeometryKind,
    /// Tangential wavenumbers m of the driven cos(mx) modes.
    #[serde(default = "default_modes")]
    pub modes: Vec<usize>,
    /// Wall-normal nodes; chosen from the layer width when absent.
    #[serde(default)]
    pub wall_nodes: Option<usize>,
    #[serde(default = "eight")]
    pub periodic_points: usize,
    /// Output samples per run.
    #[serde(default = "samples")]
    pub samples: usize,
    /// Run length in units of the predicted e-folding time; overrides `t_final`.
    #[serde(default = "two_e_foldings")]
    pub e_foldings: Option<f64>,
}

impl Default for BoundedConfig {
    fn default() -> Self {
        Self {
            geometry: channel(),
            modes: default_modes(),
            wall_nodes: None,
            periodic_points: 8,
            samples: samples(),
            e_foldings: two_e_foldings(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub fluid: FluidTemplate,
    #[serde(default)]
    pub eps_list: Vec<f64>,
    #[serde(default = "one")]
    pub t_final: f64,
    #[serde(default)]
    pub dt: DtPolicy,
    /// Number of equally spaced outputs after t = 0.
    #[serde(default = "outputs")]
    pub outputs: usize,
    /// Output spacing as a fraction of ε for oscillation studies.
    #[serde(default = "sampling_fraction")]
    pub sampling_fraction: f64,
    #[serde(default)]
    pub profile: ProfileConfig,
    #[serde(default)]
    pub preparation: Preparation,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub bounded: BoundedConfig,
}

fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn two_pi() -> f64 {
    2.0 * PI
}
fn eight() -> usize {
    8
}
fn samples() -> usize {
    400
}
fn outputs() -> usize {
    20
}
fn sampling_fraction() -> f64 {
    0.125
}
fn two_e_foldings() -> Option<f64> {
    Some(2.0)
}
fn channel() -> GeometryKind {
    GeometryKind::Channel
}
fn default_modes() -> Vec<usize> {
    vec![1, 2]
}

impl ExperimentConfig {
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            grid: GridConfig::default(),
            fluid: FluidTemplate::default(),
            eps_list: Vec::new(),
            t_final: 1.0,
            dt: DtPolicy::default(),
            outputs: outputs(),
            sampling_fraction: sampling_fraction(),
            profile: ProfileConfig::default(),
            preparation: Preparation::Well,
            seed: 0,
            out_dir: None,
            bounded: BoundedConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| LabError::config(format!("cannot parse configuration: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }

    pub fn profile(&self) -> Result<InitProfile> {
        let kind = ProfileKind::parse(&self.profile.name, self.seed).map_err(|e| LabError::config(e.to_string()))?;
        let mut profile = InitProfile::new(kind);
        profile.u_amplitude = self.profile.u_amplitude;
        profile.h_amplitude = self.profile.h_amplitude;
        if let Some(d) = self.profile.density {
            profile.density = d;
        }
        if self.preparation == Preparation::Ill {
            profile.ill_prepared = self.profile.ill_amplitude;
        }
        Ok(profile)
    }

    /// Checks everything and reports every problem found.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.scenario.needs_eps() && self.eps_list.is_empty() {
            errs.push("eps_list must not be empty".to_string());
        }
        for (i, &e) in self.eps_list.iter().enumerate() {
            if !(e > 0.0 && e <= 1.0) {
                errs.push(format!("eps_list[{i}] = {e} must lie in (0, 1]"));
            }
        }
        if self.eps_list.windows(2).any(|w| !(w[1] < w[0])) {
            errs.push("eps_list must be strictly decreasing".to_string());
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            errs.push(format!("t_final = {} must be positive", self.t_final));
        }
        match self.dt {
            DtPolicy::Fixed { dt } if !(dt > 0.0 && dt.is_finite()) => errs.push(format!("dt = {dt} must be positive")),
            DtPolicy::Cfl { safety } if !(safety > 0.0 && safety <= 1.0) => {
                errs.push(format!("cfl safety {safety} must lie in (0, 1]"))
            }
            _ => {}
        }
        if self.outputs == 0 {
            errs.push("outputs must be at least 1".to_string());
        }
        if !(self.sampling_fraction > 0.0 && self.sampling_fraction <= 0.25) {
            errs.push(format!("sampling_fraction = {} must lie in (0, 1/4]", self.sampling_fraction));
        }
        match self.scenario {
            Scenario::PeriodicLimit | Scenario::FilteredOscillations => self.validate_periodic(&mut errs),
            Scenario::BoundedDamping => self.validate_bounded(&mut errs),
            Scenario::PropertySuite => {}
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(LabError::Config(errs))
        }
    }

    fn validate_periodic(&self, errs: &mut Vec<String>) {
        let g = &self.grid;
        if !(g.dim == 2 || g.dim == 3) {
            errs.push(format!("grid dim = {} must be 2 or 3", g.dim));
        }
        if g.points < 4 || g.points % 2 == 1 {
            errs.push(format!("grid points = {} must be even and at least 4", g.points));
        }
        if !(g.length > 0.0 && g.length.is_finite()) {
            errs.push(format!("grid length = {} must be positive", g.length));
        }
        let analytic = matches!(self.profile.name.as_str(), "taylor-green" | "orszag-tang-like");
        if (analytic || self.preparation == Preparation::Ill) && (g.length - 2.0 * PI).abs() > 1e-12 {
            errs.push(format!("profile '{}' and ill-prepared data need grid length 2π", self.profile.name));
        }
        if let Err(e) = ProfileKind::parse(&self.profile.name, self.seed) {
            errs.push(e.to_string());
        }
        // parameter constraints other than ε, which is checked above
        if let Err(v) = validate_params(&self.fluid.params(1.0, g.dim)) {
            errs.extend(v.iter().map(|x| x.to_string()));
        }
    }

    fn validate_bounded(&self, errs: &mut Vec<String>) {
        let b = &self.bounded;
        if b.modes.is_empty() || b.modes.contains(&0) {
            errs.push("bounded.modes must list tangential wavenumbers m ≥ 1".to_string());
        }
        if b.geometry != GeometryKind::Channel {
            errs.push(format!(
                "bounded-damping drives cos(mx) channel modes; geometry {} is not supported",
                b.geometry.name()
            ));
        }
        if b.periodic_points < 4 || b.periodic_points % 2 == 1 || b.modes.iter().any(|&m| 2 * m >= b.periodic_points) {
            errs.push(format!("bounded.periodic_points = {} must be even and resolve every mode", b.periodic_points));
        }
        if matches!(b.wall_nodes, Some(n) if n < 4) {
            errs.push("bounded.wall_nodes must be at least 4".to_string());
        }
        if b.samples < 10 {
            errs.push(format!("bounded.samples = {} must be at least 10", b.samples));
        }
        if matches!(b.e_foldings, Some(f) if !(f > 0.0)) {
            errs.push("bounded.e_foldings must be positive".to_string());
        }
        let f = &self.fluid;
        if !(f.a > 0.0 && f.gamma > 1.0) {
            errs.push(format!("pressure law a = {}, gamma = {} needs a > 0 and gamma > 1", f.a, f.gamma));
        }
        if !(f.mu > 0.0) || f.lam < 0.0 {
            errs.push(format!("viscosities mu = {}, lam = {} need mu > 0 and lam ≥ 0", f.mu, f.lam));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::from_json(r#"{"scenario": "periodic-limit", "eps_list": [0.1]}"#).unwrap();
        assert_eq!(c.grid, GridConfig::default());
        assert_eq!(c.dt, DtPolicy::Cfl { safety: 0.5 });
        c.validate().unwrap();
        let back = ExperimentConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn shipped_configs_validate() {
        for text in [
            include_str!("../configs/periodic-limit.json"),
            include_str!("../configs/filtered-oscillations.json"),
            include_str!("../configs/bounded-damping.json"),
        ] {
            let c = ExperimentConfig::from_json(text).unwrap();
            c.validate().unwrap();
            assert!(c.eps_list.len() >= 3);
        }
    }

    #[test]
    fn all_errors_are_reported() {
        let mut c = ExperimentConfig::new(Scenario::PeriodicLimit);
        c.eps_list = vec![0.1, 0.2, 1.5];
        c.t_final = -1.0;
        c.grid.points = 15;
        match c.validate() {
            Err(LabError::Config(errs)) => assert_eq!(errs.len(), 4, "{errs:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"scenario": "periodic-limit", "epsilons": [0.1]}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"scenario": "warp-drive"}"#).is_err());
    }
}
