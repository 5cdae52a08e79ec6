//! Catalog of initial data.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::params::FluidParams;
use super::physics::lorentz_force;
use super::state::CompressibleState;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{curl_of, div_outer, divergence, inverse_laplacian, Curl, Grid, ScalarField, VectorField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
pub enum ProfileKind {
    TaylorGreen,
    OrszagTangLike,
    /// Random solenoidal fields with |k| ≤ `kmax`, unit RMS before scaling.
    RandomBandLimited {
        seed: u64,
        kmax: f64,
    },
}

impl ProfileKind {
    pub fn parse(name: &str, seed: u64) -> Result<Self> {
        match name {
            "taylor-green" => Ok(Self::TaylorGreen),
            "orszag-tang-like" => Ok(Self::OrszagTangLike),
            "random-band-limited" => Ok(Self::RandomBandLimited { seed, kmax: 4.0 }),
            other => Err(Error::InvalidParameter(format!("unknown profile '{other}'"))),
        }
    }
}

/// How the density fluctuation φ⁰ in ρ⁰ = 1 + εφ⁰ is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum DensityInit {
    Zero,
    /// φ⁰ = amplitude · Π_a cos x_a.
    Shape {
        amplitude: f64,
    },
    /// φ⁰ = επ⁰/b with π⁰ the incompressible pressure of (u⁰, H⁰), so that
    /// the initial momentum is balanced and fast waves start at O(ε).
    Balanced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitProfile {
    pub kind: ProfileKind,
    #[serde(default = "one")]
    pub u_amplitude: f64,
    #[serde(default)]
    pub h_amplitude: Option<f64>,
    #[serde(default = "balanced")]
    pub density: DensityInit,
    /// Amplitude of the gradient velocity and matching density wave added
    /// on top; zero gives well-prepared data.
    #[serde(default)]
    pub ill_prepared: f64,
}

fn one() -> f64 {
    1.0
}

fn balanced() -> DensityInit {
    DensityInit::Balanced
}

impl InitProfile {
    pub fn new(kind: ProfileKind) -> Self {
        Self { kind, u_amplitude: 1.0, h_amplitude: None, density: DensityInit::Balanced, ill_prepared: 0.0 }
    }

    /// Magnetic amplitude, defaulting to 0 for Taylor–Green and 1 otherwise.
    pub fn magnetic_amplitude(&self) -> f64 {
        self.h_amplitude.unwrap_or(match self.kind {
            ProfileKind::TaylorGreen => 0.0,
            _ => 1.0,
        })
    }
}

fn require_2pi<T: Real>(grid: &Grid<T>, what: &str) -> Result<()> {
    if grid.spec().lengths.iter().all(|&l| (l - 2.0 * PI).abs() < 1e-12) {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("the {what} profile needs a torus of side 2π")))
    }
}

/// Divergence-free (u, H) of the chosen profile at unit amplitude.
pub(crate) fn solenoidal_pair<T: Real>(
    grid: &Arc<Grid<T>>,
    kind: &ProfileKind,
) -> Result<(VectorField<T>, VectorField<T>)> {
    let dim = grid.dim();
    let ot_field = |x: [T; 3]| [-x[1].sin(), (x[0] + x[0]).sin(), T::zero()];
    match kind {
        ProfileKind::TaylorGreen => {
            require_2pi(grid, "taylor-green")?;
            let u = VectorField::from_fn(grid, |x| {
                let cz = if dim == 3 { x[2].cos() } else { T::one() };
                [x[0].sin() * x[1].cos() * cz, -x[0].cos() * x[1].sin() * cz, T::zero()]
            });
            Ok((u, VectorField::from_fn(grid, ot_field)))
        }
        ProfileKind::OrszagTangLike => {
            require_2pi(grid, "orszag-tang-like")?;
            // stream functions cos x + cos y and cos y + ½cos 2x
            let u = VectorField::from_fn(grid, |x| [-x[1].sin(), x[0].sin(), T::zero()]);
            Ok((u, VectorField::from_fn(grid, ot_field)))
        }
        ProfileKind::RandomBandLimited { seed, kmax } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let u = random_solenoidal(grid, *kmax, &mut rng)?;
            let h = random_solenoidal(grid, *kmax, &mut rng)?;
            Ok((u, h))
        }
    }
}

/// Curl of a random potential with coefficients supported on 0 < |k| ≤ kmax,
/// scaled to unit RMS.
fn random_solenoidal<T: Real>(grid: &Arc<Grid<T>>, kmax: f64, rng: &mut ChaCha8Rng) -> Result<VectorField<T>> {
    let mut draw = || {
        (0..grid.len())
            .map(|i| {
                let k2 = grid.k2()[i].as_f64();
                // draw for every mode so the stream does not depend on kmax
                let (re, im): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                if k2 > 0.0 && k2 <= kmax * kmax {
                    Complex::new(T::lit(re), T::lit(im))
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            })
            .collect::<Vec<_>>()
    };
    let potential = match grid.dim() {
        2 => Curl::Scalar(ScalarField::from_spectrum(grid, draw())),
        3 => Curl::Vector(VectorField::new((0..3).map(|_| ScalarField::from_spectrum(grid, draw())).collect())?),
        n => return Err(Error::Unsupported(format!("random profile in {n} dimensions"))),
    };
    let v = curl_of(&potential)?;
    let rms = (v.l2_norm() / grid.volume().sqrt()).as_f64();
    if rms == 0.0 {
        return Err(Error::InvalidParameter(format!("kmax = {kmax} leaves no admissible modes")));
    }
    Ok(v.scale(T::lit(1.0 / rms)))
}

/// Builds ρ⁰ = 1 + εφ⁰, u⁰ and H⁰ for `profile`.
pub fn well_prepared_init<T: Real>(
    grid: &Arc<Grid<T>>,
    p: &FluidParams,
    profile: &InitProfile,
) -> Result<CompressibleState<T>> {
    if grid.dim() != p.dim {
        return Err(Error::InvalidParameter(format!("grid dimension {} vs N = {}", grid.dim(), p.dim)));
    }
    let (u, h) = solenoidal_pair(grid, &profile.kind)?;
    let mut u = u.scale(T::lit(profile.u_amplitude));
    let h = h.scale(T::lit(profile.magnetic_amplitude()));
    let eps = T::lit(p.eps);
    let mut phi = match profile.density {
        DensityInit::Zero => ScalarField::zeros(grid),
        DensityInit::Shape { amplitude } => {
            ScalarField::from_fn(grid, |x| (0..grid.dim()).fold(T::lit(amplitude), |acc, a| acc * x[a].cos()))
        }
        DensityInit::Balanced => {
            let b = T::lit(p.wave_coefficient(1.0));
            incompressible_pressure(&u, &h)?.scale(eps / b)
        }
    };
    if profile.ill_prepared != 0.0 {
        require_2pi(grid, "ill-prepared")?;
        // gradient velocity ∇(sin x + cos y) = (cos x, −sin y) with a density
        // wave of the same shape
        let amp = T::lit(profile.ill_prepared);
        let q = VectorField::from_fn(grid, |x| {
            let mut v = [T::zero(); 3];
            v[0] = amp * x[0].cos();
            v[1] = -amp * x[1].sin();
            v
        });
        u = u.add(&q)?;
        phi = phi.add(&ScalarField::from_fn(grid, |x| amp * (x[0].cos() + x[1].sin())))?;
    }
    let phi = phi.shift(-phi.mean());
    let rho = phi.map(|f| T::one() + eps * f);
    CompressibleState::new(rho, u, h, T::zero())
}

/// Zero-mean π solving Δπ = div[(∇×H)×H − div(u⊗u)].
pub fn incompressible_pressure<T: Real>(u: &VectorField<T>, h: &VectorField<T>) -> Result<ScalarField<T>> {
    let force = lorentz_force(h)?.sub(&div_outer(u, u)?)?;
    Ok(inverse_laplacian(&divergence(&force)))
}

/// Scaled pressure excess of an initial density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledExcess {
    /// (1/ε²)∫(ρ^γ − γρ + (γ−1)), about the reference density 1.
    pub about_one: f64,
    /// (1/ε²)∫(ρ^γ − γρρ̄^{γ−1} + (γ−1)ρ̄^γ), about the mean.
    pub about_mean: f64,
}

pub fn scaled_excess<T: Real>(rho: &ScalarField<T>, gamma: f64, eps: f64) -> ScaledExcess {
    let g = T::lit(gamma);
    let about_one = rho.map(|r| r.powf(g) - g * r + g - T::one()).integral().as_f64();
    let about_mean = super::physics::pressure_remainder(rho, rho.mean(), g).integral().as_f64();
    let s = 1.0 / (eps * eps);
    ScaledExcess { about_one: about_one * s, about_mean: about_mean * s }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{gradient_part, GridSpec};

    fn params(eps: f64) -> FluidParams {
        FluidParams { a: 1.0, gamma: 2.0, eps, mu: 0.05, lam: 0.0, nu: 0.05, dim: 2 }
    }

    #[test]
    fn well_prepared_velocity_is_solenoidal() {
        let g = Grid::<f64>::new(GridSpec::torus(2, 32)).unwrap();
        for kind in [
            ProfileKind::TaylorGreen,
            ProfileKind::OrszagTangLike,
            ProfileKind::RandomBandLimited { seed: 7, kmax: 4.0 },
        ] {
            let s = well_prepared_init(&g, &params(0.1), &InitProfile::new(kind)).unwrap();
            assert!(gradient_part(&s.u).l2_norm() < 1e-12);
            assert!(divergence(&s.u).max_abs() < 1e-12);
            assert!(divergence(&s.h).max_abs() < 1e-12);
            assert!((s.rho.mean() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn ill_prepared_toggle_adds_gradient_part() {
        let g = Grid::<f64>::new(GridSpec::torus(2, 16)).unwrap();
        let mut prof = InitProfile::new(ProfileKind::TaylorGreen);
        prof.ill_prepared = 0.5;
        let s = well_prepared_init(&g, &params(0.1), &prof).unwrap();
        assert!(gradient_part(&s.u).l2_norm() > 0.1);
    }

    #[test]
    fn scaled_excess_is_uniform_in_eps() {
        let g = Grid::<f64>::new(GridSpec::torus(2, 16)).unwrap();
        let mut prof = InitProfile::new(ProfileKind::OrszagTangLike);
        prof.density = DensityInit::Shape { amplitude: 1.0 };
        let vals: Vec<f64> = [0.1, 0.01, 0.001]
            .iter()
            .map(|&e| scaled_excess(&well_prepared_init(&g, &params(e), &prof).unwrap().rho, 2.0, e).about_one)
            .collect();
        // γ = 2: excess is exactly ∫φ² = π² for φ = cos x cos y
        for v in vals {
            assert!((v - PI * PI).abs() < 1e-6 * PI * PI, "{v}");
        }
    }

    #[test]
    fn unknown_profile_name() {
        assert!(ProfileKind::parse("kelvin-helmholtz", 0).is_err());
        assert_eq!(ProfileKind::parse("taylor-green", 0).unwrap(), ProfileKind::TaylorGreen);
    }
}
