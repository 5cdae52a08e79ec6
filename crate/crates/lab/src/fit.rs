//! Log-log rate fitting.

use serde::Serialize;

use crate::error::{LabError, Result};

/// Least-squares slope of log(value) against log(ε).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope from the residuals; zero for two points
    /// or an exact fit.
    pub radius: f64,
    pub points: usize,
}

pub fn fit_rate(eps: &[f64], values: &[f64]) -> Result<RateFit> {
    if eps.len() != values.len() {
        return Err(LabError::config(format!("{} scales vs {} values", eps.len(), values.len())));
    }
    if eps.len() < 3 {
        return Err(LabError::config(format!("rate fit needs at least 3 points, got {}", eps.len())));
    }
    if let Some(v) = values.iter().chain(eps).find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(LabError::config(format!("rate fit needs positive finite data, got {v}")));
    }
    let n = eps.len() as f64;
    let x: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(LabError::config("rate fit needs distinct scales"));
    }
    let slope = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(&y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let radius = (rss / (n - 2.0) / sxx).sqrt();
    Ok(RateFit { slope, intercept, radius, points: eps.len() })
}
