use serde::Serialize;

use crate::error::{Error, Result};

/// y ≈ A·n^p fitted by least squares in log-log space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub prefactor: f64,
    pub exponent: f64,
    /// RMS of log y − log(A n^p) over the samples.
    pub residual: f64,
    pub samples: Vec<(f64, f64)>,
}

impl PowerLawFit {
    pub fn eval(&self, n: f64) -> f64 {
        self.prefactor * n.powf(self.exponent)
    }
}

fn logs(samples: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    samples
        .iter()
        .map(|&(n, y)| {
            if n > 0.0 && y > 0.0 && n.is_finite() && y.is_finite() {
                Ok((n.ln(), y.ln()))
            } else {
                Err(Error::domain(format!("power-law samples must be positive, got ({n}, {y})")))
            }
        })
        .collect()
}

fn rms(points: &[(f64, f64)], ln_a: f64, p: f64) -> f64 {
    let s: f64 = points.iter().map(|&(x, y)| (y - ln_a - p * x).powi(2)).sum();
    (s / points.len() as f64).sqrt()
}

/// Free fit of prefactor and exponent.
pub fn fit_power_law(samples: &[(f64, f64)]) -> Result<PowerLawFit> {
    if samples.len() < 3 {
        return Err(Error::domain("power-law fit needs at least 3 samples"));
    }
    let pts = logs(samples)?;
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("power-law fit needs distinct abscissae"));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let p = sxy / sxx;
    let ln_a = my - p * mx;
    Ok(PowerLawFit { prefactor: ln_a.exp(), exponent: p, residual: rms(&pts, ln_a, p), samples: samples.to_vec() })
}

/// Fit of the prefactor alone at a fixed exponent.
pub fn fit_prefactor(samples: &[(f64, f64)], exponent: f64) -> Result<PowerLawFit> {
    if samples.is_empty() {
        return Err(Error::domain("prefactor fit needs at least 1 sample"));
    }
    let pts = logs(samples)?;
    let ln_a = pts.iter().map(|&(x, y)| y - exponent * x).sum::<f64>() / pts.len() as f64;
    Ok(PowerLawFit { prefactor: ln_a.exp(), exponent, residual: rms(&pts, ln_a, exponent), samples: samples.to_vec() })
}
