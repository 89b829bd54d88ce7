use crate::error::{Error, Result};

/// Harmonic-oscillator length √(ħ/(2μω)) in atomic units.
pub fn oscillator_length(mu: f64, omega: f64) -> f64 {
    (1.0 / (2.0 * mu * omega)).sqrt()
}

/// Adiabaticity parameter Γ = g²/|slope·v| for a sweep through an avoided
/// crossing at speed v = ω_M·l_ho.
///
/// `g` is half the gap (energy), `slope` the rate of change of the diabatic
/// energy difference with r_ci (energy per Bohr), `omega_m` the molecular
/// vibration frequency as an energy and `mu` the reduced mass in m_e.
pub fn adiabaticity(g: f64, slope: f64, omega_m: f64, mu: f64) -> Result<f64> {
    if !(g >= 0.0) || !(omega_m > 0.0) || !(mu > 0.0) || !slope.is_finite() {
        return Err(Error::domain("Landau-Zener inputs must be finite with g ≥ 0 and ω_M, μ > 0"));
    }
    let sweep = (slope * omega_m * oscillator_length(mu, omega_m)).abs();
    if sweep == 0.0 {
        return Ok(if g == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(g * g / sweep)
}

/// Probability P = exp(−2πΓ) of a diabatic passage through the crossing.
pub fn lz_probability(g: f64, slope: f64, omega_m: f64, mu: f64) -> Result<f64> {
    let gamma = adiabaticity(g, slope, omega_m, mu)?;
    Ok((-2.0 * std::f64::consts::PI * gamma).exp())
}
