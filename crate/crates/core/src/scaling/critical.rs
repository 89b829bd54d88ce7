use serde::Serialize;

use crate::error::{Error, Result};
use crate::floquet::paul::TrapOrientation;
use crate::scaling::fit::PowerLawFit;
use crate::units::{amu_to_me, mhz_to_energy};

/// c·n^p.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLaw {
    pub c: f64,
    pub p: f64,
}

impl PowerLaw {
    pub fn eval(&self, n: f64) -> f64 {
        self.c * n.powf(self.p)
    }
}

impl From<&PowerLawFit> for PowerLaw {
    fn from(f: &PowerLawFit) -> Self {
        PowerLaw { c: f.prefactor, p: f.exponent }
    }
}

/// Scaling constants behind the closed forms, atomic units.
///
/// ΔE = gap(n); g_rad = m_i q Ω²·radial(n); g_ax = m_i q Ω²·axial(n).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingConstants {
    pub gap: PowerLaw,
    pub radial: PowerLaw,
    pub axial: PowerLaw,
}

impl ScalingConstants {
    /// Constants quoted with the published analysis.
    pub fn published() -> Self {
        ScalingConstants {
            gap: PowerLaw { c: 0.28, p: -4.0 },
            radial: PowerLaw { c: 0.55, p: 4.5 },
            axial: PowerLaw { c: 1.2, p: 2.6 },
        }
    }

    /// Constants assembled from locally fitted d, z_{e,K}, ρ_{e,K} and ΔE:
    /// g_rad = m q Ω² d z/2 and g_ax = m q Ω² ρ/4.
    pub fn from_fits(d: &PowerLawFit, z: &PowerLawFit, rho: &PowerLawFit, gap: &PowerLawFit) -> Self {
        ScalingConstants {
            gap: gap.into(),
            radial: PowerLaw { c: 0.5 * d.prefactor * z.prefactor, p: d.exponent + z.exponent },
            axial: PowerLaw { c: 0.25 * rho.prefactor, p: rho.exponent },
        }
    }

    fn law(&self, orientation: TrapOrientation) -> PowerLaw {
        match orientation {
            TrapOrientation::Radial => self.radial,
            TrapOrientation::Axial => self.axial,
        }
    }
}

/// Trap parameters for the closed forms (laboratory units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrapParameters {
    pub q: f64,
    /// Ω_rf in MHz (ω = 2π×f).
    pub omega_mhz: f64,
    pub m_ion_amu: f64,
}

impl TrapParameters {
    fn validate(&self) -> Result<()> {
        if self.q > 0.0 && self.omega_mhz > 0.0 && self.m_ion_amu > 0.0 {
            Ok(())
        } else {
            Err(Error::domain("q, Ω_rf and ion mass must be positive"))
        }
    }

    /// m_i q Ω² in atomic units.
    fn drive_scale(&self) -> f64 {
        let w = mhz_to_energy(self.omega_mhz);
        amu_to_me(self.m_ion_amu) * self.q * w * w
    }
}

/// n_ph = ΔE(n)/ħΩ_rf.
pub fn photon_number(k: &ScalingConstants, n: f64, omega_mhz: f64) -> Result<f64> {
    if !(omega_mhz > 0.0) || !(n > 0.0) {
        return Err(Error::domain("n and Ω_rf must be positive"));
    }
    Ok(k.gap.eval(n) / mhz_to_energy(omega_mhz))
}

/// Principal quantum number at which ΔE(n) = n_ph·ħΩ_rf.
pub fn single_photon_boundary(k: &ScalingConstants, omega_mhz: f64, n_ph: f64) -> Result<f64> {
    if !(omega_mhz > 0.0) || !(n_ph > 0.0) {
        return Err(Error::domain("Ω_rf and n_ph must be positive"));
    }
    Ok((n_ph * mhz_to_energy(omega_mhz) / k.gap.c).powf(1.0 / k.gap.p))
}

/// Coupling g to the nearest state (Hartree).
pub fn coupling(k: &ScalingConstants, n: f64, trap: &TrapParameters, orientation: TrapOrientation) -> Result<f64> {
    trap.validate()?;
    Ok(trap.drive_scale() * k.law(orientation).eval(n))
}

/// χ = g/ΔE.
pub fn chi(k: &ScalingConstants, n: f64, trap: &TrapParameters, orientation: TrapOrientation) -> Result<f64> {
    Ok(coupling(k, n, trap, orientation)? / k.gap.eval(n))
}

/// Principal quantum number where χ = 1.
pub fn n_crit(k: &ScalingConstants, trap: &TrapParameters, orientation: TrapOrientation) -> Result<f64> {
    trap.validate()?;
    let g = k.law(orientation);
    let ratio = k.gap.c / (g.c * trap.drive_scale());
    Ok(ratio.powf(1.0 / (g.p - k.gap.p)))
}

/// One row of the critical-parameter map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CritRow {
    pub omega_mhz: f64,
    pub n_crit_rad: f64,
    pub n_crit_ax: f64,
    pub n_single_photon: f64,
}

/// n_crit for both orientations and the single-photon boundary on a
/// logarithmic Ω_rf grid.
pub fn crit_map(k: &ScalingConstants, q: f64, m_ion_amu: f64, omega_lo: f64, omega_hi: f64, points: usize) -> Result<Vec<CritRow>> {
    if !(omega_lo > 0.0 && omega_hi > omega_lo) || points < 2 {
        return Err(Error::config("crit map needs 0 < Ω_lo < Ω_hi and at least 2 points"));
    }
    let (a, b) = (omega_lo.ln(), omega_hi.ln());
    (0..points)
        .map(|i| {
            let omega_mhz = (a + (b - a) * i as f64 / (points - 1) as f64).exp();
            let trap = TrapParameters { q, omega_mhz, m_ion_amu };
            Ok(CritRow {
                omega_mhz,
                n_crit_rad: n_crit(k, &trap, TrapOrientation::Radial)?,
                n_crit_ax: n_crit(k, &trap, TrapOrientation::Axial)?,
                n_single_photon: single_photon_boundary(k, omega_mhz, 1.0)?,
            })
        })
        .collect()
}
