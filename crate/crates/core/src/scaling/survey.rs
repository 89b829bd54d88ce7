use serde::Serialize;

use crate::atomcore::species::reduced_mass;
use crate::atomcore::{build_basis, QuantumDefectTable, RydbergLevel};
use crate::error::{Error, Result};
use crate::scaling::fit::{fit_power_law, fit_prefactor, PowerLawFit};
use crate::scaling::moments::{transition_moments, MomentOptions, TransitionMoments};
use crate::starkmap::{build_multipole, locate_well, reference_energy, WellSearch};
use crate::units::amu_to_me;

/// Multipole order used for well surveys.
pub const SURVEY_MULTIPOLE: u32 = 6;

/// Settings of a per-n well survey.
#[derive(Debug, Clone, Serialize)]
pub struct SurveyOptions {
    pub well: WellSearch,
    pub moments: MomentOptions,
    /// Also build the {−3/2, 1/2, 5/2} basis to evaluate ρ_{e,K}.
    pub quadrupole: bool,
    pub m_atom_amu: f64,
    pub m_ion_amu: f64,
}

impl Default for SurveyOptions {
    fn default() -> Self {
        Self {
            well: WellSearch { vibrational_count: 1, span_points: 16, ..Default::default() },
            moments: MomentOptions::default(),
            quadrupole: true,
            m_atom_amu: 86.909,
            m_ion_amu: 9.012,
        }
    }
}

/// nP1/2 well of one principal quantum number (atomic units).
#[derive(Debug, Clone, Serialize)]
pub struct SurveyRow {
    pub n: u32,
    /// Core-ion distance of the minimum (Bohr).
    pub d: f64,
    /// Harmonic frequency ħω_M (Hartree).
    pub omega: f64,
    /// Energy rank of the well curve in the m_j = 1/2 sector.
    pub rank: usize,
    pub moments: TransitionMoments,
}

/// Locate the nP1/2 well and evaluate its transition moments.
pub fn survey_level(n: u32, table: &QuantumDefectTable, opts: &SurveyOptions) -> Result<SurveyRow> {
    let e_ref = reference_energy(n, table)?;
    let mu = amu_to_me(reduced_mass(opts.m_atom_amu, opts.m_ion_amu));
    let level = RydbergLevel::new(n, 1, 1, 1)?;
    let op = build_multipole(&build_basis(n, &[1], table)?, table, SURVEY_MULTIPOLE)?;
    let located = locate_well(&op, e_ref, &level, mu, &opts.well, None)?;
    let d = located.well.d;
    let moments = if opts.quadrupole {
        drop(op);
        let op3 = build_multipole(&build_basis(n, &[-3, 1, 5], table)?, table, SURVEY_MULTIPOLE)?;
        transition_moments(&op3, e_ref, located.rank, d, &opts.moments)?
    } else {
        transition_moments(&op, e_ref, located.rank, d, &opts.moments)?
    };
    Ok(SurveyRow { n, d, omega: located.well.omega, rank: located.rank, moments })
}

/// Power laws fitted across a survey: free fits plus prefactors at the
/// published exponents.
#[derive(Debug, Clone, Serialize)]
pub struct SurveyFits {
    pub d: PowerLawFit,
    pub omega: PowerLawFit,
    pub gap: PowerLawFit,
    pub z: PowerLawFit,
    pub rho: Option<PowerLawFit>,
    pub d_fixed: PowerLawFit,
    pub omega_fixed: PowerLawFit,
    pub gap_fixed: PowerLawFit,
    pub z_fixed: PowerLawFit,
    pub rho_fixed: Option<PowerLawFit>,
}

pub fn fit_survey(rows: &[SurveyRow]) -> Result<SurveyFits> {
    let series = |f: &dyn Fn(&SurveyRow) -> f64| -> Vec<(f64, f64)> { rows.iter().map(|r| (r.n as f64, f(r))).collect() };
    let d = series(&|r| r.d);
    let omega = series(&|r| r.omega);
    let gap = series(&|r| r.moments.delta_e.abs());
    let z = series(&|r| r.moments.z.abs());
    let rho: Option<Vec<(f64, f64)>> = rows.iter().map(|r| r.moments.rho.map(|x| (r.n as f64, x.abs()))).collect();
    if rows.len() < 3 {
        return Err(Error::domain("survey fits need at least 3 values of n"));
    }
    Ok(SurveyFits {
        d: fit_power_law(&d)?,
        omega: fit_power_law(&omega)?,
        gap: fit_power_law(&gap)?,
        z: fit_power_law(&z)?,
        rho: rho.as_deref().map(fit_power_law).transpose()?,
        d_fixed: fit_prefactor(&d, 2.5)?,
        omega_fixed: fit_prefactor(&omega, -4.0)?,
        gap_fixed: fit_prefactor(&gap, -4.0)?,
        z_fixed: fit_prefactor(&z, 2.0)?,
        rho_fixed: rho.as_deref().map(|s| fit_prefactor(s, 2.6)).transpose()?,
    })
}
