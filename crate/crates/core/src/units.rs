//! Hartree atomic units (ħ = e = m_e = 4πε₀ = 1) and conversions to
//! laboratory units.
//!
//! Frequencies quoted "in MHz" follow the convention ω = 2π × f, so an
//! angular frequency of 2π×36 MHz is passed around as `36.0` MHz and its
//! energy ħω in atomic units is `mhz_to_energy(36.0)`.

/// Hartree energy expressed as a frequency E_H/h, in GHz (CODATA 2018).
pub const HARTREE_GHZ: f64 = 6.579_683_920_502e6;
/// Hartree energy expressed as a frequency E_H/h, in MHz.
pub const HARTREE_MHZ: f64 = HARTREE_GHZ * 1e3;
/// Bohr radius in nm.
pub const BOHR_NM: f64 = 0.052_917_721_090_3;
/// Atomic mass unit in electron masses.
pub const AMU_ME: f64 = 1822.888_486_209;
/// Atomic unit of time in seconds.
pub const TIME_S: f64 = 2.418_884_326_585_7e-17;
/// Speed of light in atomic units (1/α).
pub const SPEED_OF_LIGHT: f64 = 137.035_999_084;

pub fn energy_to_ghz(e: f64) -> f64 {
    e * HARTREE_GHZ
}

pub fn ghz_to_energy(f: f64) -> f64 {
    f / HARTREE_GHZ
}

pub fn energy_to_mhz(e: f64) -> f64 {
    e * HARTREE_MHZ
}

pub fn mhz_to_energy(f: f64) -> f64 {
    f / HARTREE_MHZ
}

pub fn nm_to_bohr(x: f64) -> f64 {
    x / BOHR_NM
}

pub fn bohr_to_nm(x: f64) -> f64 {
    x * BOHR_NM
}

pub fn um_to_bohr(x: f64) -> f64 {
    x * 1e3 / BOHR_NM
}

pub fn bohr_to_um(x: f64) -> f64 {
    x * BOHR_NM * 1e-3
}

pub fn amu_to_me(m: f64) -> f64 {
    m * AMU_ME
}

pub fn me_to_amu(m: f64) -> f64 {
    m / AMU_ME
}

/// Microseconds to atomic time units.
pub fn us_to_time(t: f64) -> f64 {
    t * 1e-6 / TIME_S
}

pub fn time_to_us(t: f64) -> f64 {
    t * TIME_S * 1e6
}

/// Angular frequency 2π×f in rad/s for `f` in MHz.
pub fn mhz_to_rad_per_s(f: f64) -> f64 {
    std::f64::consts::TAU * f * 1e6
}

/// Hartree energy as an angular frequency E_H/ħ in rad/s.
pub fn hartree_rad_per_s() -> f64 {
    1.0 / TIME_S
}
