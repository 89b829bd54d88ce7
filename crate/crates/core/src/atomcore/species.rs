use crate::error::{Error, Result};

/// Atomic mass (amu) of a supported Rydberg-atom species.
pub fn atom_mass_amu(species: &str) -> Result<f64> {
    match species {
        "Rb87" => Ok(86.909),
        other => Err(Error::config(format!("unknown atom species `{other}`"))),
    }
}

/// Atomic mass (amu) of a supported ion species.
pub fn ion_mass_amu(species: &str) -> Result<f64> {
    match species {
        "Be9" => Ok(9.012),
        "Mg24" => Ok(23.985),
        "Ca40" => Ok(39.963),
        "Sr88" => Ok(87.906),
        "Ba138" => Ok(137.905),
        "Yb174" => Ok(173.939),
        other => Err(Error::config(format!("unknown ion species `{other}`"))),
    }
}

/// Reduced mass m_a m_i / (m_a + m_i).
pub fn reduced_mass(m_a: f64, m_i: f64) -> f64 {
    m_a * m_i / (m_a + m_i)
}
