use std::fmt;

use crate::atomcore::defects::QuantumDefectTable;
use crate::error::{Error, Result};

const L_LETTERS: &[u8] = b"SPDFGHIKLMNOQRTUV";

/// A fine-structure Rydberg level |n, l, j, m_j⟩ with s = 1/2.
///
/// Half-integer quantum numbers are stored doubled (`j2 = 2j`, `mj2 = 2m_j`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct RydbergLevel {
    pub n: u32,
    pub l: u32,
    pub j2: u32,
    pub mj2: i32,
}

impl RydbergLevel {
    pub fn new(n: u32, l: u32, j2: u32, mj2: i32) -> Result<Self> {
        if l >= n {
            return Err(Error::domain(format!("l={l} must be below n={n}")));
        }
        if j2 % 2 != 1 || (j2 as i64 - 2 * l as i64).abs() != 1 {
            return Err(Error::domain(format!("j={j2}/2 incompatible with l={l}")));
        }
        if mj2.unsigned_abs() > j2 || mj2.rem_euclid(2) != 1 {
            return Err(Error::domain(format!("m_j={mj2}/2 incompatible with j={j2}/2")));
        }
        Ok(Self { n, l, j2, mj2 })
    }

    pub fn j(&self) -> f64 {
        self.j2 as f64 / 2.0
    }

    pub fn mj(&self) -> f64 {
        self.mj2 as f64 / 2.0
    }

    /// The (n, l, j) channel key shared by all m_j components.
    pub fn nlj(&self) -> (u32, u32, u32) {
        (self.n, self.l, self.j2)
    }

    /// Label such as `22P1/2`.
    pub fn label(&self) -> String {
        let letter = L_LETTERS
            .get(self.l as usize)
            .map(|&c| (c as char).to_string())
            .unwrap_or_else(|| format!("[l={}]", self.l));
        format!("{}{}{}/2", self.n, letter, self.j2)
    }
}

impl fmt::Display for RydbergLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mj={}/2", self.label(), self.mj2)
    }
}

/// Effective quantum numbers of a level in a given defect table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveNumbers {
    pub delta: f64,
    /// n* = n − δ
    pub n_star: f64,
    /// l* = l − δ + I with I = ⌊δ⌋
    pub l_star: f64,
    /// Integer shift I = ⌊δ⌋.
    pub shift: u32,
    /// Laguerre degree n* − l* − 1 (an integer).
    pub degree: i64,
}

pub fn effective_numbers(level: &RydbergLevel, table: &QuantumDefectTable) -> Result<EffectiveNumbers> {
    let delta = table.delta(level.n, level.l, level.j2)?;
    let shift = delta.floor().max(0.0) as u32;
    let n_star = level.n as f64 - delta;
    let l_star = level.l as f64 - delta + shift as f64;
    let degree = level.n as i64 - level.l as i64 - 1 - shift as i64;
    if n_star <= 0.0 || degree < 0 {
        return Err(Error::InvalidChannel(format!(
            "{}: n*-l*-1 = {degree} is negative",
            level.label()
        )));
    }
    Ok(EffectiveNumbers { delta, n_star, l_star, shift, degree })
}

/// Rydberg-Ritz energy −1/(2 n*²) in Hartree.
pub fn level_energy(level: &RydbergLevel, table: &QuantumDefectTable) -> Result<f64> {
    if level.n < table.n_min(level.l, level.j2) {
        return Err(Error::config(format!(
            "{} below n_min={} of the {} table",
            level.label(),
            table.n_min(level.l, level.j2),
            table.species
        )));
    }
    let e = effective_numbers(level, table)?;
    Ok(-0.5 / (e.n_star * e.n_star))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rb() -> QuantumDefectTable {
        QuantumDefectTable::rb87()
    }

    #[test]
    fn hydrogenic_bohr_energy() {
        let t = QuantumDefectTable::parse("H 0 1/2 0 0 1\n").unwrap();
        let lvl = RydbergLevel::new(2, 1, 3, 1).unwrap();
        let e = level_energy(&lvl, &t).unwrap();
        assert!((e + 0.125).abs() < 1e-15);
    }

    #[test]
    fn fine_structure_ordering_50p() {
        let p12 = level_energy(&RydbergLevel::new(50, 1, 1, 1).unwrap(), &rb()).unwrap();
        let p32 = level_energy(&RydbergLevel::new(50, 1, 3, 1).unwrap(), &rb()).unwrap();
        assert!(p12 < p32);
    }

    #[test]
    fn ritz_energy_22p32_matches_direct_formula() {
        // direct evaluation with the coefficients written out
        let ns: f64 = 22.0 - (2.6416737 + 0.2950 / (22.0f64 - 2.6416737).powi(2));
        let oracle = -0.5 / (ns * ns);
        let e = level_energy(&RydbergLevel::new(22, 1, 3, 1).unwrap(), &rb()).unwrap();
        assert!((e / oracle - 1.0).abs() < 1e-10);
    }

    #[test]
    fn energy_increases_with_n() {
        let t = rb();
        for &(l, j2) in &[(0, 1), (1, 1), (1, 3), (2, 3), (2, 5), (3, 5), (3, 7), (5, 9)] {
            let mut prev = f64::NEG_INFINITY;
            for n in t.n_min(l, j2)..80 {
                let e = level_energy(&RydbergLevel::new(n, l, j2, 1).unwrap(), &t).unwrap();
                assert!(e < 0.0 && e > prev);
                prev = e;
            }
        }
    }

    #[test]
    fn below_n_min_is_config_error() {
        let err = level_energy(&RydbergLevel::new(4, 0, 1, 1).unwrap(), &rb()).unwrap_err();
        assert!(err.is_config());
    }

    #[test]
    fn effective_number_constraint() {
        let t = rb();
        for c in &t.channels {
            let lvl = RydbergLevel::new(30, c.l, c.j2, 1).unwrap();
            let e = effective_numbers(&lvl, &t).unwrap();
            let i = e.shift as f64;
            assert!(e.delta - c.l as f64 - 0.5 < i);
            assert!(e.shift as i64 <= c.n_min as i64 - c.l as i64 - 1);
            assert!(((e.n_star - e.l_star - 1.0) - e.degree as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn labels() {
        assert_eq!(RydbergLevel::new(22, 1, 1, 1).unwrap().label(), "22P1/2");
        assert_eq!(RydbergLevel::new(50, 3, 7, -5).unwrap().label(), "50F7/2");
        assert!(RydbergLevel::new(5, 0, 3, 1).is_err());
        assert!(RydbergLevel::new(5, 1, 1, 3).is_err());
    }
}
