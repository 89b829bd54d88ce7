use std::ops::Range;

use crate::atomcore::defects::QuantumDefectTable;
use crate::atomcore::level::{level_energy, RydbergLevel};
use crate::error::{Error, Result};

/// Half-width of the principal-quantum-number window: n_c − 4 < n < n_c + 4.
pub const N_WINDOW: u32 = 4;

/// Truncated Rydberg basis around a central principal quantum number.
#[derive(Debug, Clone)]
pub struct BasisSet {
    pub n_center: u32,
    /// Doubled m_j values of the included sectors, ascending.
    pub sectors: Vec<i32>,
    pub levels: Vec<RydbergLevel>,
    /// Field-free energies (Hartree) aligned with `levels`.
    pub energies: Vec<f64>,
    ranges: Vec<Range<usize>>,
}

impl BasisSet {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Index range of the levels with the given doubled m_j.
    pub fn sector_range(&self, mj2: i32) -> Option<Range<usize>> {
        self.sectors.iter().position(|&s| s == mj2).map(|i| self.ranges[i].clone())
    }

    pub fn has_sector(&self, mj2: i32) -> bool {
        self.sectors.contains(&mj2)
    }

    pub fn index_of(&self, level: &RydbergLevel) -> Option<usize> {
        let range = self.sector_range(level.mj2)?;
        self.levels[range.clone()].iter().position(|l| l == level).map(|i| i + range.start)
    }
}

/// Build the basis of all levels with n_c − 4 < n < n_c + 4 in each requested
/// m_j sector (doubled values), ordered by (m_j, n, l, j).
pub fn build_basis(n_center: u32, mj2_sectors: &[i32], table: &QuantumDefectTable) -> Result<BasisSet> {
    if mj2_sectors.is_empty() {
        return Err(Error::config("at least one m_j sector is required"));
    }
    if let Some(bad) = mj2_sectors.iter().find(|m| m.rem_euclid(2) != 1) {
        return Err(Error::config(format!("m_j sector {bad}/2 is not a half-integer")));
    }
    let n_floor = table.max_n_min() + N_WINDOW;
    if n_center < n_floor {
        return Err(Error::config(format!("n_c={n_center} below minimum {n_floor} for {}", table.species)));
    }
    let mut sectors = mj2_sectors.to_vec();
    sectors.sort_unstable();
    sectors.dedup();

    let mut levels = Vec::new();
    let mut ranges = Vec::with_capacity(sectors.len());
    for &mj2 in &sectors {
        let start = levels.len();
        for n in (n_center - N_WINDOW + 1)..(n_center + N_WINDOW) {
            for l in 0..n {
                for j2 in [2 * l as i64 - 1, 2 * l as i64 + 1] {
                    if j2 < 1 || mj2.unsigned_abs() as i64 > j2 {
                        continue;
                    }
                    let j2 = j2 as u32;
                    if n < table.n_min(l, j2) {
                        continue;
                    }
                    levels.push(RydbergLevel { n, l, j2, mj2 });
                }
            }
        }
        ranges.push(start..levels.len());
    }
    let energies = levels.iter().map(|l| level_energy(l, table)).collect::<Result<Vec<_>>>()?;
    Ok(BasisSet { n_center, sectors, levels, energies, ranges })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_of_single_sector_n22() {
        let b = build_basis(22, &[1], &QuantumDefectTable::rb87()).unwrap();
        // Σ_{n=19}^{25} (2n − 1)
        let expected: u32 = (19..=25).map(|n| 2 * n - 1).sum();
        assert_eq!(b.len(), expected as usize);
        assert_eq!(b.len(), 301);
        assert!(b.levels.iter().all(|l| (19..=25).contains(&l.n)));
    }

    #[test]
    fn sector_blocks_are_contiguous_and_ordered() {
        let b = build_basis(22, &[5, -3, 1], &QuantumDefectTable::rb87()).unwrap();
        assert_eq!(b.sectors, vec![-3, 1, 5]);
        let mut covered = 0;
        for &s in &b.sectors {
            let r = b.sector_range(s).unwrap();
            assert_eq!(r.start, covered);
            covered = r.end;
            assert!(b.levels[r].iter().all(|l| l.mj2 == s));
        }
        assert_eq!(covered, b.len());
        assert!(b.levels.windows(2).all(|w| (w[0].mj2, w[0].n, w[0].l, w[0].j2) < (w[1].mj2, w[1].n, w[1].l, w[1].j2)));
    }

    #[test]
    fn high_m_sector_excludes_low_j() {
        let b = build_basis(22, &[5], &QuantumDefectTable::rb87()).unwrap();
        assert!(b.levels.iter().all(|l| l.j2 >= 5));
        assert!(b.levels.iter().all(|l| l.l >= 2));
    }

    #[test]
    fn empty_sector_list_is_rejected() {
        let err = build_basis(22, &[], &QuantumDefectTable::rb87()).unwrap_err();
        assert!(err.is_config());
    }

    #[test]
    fn index_lookup() {
        let b = build_basis(22, &[1, 5], &QuantumDefectTable::rb87()).unwrap();
        for (i, l) in b.levels.iter().enumerate() {
            assert_eq!(b.index_of(l), Some(i));
        }
    }
}
