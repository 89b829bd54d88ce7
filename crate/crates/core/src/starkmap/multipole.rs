use std::collections::HashMap;
use std::sync::OnceLock;

use faer::Mat;

use crate::atomcore::angular::angular_matrix_element;
use crate::atomcore::basis::BasisSet;
use crate::atomcore::defects::QuantumDefectTable;
use crate::atomcore::level::RydbergLevel;
use crate::atomcore::radial::{RadialGrid, MAX_POWER};
use crate::error::{Error, Result};

/// Highest multipole order of the atom-ion interaction.
pub const MAX_MULTIPOLE: u32 = 6;

type Moments = [f64; MAX_POWER + 1];

/// Cached electron multipole matrices over a basis.
///
/// `terms[l'-1]` holds M_{l'} with entries ⟨a|r^{l'} C^{l'}_0|b⟩, so that the
/// ion at distance R on the quantization axis contributes −Σ M_{l'}/R^{l'+1}.
pub struct MultipoleOperator {
    pub basis: BasisSet,
    pub terms: Vec<Mat<f64>>,
    moments: HashMap<((u32, u32, u32), (u32, u32, u32)), Moments>,
    second_moment: OnceLock<Mat<f64>>,
    transverse_quadrupole: OnceLock<Mat<f64>>,
}

impl std::fmt::Debug for MultipoleOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MultipoleOperator")
            .field("dim", &self.dim())
            .field("sectors", &self.basis.sectors)
            .finish()
    }
}

fn key(a: &RydbergLevel, b: &RydbergLevel) -> ((u32, u32, u32), (u32, u32, u32)) {
    let (x, y) = (a.nlj(), b.nlj());
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

impl MultipoleOperator {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn max_order(&self) -> u32 {
        self.terms.len() as u32
    }

    /// ∫R_a r^{p+2} R_b dr for a cached pair (|Δl| ≤ 6).
    pub fn radial(&self, a: &RydbergLevel, b: &RydbergLevel, p: usize) -> Option<f64> {
        self.moments.get(&key(a, b)).map(|m| m[p])
    }

    /// Matrix of Σ_pairs radial(p) × angular(k, q) over the whole basis.
    fn tensor_matrix(&self, p: usize, k: u32, q: i32) -> Mat<f64> {
        let levels = &self.basis.levels;
        let n = levels.len();
        let mut m = Mat::<f64>::zeros(n, n);
        for (i, a) in levels.iter().enumerate() {
            for (j, b) in levels.iter().enumerate() {
                if a.mj2 != b.mj2 + 2 * q || a.l.abs_diff(b.l) > k {
                    continue;
                }
                let ang = angular_matrix_element(a, b, k, q);
                if ang != 0.0 {
                    let rad = self.radial(a, b, p).expect("pair within cached range");
                    m[(i, j)] = rad * ang;
                }
            }
        }
        m
    }

    /// Average with the transpose so the result is exactly symmetric.
    fn symmetrized(m: Mat<f64>) -> Mat<f64> {
        let t = m.transpose().to_owned();
        faer::Scale(0.5) * (&m + &t)
    }

    /// ⟨a|r²|b⟩ (scalar, diagonal in l, j, m_j).
    pub fn second_moment(&self) -> &Mat<f64> {
        self.second_moment.get_or_init(|| {
            let levels = &self.basis.levels;
            let n = levels.len();
            let mut m = Mat::<f64>::zeros(n, n);
            for (i, a) in levels.iter().enumerate() {
                for (j, b) in levels.iter().enumerate() {
                    if a.l == b.l && a.j2 == b.j2 && a.mj2 == b.mj2 {
                        m[(i, j)] = self.radial(a, b, 2).expect("cached");
                    }
                }
            }
            m
        })
    }

    /// ⟨a|r²(C²₂ + C²₋₂)|b⟩, coupling sectors with Δm_j = ±2.
    pub fn transverse_quadrupole(&self) -> &Mat<f64> {
        self.transverse_quadrupole.get_or_init(|| {
            let plus = self.tensor_matrix(2, 2, 2);
            let minus = self.tensor_matrix(2, 2, -2);
            Self::symmetrized(plus + minus)
        })
    }
}

/// Assemble M_1..M_{l'_max} for the basis.
pub fn build_multipole(
    basis: &BasisSet,
    table: &QuantumDefectTable,
    max_order: u32,
) -> Result<MultipoleOperator> {
    if basis.is_empty() {
        return Err(Error::config("empty basis"));
    }
    if !(1..=MAX_MULTIPOLE).contains(&max_order) {
        return Err(Error::config(format!("multipole order must be 1..={MAX_MULTIPOLE}")));
    }
    let grid = RadialGrid::new(basis.levels.iter(), table)?;
    let mut channels: Vec<&RydbergLevel> = Vec::new();
    for l in &basis.levels {
        if !channels.iter().any(|c| c.nlj() == l.nlj()) {
            channels.push(l);
        }
    }
    let mut moments = HashMap::new();
    for (i, a) in channels.iter().enumerate() {
        for b in &channels[i..] {
            if a.l.abs_diff(b.l) <= MAX_MULTIPOLE {
                moments.insert(key(a, b), grid.moments(a, b)?);
            }
        }
    }
    let mut op = MultipoleOperator {
        basis: basis.clone(),
        terms: Vec::new(),
        moments,
        second_moment: OnceLock::new(),
        transverse_quadrupole: OnceLock::new(),
    };
    op.terms = (1..=max_order)
        .map(|k| MultipoleOperator::symmetrized(op.tensor_matrix(k as usize, k, 0)))
        .collect();
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomcore::basis::build_basis;
    use crate::atomcore::radial::radial_integral;
    use crate::linalg::asymmetry;

    fn op22() -> MultipoleOperator {
        let t = QuantumDefectTable::rb87();
        let b = build_basis(22, &[1], &t).unwrap();
        build_multipole(&b, &t, 6).unwrap()
    }

    #[test]
    fn dipole_vanishes_between_equal_parity() {
        let op = op22();
        let lv = &op.basis.levels;
        for (i, a) in lv.iter().enumerate() {
            for (j, b) in lv.iter().enumerate() {
                if (a.l + b.l) % 2 == 0 {
                    assert_eq!(op.terms[0][(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn dipole_entry_factorizes() {
        let t = QuantumDefectTable::rb87();
        let op = op22();
        let s = RydbergLevel::new(22, 0, 1, 1).unwrap();
        let p = RydbergLevel::new(22, 1, 1, 1).unwrap();
        let (i, j) = (op.basis.index_of(&s).unwrap(), op.basis.index_of(&p).unwrap());
        let oracle = radial_integral(&s, &p, 1, &t).unwrap() * angular_matrix_element(&s, &p, 1, 0);
        assert!((op.terms[0][(i, j)] / oracle - 1.0).abs() < 1e-9);
    }

    #[test]
    fn all_blocks_symmetric() {
        let t = QuantumDefectTable::rb87();
        let b = build_basis(22, &[-3, 1, 5], &t).unwrap();
        let op = build_multipole(&b, &t, 6).unwrap();
        for m in &op.terms {
            assert_eq!(asymmetry(m.as_ref()), 0.0);
        }
        let q = op.transverse_quadrupole();
        assert!(asymmetry(q.as_ref()) <= 1e-12 * q.norm_max());
        let r2 = op.second_moment();
        assert!(asymmetry(r2.as_ref()) <= 1e-12 * r2.norm_max());
        // the C^k_0 terms never couple different sectors
        let r1 = b.sector_range(1).unwrap();
        let r5 = b.sector_range(5).unwrap();
        for i in r1.clone() {
            for j in r5.clone() {
                assert_eq!(op.terms[1][(i, j)], 0.0);
            }
        }
        // and the transverse quadrupole only does
        for i in r1.clone() {
            for j in r1.clone() {
                assert_eq!(q[(i, j)], 0.0);
            }
        }
    }
}
