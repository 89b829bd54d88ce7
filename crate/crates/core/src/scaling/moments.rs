use faer::Mat;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::eigh;
use crate::starkmap::multipole::MultipoleOperator;
use crate::starkmap::scan::assemble_hti;

/// Sector holding the well state (m_j = 1/2, doubled).
const WELL_SECTOR: i32 = 1;

/// How the coupled partner states are picked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentOptions {
    /// Number of nearest candidate states used to set the coupling scale.
    pub neighbours: usize,
    /// Candidates whose |coupling| is below this fraction of the largest
    /// among the neighbours are treated as uncoupled.
    pub weak_fraction: f64,
}

impl Default for MomentOptions {
    fn default() -> Self {
        Self { neighbours: 8, weak_fraction: 0.1 }
    }
}

/// Near-degenerate pair of states coupled to the well state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoupledPair {
    /// Column indices into the sector-ordered eigenbasis.
    pub states: [usize; 2],
    /// Energies relative to the well state (Hartree).
    pub offsets: [f64; 2],
    pub couplings: [f64; 2],
    /// Doubled m_j of each state.
    pub sectors: [i32; 2],
}

impl CoupledPair {
    /// √(c₁² + c₂²).
    pub fn combined(&self) -> f64 {
        self.couplings[0].hypot(self.couplings[1])
    }

    /// Smaller |E_K − E_well| of the pair.
    pub fn gap(&self) -> f64 {
        self.offsets[0].abs().min(self.offsets[1].abs())
    }
}

/// ΔE, z_{e,K} and (when the basis has the m_j = −3/2, 5/2 sectors) ρ_{e,K}
/// at the well position, atomic units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionMoments {
    pub d: f64,
    pub delta_e: f64,
    pub z: f64,
    pub rho: Option<f64>,
    pub dipole_pair: CoupledPair,
    pub quadrupole_pair: Option<CoupledPair>,
}

/// Eigenstates of H_TI(r) diagonalized sector by sector. Columns are grouped
/// by sector in basis order.
pub struct SectorSpectrum {
    pub energies: Vec<f64>,
    pub sectors: Vec<i32>,
    pub vectors: Mat<f64>,
}

impl SectorSpectrum {
    pub fn new(op: &MultipoleOperator, r: f64, e_ref: f64) -> Result<Self> {
        let h = assemble_hti(op, r, e_ref)?;
        let dim = op.dim();
        let mut energies = vec![0.0; dim];
        let mut sectors = vec![0; dim];
        let mut vectors = Mat::<f64>::zeros(dim, dim);
        for &s in &op.basis.sectors {
            let rg = op.basis.sector_range(s).expect("listed sector");
            let (e, v) = eigh(h.submatrix(rg.start, rg.start, rg.len(), rg.len()))?;
            for k in 0..rg.len() {
                energies[rg.start + k] = e[k];
                sectors[rg.start + k] = s;
                for i in 0..rg.len() {
                    vectors[(rg.start + i, rg.start + k)] = v[(i, k)];
                }
            }
        }
        Ok(Self { energies, sectors, vectors })
    }

    /// Column of the `rank`-th state (by energy) of sector `mj2`.
    pub fn column(&self, op: &MultipoleOperator, mj2: i32, rank: usize) -> Result<usize> {
        let rg = op
            .basis
            .sector_range(mj2)
            .ok_or_else(|| Error::config(format!("basis has no m_j = {mj2}/2 sector")))?;
        if rank >= rg.len() {
            return Err(Error::config(format!("rank {rank} outside the {}-state sector", rg.len())));
        }
        Ok(rg.start + rank)
    }

    /// ⟨col|V|k⟩ for every column k.
    fn couplings(&self, v: &Mat<f64>, col: usize) -> Vec<f64> {
        let row = self.vectors.col(col).transpose() * v;
        let all = row * &self.vectors;
        (0..self.energies.len()).map(|k| all[k]).collect()
    }
}

/// Pick the nearest coupled state K among `candidates` and its nearest
/// companion in energy. States with coupling below `weak_fraction` of the
/// strongest nearby coupling are skipped when choosing K.
pub fn select_pair(
    offsets: &[f64],
    couplings: &[f64],
    candidates: &[usize],
    opts: &MomentOptions,
) -> Result<[usize; 2]> {
    let mut order: Vec<usize> = candidates.to_vec();
    order.sort_by(|&a, &b| offsets[a].abs().total_cmp(&offsets[b].abs()));
    let scale = order
        .iter()
        .take(opts.neighbours.max(1))
        .map(|&k| couplings[k].abs())
        .fold(0.0, f64::max);
    if order.len() < 2 || scale == 0.0 {
        return Err(Error::domain("no coupled state within the basis window"));
    }
    let k = *order
        .iter()
        .find(|&&k| couplings[k].abs() >= opts.weak_fraction * scale)
        .expect("the strongest neighbour passes");
    let companion = *order
        .iter()
        .filter(|&&j| j != k)
        .min_by(|&&a, &&b| (offsets[a] - offsets[k]).abs().total_cmp(&(offsets[b] - offsets[k]).abs()))
        .expect("at least two candidates");
    Ok([k, companion])
}

fn pair_at(spec: &SectorSpectrum, well: usize, v: &Mat<f64>, candidates: &[usize], opts: &MomentOptions) -> Result<CoupledPair> {
    let c = spec.couplings(v, well);
    let off: Vec<f64> = spec.energies.iter().map(|e| e - spec.energies[well]).collect();
    let [a, b] = select_pair(&off, &c, candidates, opts)?;
    Ok(CoupledPair {
        states: [a, b],
        offsets: [off[a], off[b]],
        couplings: [c[a], c[b]],
        sectors: [spec.sectors[a], spec.sectors[b]],
    })
}

/// Transition moments of the m_j = 1/2 state of energy rank `rank` (within
/// its sector) at core-ion distance `d`.
///
/// z_{e,K} uses the dipole r C¹₀ between m_j = 1/2 states. ρ_{e,K} uses the
/// axial quadrupole y² − x² = −√(2/3) r²(C²₂ + C²₋₂) into the m_j = −3/2 and
/// 5/2 sectors and is only evaluated when both sectors are present.
pub fn transition_moments(
    op: &MultipoleOperator,
    e_ref: f64,
    rank: usize,
    d: f64,
    opts: &MomentOptions,
) -> Result<TransitionMoments> {
    let spec = SectorSpectrum::new(op, d, e_ref)?;
    let well = spec.column(op, WELL_SECTOR, rank)?;
    let same: Vec<usize> = (0..spec.energies.len()).filter(|&k| k != well && spec.sectors[k] == WELL_SECTOR).collect();
    let dipole_pair = pair_at(&spec, well, &op.terms[0], &same, opts)?;

    let quadrupole_pair = if op.basis.has_sector(-3) && op.basis.has_sector(5) {
        let v = faer::Scale(-(2.0f64 / 3.0).sqrt()) * op.transverse_quadrupole();
        let other: Vec<usize> = (0..spec.energies.len()).filter(|&k| matches!(spec.sectors[k], -3 | 5)).collect();
        Some(pair_at(&spec, well, &v, &other, opts)?)
    } else {
        None
    };
    Ok(TransitionMoments {
        d,
        delta_e: dipole_pair.gap(),
        z: dipole_pair.combined(),
        rho: quadrupole_pair.map(|p| p.combined()),
        dipole_pair,
        quadrupole_pair,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn weak_nearest_state_is_skipped() {
        let off = [-0.30, -0.53, -0.54, -0.9, -1.5];
        let c = [0.05, 3.0, -3.0, -0.02, 5.4];
        let p = select_pair(&off, &c, &[0, 1, 2, 3, 4], &MomentOptions::default()).unwrap();
        assert_eq!(p, [1, 2]);
    }

    #[test]
    fn strong_nearest_state_keeps_weak_companion() {
        let off = [-0.30, -0.35, -1.3];
        let c = [0.04, 0.62, 0.17];
        let p = select_pair(&off, &c, &[0, 1, 2], &MomentOptions::default()).unwrap();
        assert_eq!(p, [1, 0]);
    }

    #[test]
    fn uncoupled_window_is_an_error() {
        assert!(select_pair(&[0.1, 0.2], &[0.0, 0.0], &[0, 1], &MomentOptions::default()).is_err());
        assert!(select_pair(&[0.1], &[1.0], &[0], &MomentOptions::default()).is_err());
    }

    proptest! {
        #[test]
        fn pair_norm_is_label_symmetric(a in -10.0f64..10.0, b in -10.0f64..10.0) {
            let p = CoupledPair { states: [0, 1], offsets: [1.0, 2.0], couplings: [a, b], sectors: [1, 1] };
            let q = CoupledPair { couplings: [b, a], ..p };
            prop_assert_eq!(p.combined(), q.combined());
        }
    }
}
