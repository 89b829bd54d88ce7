use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::starkmap::multipole::MultipoleOperator;
use crate::units::{amu_to_me, mhz_to_energy};

/// Time dependence of the rf voltage, w(t) with |w| ≤ 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Waveform {
    /// w(t) = cos Ωt.
    Sinusoidal,
    /// w(t) = sign(cos Ωt): two levels ±1 at 50% duty.
    Digital,
}

impl Waveform {
    pub fn value(self, phase: f64) -> f64 {
        let c = phase.cos();
        match self {
            Waveform::Sinusoidal => c,
            Waveform::Digital => {
                if c >= 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

/// Axis of the trap along which the molecule is aligned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrapOrientation {
    /// Molecular axis along a radial direction of the trap.
    Radial,
    /// Molecular axis along the rf-null line.
    Axial,
}

/// Paul-trap drive. Frequencies and masses are stored in atomic units.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapDrive {
    pub q: f64,
    /// Ω_rf as an energy ħΩ in Hartree.
    pub omega: f64,
    pub waveform: Waveform,
    pub orientation: TrapOrientation,
    /// Ion mass in electron masses.
    pub m_ion: f64,
    /// Trotter steps per period.
    pub steps: usize,
}

impl TrapDrive {
    /// Build from laboratory units: Ω_rf in MHz (ω = 2π×f), ion mass in amu.
    pub fn new(
        q: f64,
        omega_mhz: f64,
        waveform: Waveform,
        orientation: TrapOrientation,
        m_ion_amu: f64,
        steps: usize,
    ) -> Result<Self> {
        if !(q >= 0.0) || !q.is_finite() {
            return Err(Error::config(format!("stability parameter q must be non-negative, got {q}")));
        }
        if !(omega_mhz > 0.0) || !(m_ion_amu > 0.0) {
            return Err(Error::config("drive frequency and ion mass must be positive"));
        }
        if steps < 2 {
            return Err(Error::config(format!("need at least 2 Trotter steps, got {steps}")));
        }
        Ok(TrapDrive {
            q,
            omega: mhz_to_energy(omega_mhz),
            waveform,
            orientation,
            m_ion: amu_to_me(m_ion_amu),
            steps,
        })
    }

    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega
    }

    pub fn time_step(&self) -> f64 {
        self.period() / self.steps as f64
    }

    /// Prefactor m_i q Ω²/4 multiplying V·w(t).
    pub fn strength(&self) -> f64 {
        self.m_ion * self.q * self.omega * self.omega / 4.0
    }

    /// Step amplitudes c·w(t_k) at the midpoints t_k = (k + ½)Δt.
    pub fn amplitudes(&self) -> Vec<f64> {
        let c = self.strength();
        let n = self.steps as f64;
        (0..self.steps)
            .map(|k| {
                let phase = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / n;
                c * self.waveform.value(phase)
            })
            .collect()
    }

    pub fn with_steps(&self, steps: usize) -> Self {
        TrapDrive { steps, ..self.clone() }
    }
}

/// The three pieces of the radial trap operator.
#[derive(Debug, Clone)]
pub struct RadialParts {
    /// 2 r_ci r_e cosθ_e.
    pub linear: Mat<f64>,
    /// −r_e² P₂(cosθ_e).
    pub quadrupole: Mat<f64>,
    /// −r_e² sin²θ_e cos2φ_e / 2, coupling Δm_j = ±2.
    pub transverse: Mat<f64>,
}

/// Split the radial trap operator into its linear and quadratic terms.
///
/// With C^k_q the Racah-normalized harmonics, r²sin²θ/2 − r²cos²θ = −r²C²₀
/// and r²sin²θ cos2φ = √(2/3) r²(C²₂ + C²₋₂).
pub fn radial_parts(op: &MultipoleOperator, r: f64) -> Result<RadialParts> {
    if op.terms.len() < 2 {
        return Err(Error::config("trap operator needs multipole order ≥ 2"));
    }
    let linear = faer::Scale(2.0 * r) * &op.terms[0];
    let quadrupole = faer::Scale(-1.0) * &op.terms[1];
    let transverse = faer::Scale(-1.0 / 6f64.sqrt()) * op.transverse_quadrupole();
    Ok(RadialParts { linear, quadrupole, transverse })
}

/// Amplitude matrix V with H_P(t) = (m_i q Ω²/4)·V·w(t).
pub fn paul_operator(op: &MultipoleOperator, orientation: TrapOrientation, r: f64) -> Result<Mat<f64>> {
    if !(r >= 0.0) {
        return Err(Error::domain(format!("core-ion distance must be non-negative, got {r}")));
    }
    match orientation {
        TrapOrientation::Radial => {
            let p = radial_parts(op, r)?;
            Ok(p.linear + p.quadrupole + p.transverse)
        }
        TrapOrientation::Axial => {
            let sectors = &op.basis.sectors;
            let coupled = sectors.iter().any(|&a| sectors.iter().any(|&b| b == a + 4));
            if !coupled {
                return Err(Error::config(format!(
                    "axial trap operator couples m_j sectors differing by 2; basis has {:?} (e.g. use -3/2, 1/2, 5/2)",
                    sectors.iter().map(|&m| format!("{m}/2")).collect::<Vec<_>>()
                )));
            }
            // y² − x² = −r² sin²θ cos2φ.
            Ok(faer::Scale(-(2.0f64 / 3.0).sqrt()) * op.transverse_quadrupole())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomcore::{build_basis, QuantumDefectTable};
    use crate::linalg::asymmetry;
    use crate::starkmap::build_multipole;

    fn operator(n: u32, sectors: &[i32]) -> MultipoleOperator {
        let table = QuantumDefectTable::rb87();
        let basis = build_basis(n, sectors, &table).unwrap();
        build_multipole(&basis, &table, 2).unwrap()
    }

    fn max_abs(m: &Mat<f64>) -> f64 {
        let mut x: f64 = 0.0;
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                x = x.max(m[(i, j)].abs());
            }
        }
        x
    }

    #[test]
    fn midpoint_amplitudes_are_symmetric() {
        let d = TrapDrive::new(0.1, 20.0, Waveform::Sinusoidal, TrapOrientation::Radial, 9.012, 16).unwrap();
        let a = d.amplitudes();
        for k in 0..16 {
            assert!((a[k] - a[15 - k]).abs() < 1e-12 * d.strength());
            assert!((a[k] + a[(k + 8) % 16]).abs() < 1e-12 * d.strength());
        }
        let dig = TrapDrive { waveform: Waveform::Digital, ..d };
        let a = dig.amplitudes();
        let plus = a.iter().filter(|&&x| x > 0.0).count();
        assert_eq!(plus, 8);
        assert!(a.iter().all(|x| (x.abs() - dig.strength()).abs() < 1e-20));
    }

    #[test]
    fn rejects_bad_drives() {
        assert!(TrapDrive::new(0.1, 20.0, Waveform::Sinusoidal, TrapOrientation::Radial, 9.012, 1).is_err());
        assert!(TrapDrive::new(-0.1, 20.0, Waveform::Sinusoidal, TrapOrientation::Radial, 9.012, 8).is_err());
        assert!(TrapDrive::new(0.1, 0.0, Waveform::Sinusoidal, TrapOrientation::Radial, 9.012, 8).is_err());
    }

    #[test]
    fn axial_operator_has_no_intra_sector_elements() {
        let op = operator(12, &[-3, 1, 5]);
        let v = paul_operator(&op, TrapOrientation::Axial, 500.0).unwrap();
        assert_eq!(asymmetry(v.as_ref()), 0.0);
        let mut off: f64 = 0.0;
        for (i, a) in op.basis.levels.iter().enumerate() {
            for (j, b) in op.basis.levels.iter().enumerate() {
                if a.mj2 == b.mj2 {
                    assert_eq!(v[(i, j)], 0.0);
                } else {
                    off = off.max(v[(i, j)].abs());
                }
            }
        }
        assert!(off > 0.0);
    }

    #[test]
    fn axial_requires_coupled_sectors() {
        let op = operator(12, &[1]);
        let err = paul_operator(&op, TrapOrientation::Axial, 500.0).unwrap_err();
        assert!(err.is_config());
        assert!(err.to_string().contains("5/2"));
    }

    #[test]
    fn radial_linear_term_vanishes_at_origin() {
        let op = operator(12, &[1]);
        let p = radial_parts(&op, 0.0).unwrap();
        assert_eq!(max_abs(&p.linear), 0.0);
        assert!(max_abs(&p.quadrupole) > 0.0);
        let v0 = paul_operator(&op, TrapOrientation::Radial, 0.0).unwrap();
        let v1 = paul_operator(&op, TrapOrientation::Radial, 100.0).unwrap();
        let diff = &v1 - &v0;
        let lin = radial_parts(&op, 100.0).unwrap().linear;
        assert!(max_abs(&(&diff - &lin)) < 1e-9 * max_abs(&lin));
    }

    #[test]
    fn radial_operator_matches_cartesian_form() {
        // y² − z² + 2 r z evaluated through independent pieces:
        // y² = r²sin²θ sin²φ = r²/3 − r²C²₀/3 − r²(C²₂+C²₋₂)/√6.
        let op = operator(10, &[-3, 1]);
        let r = 300.0;
        let v = paul_operator(&op, TrapOrientation::Radial, r).unwrap();
        let r2 = op.second_moment();
        let m2 = &op.terms[1];
        let tq = op.transverse_quadrupole();
        let y2 = faer::Scale(1.0 / 3.0) * r2 - faer::Scale(1.0 / 3.0) * m2 - faer::Scale(1.0 / 6f64.sqrt()) * tq;
        let z2 = faer::Scale(1.0 / 3.0) * r2 + faer::Scale(2.0 / 3.0) * m2;
        let expect = &y2 - &z2 + faer::Scale(2.0 * r) * &op.terms[0];
        assert!(max_abs(&(&v - &expect)) < 1e-9 * max_abs(&v));
    }
}
