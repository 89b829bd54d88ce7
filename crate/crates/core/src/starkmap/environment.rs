use faer::Mat;

use crate::error::{Error, Result};
use crate::starkmap::multipole::MultipoleOperator;

/// Orientation of the molecule on the rf-null axis relative to the second
/// ion of the crystal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum AxialOrientation {
    /// Atom between the two ions (θ* = 0): the bonded ion sits on the −z side
    /// of the atom and the second ion at d12 − r on the +z side.
    Inner,
    /// Atom outside the crystal (θ* = π): both ions on the +z side, the
    /// second at r + d12.
    Outer,
}

/// Second ion and axial trap seen by a molecule on the rf-null axis.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Environment {
    /// Ion-ion spacing (Bohr).
    pub d12: f64,
    /// Ion mass (electron masses).
    pub m_ion: f64,
    /// Axial ion trap frequency (atomic units).
    pub omega_ion: f64,
    pub orientation: AxialOrientation,
}

impl Environment {
    pub fn terms(&self, op: &MultipoleOperator, r: f64) -> Result<Mat<f64>> {
        environment_terms(op, r, self.d12, self.m_ion, self.omega_ion, self.orientation)
    }
}

/// Correction to H_TI from the second ion and the static axial trap
/// potential, in the frame where the bonded ion is at +z for `Outer`.
///
/// `r` and `d12` in Bohr, `m_ion` in electron masses, `omega_ion` in atomic
/// units. The axial potential acts on core and electron together, which
/// leaves (m ω²/2)((d12 ± 2r) z_e − z_e²).
pub fn environment_terms(
    op: &MultipoleOperator,
    r: f64,
    d12: f64,
    m_ion: f64,
    omega_ion: f64,
    orientation: AxialOrientation,
) -> Result<Mat<f64>> {
    if !(r > 0.0) {
        return Err(Error::domain("core-ion distance must be positive"));
    }
    let (second, lever) = match orientation {
        AxialOrientation::Outer => (r + d12, d12 + 2.0 * r),
        AxialOrientation::Inner => {
            if d12 <= r {
                return Err(Error::domain(format!("ion spacing {d12} must exceed r_ci {r} for the inner orientation")));
            }
            (d12 - r, d12 - 2.0 * r)
        }
    };
    let n = op.dim();
    let mut h = Mat::<f64>::zeros(n, n);
    for (k, m) in op.terms.iter().enumerate() {
        let l = k as i32 + 1;
        let mut c = -second.powi(-(l + 1));
        if orientation == AxialOrientation::Inner && l % 2 == 1 {
            // flip the odd multipoles of the bonded ion: it sits at −z
            c += 2.0 * r.powi(-(l + 1));
        }
        h += faer::Scale(c) * m;
    }
    let spring = 0.5 * m_ion * omega_ion * omega_ion;
    if spring != 0.0 {
        let m1 = &op.terms[0];
        let m2 = op.terms.get(1).ok_or_else(|| Error::config("environment terms need l' ≥ 2"))?;
        let r2 = op.second_moment();
        h += faer::Scale(spring * lever) * m1;
        h += faer::Scale(-spring / 3.0) * r2;
        h += faer::Scale(-spring * 2.0 / 3.0) * m2;
    }
    Ok(h)
}
