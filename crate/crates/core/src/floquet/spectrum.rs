use faer::{c64, Mat, MatRef};

use crate::error::{Error, Result};
use crate::floquet::propagator::{symmetry_defect, unitarity_defect};
use crate::linalg::eigh;

/// Largest tolerated ‖F†F − I‖ before the spectrum is rejected.
pub const UNITARITY_TOLERANCE: f64 = 1e-8;

/// Overlap below which the RAIM identification is flagged as ambiguous.
pub const AMBIGUOUS_OVERLAP: f64 = 0.25;

/// Quasienergies (Hartree, first Floquet zone) and Floquet modes (columns).
#[derive(Debug, Clone)]
pub struct QuasiSpectrum {
    pub quasienergies: Vec<f64>,
    pub modes: Mat<c64>,
}

/// Fold an energy into the zone (−Ω/2, Ω/2].
pub fn fold_quasienergy(e: f64, omega: f64) -> f64 {
    let mut x = e - omega * (e / omega).round();
    if x <= -0.5 * omega {
        x += omega;
    } else if x > 0.5 * omega {
        x -= omega;
    }
    x
}

/// Distance between two quasienergies on the circle of circumference Ω.
pub fn folded_distance(a: f64, b: f64, omega: f64) -> f64 {
    fold_quasienergy(a - b, omega).abs()
}

fn phase_to_quasienergy(lambda: c64, period: f64) -> f64 {
    let omega = 2.0 * std::f64::consts::PI / period;
    fold_quasienergy(-lambda.arg() / period, omega)
}

/// Diagonalize a complex-symmetric unitary F = A + iB through its real parts.
///
/// F†F = I with F = Fᵀ forces A and B to be commuting real symmetric
/// matrices, so one real eigenbasis diagonalizes both. A generic combination
/// A + sB finds it; the result is accepted only if every column is an
/// eigenvector of F.
fn symmetric_unitary_eigen(f: MatRef<'_, c64>) -> Option<(Vec<c64>, Mat<f64>)> {
    let n = f.nrows();
    let a = Mat::<f64>::from_fn(n, n, |i, j| 0.5 * (f[(i, j)].re + f[(j, i)].re));
    let b = Mat::<f64>::from_fn(n, n, |i, j| 0.5 * (f[(i, j)].im + f[(j, i)].im));
    for s in [0.618_033_988_749_895, 0.381_966_011_250_105, 1.324_717_957_244_746] {
        let m = &a + faer::Scale(s) * &b;
        let Ok((_, q)) = eigh(m.as_ref()) else { continue };
        let aq = &a * &q;
        let bq = &b * &q;
        let mut lambdas = Vec::with_capacity(n);
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let mut re = 0.0;
            let mut im = 0.0;
            for i in 0..n {
                re += q[(i, k)] * aq[(i, k)];
                im += q[(i, k)] * bq[(i, k)];
            }
            for i in 0..n {
                let r = c64::new(aq[(i, k)] - re * q[(i, k)], bq[(i, k)] - im * q[(i, k)]);
                worst = worst.max(r.norm());
            }
            lambdas.push(c64::new(re, im));
        }
        if worst < 1e-9 {
            return Some((lambdas, q));
        }
    }
    None
}

/// Eigenvectors of a general unitary matrix, re-orthonormalized within
/// clusters of (near-)degenerate eigenvalues.
fn general_unitary_eigen(f: MatRef<'_, c64>) -> Result<(Vec<c64>, Mat<c64>)> {
    let n = f.nrows();
    let e = f
        .eigen()
        .map_err(|e| Error::Numerical(format!("complex eigensolver: {e:?}")))?;
    let lambdas: Vec<c64> = (0..n).map(|i| e.S()[i]).collect();
    let mut u = e.U().to_owned();
    for k in 0..n {
        for p in 0..k {
            if (lambdas[p] - lambdas[k]).norm() < 1e-7 {
                let mut dot = c64::new(0.0, 0.0);
                for i in 0..n {
                    dot += u[(i, p)].conj() * u[(i, k)];
                }
                for i in 0..n {
                    let up = u[(i, p)];
                    u[(i, k)] -= dot * up;
                }
            }
        }
        let norm = (0..n).map(|i| u[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            u[(i, k)] /= norm;
        }
    }
    Ok((lambdas, u))
}

/// Quasienergies ε = −arg(λ)/T and Floquet modes of a one-period propagator,
/// sorted by quasienergy.
pub fn quasienergy_spectrum(f: MatRef<'_, c64>, period: f64) -> Result<QuasiSpectrum> {
    let n = f.nrows();
    let defect = unitarity_defect(f);
    if !(defect < UNITARITY_TOLERANCE) {
        return Err(Error::Accuracy {
            what: "Floquet propagator is not unitary; refine the Trotter steps".into(),
            estimate: defect,
        });
    }
    let (lambdas, modes) = match (symmetry_defect(f) < 1e-10)
        .then(|| symmetric_unitary_eigen(f))
        .flatten()
    {
        Some((l, q)) => (l, Mat::from_fn(n, n, |i, j| c64::new(q[(i, j)], 0.0))),
        None => general_unitary_eigen(f)?,
    };
    let mut order: Vec<usize> = (0..n).collect();
    let eps: Vec<f64> = lambdas.iter().map(|&l| phase_to_quasienergy(l, period)).collect();
    order.sort_by(|&i, &j| eps[i].total_cmp(&eps[j]));
    Ok(QuasiSpectrum {
        quasienergies: order.iter().map(|&i| eps[i]).collect(),
        modes: Mat::from_fn(n, n, |i, j| modes[(i, order[j])]),
    })
}

/// Which Floquet mode carries the RAIM state, and how cleanly.
#[derive(Debug, Clone, PartialEq)]
pub struct RaimIdentification {
    pub index: usize,
    /// |⟨ψ_RAIM|φ⟩|² of the winner.
    pub overlap: f64,
    /// ⟨φ|H_TI|φ⟩ of the winner.
    pub e_flo: f64,
    /// Mode with the second-largest overlap, the crossing partner.
    pub partner: Option<usize>,
    pub partner_overlap: f64,
    /// Winner's overlap is below [`AMBIGUOUS_OVERLAP`].
    pub ambiguous: bool,
}

/// ⟨φ|H|φ⟩ for a real symmetric H.
pub fn expectation(h: MatRef<'_, f64>, phi: &[c64]) -> f64 {
    let n = phi.len();
    let mut acc = 0.0;
    for j in 0..n {
        let mut col = c64::new(0.0, 0.0);
        for i in 0..n {
            col += phi[i].conj() * h[(i, j)];
        }
        acc += (col * phi[j]).re;
    }
    acc
}

/// Pick the Floquet mode with maximal overlap with ψ_RAIM.
pub fn identify_raim_state(modes: MatRef<'_, c64>, psi: &[c64], h: MatRef<'_, f64>) -> RaimIdentification {
    let n = modes.nrows();
    let overlaps: Vec<f64> = (0..modes.ncols())
        .map(|k| {
            let mut s = c64::new(0.0, 0.0);
            for i in 0..n {
                s += psi[i].conj() * modes[(i, k)];
            }
            s.norm_sqr()
        })
        .collect();
    let mut order: Vec<usize> = (0..overlaps.len()).collect();
    order.sort_by(|&a, &b| overlaps[b].total_cmp(&overlaps[a]));
    let index = order[0];
    let phi: Vec<c64> = (0..n).map(|i| modes[(i, index)]).collect();
    let partner = order.get(1).copied();
    RaimIdentification {
        index,
        overlap: overlaps[index],
        e_flo: expectation(h, &phi),
        partner,
        partner_overlap: partner.map_or(0.0, |p| overlaps[p]),
        ambiguous: overlaps[index] < AMBIGUOUS_OVERLAP,
    }
}
