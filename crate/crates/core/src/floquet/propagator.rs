use faer::{c64, Mat, MatRef};

use crate::error::{Error, Result};
use crate::floquet::paul::TrapDrive;
use crate::linalg::eigh;
use crate::parallel;

/// exp(−i(H + aV)τ) for real symmetric H and V.
pub fn step_exponential(h: MatRef<'_, f64>, v: MatRef<'_, f64>, a: f64, tau: f64) -> Result<Mat<c64>> {
    let n = h.nrows();
    let g = if a == 0.0 { h.to_owned() } else { h + faer::Scale(a) * v };
    let (vals, q) = eigh(g.as_ref())?;
    let (sin, cos): (Vec<f64>, Vec<f64>) = vals.iter().map(|&x| (x * tau).sin_cos()).unzip();
    let qc = Mat::<f64>::from_fn(n, n, |i, j| q[(i, j)] * cos[j]);
    let qs = Mat::<f64>::from_fn(n, n, |i, j| q[(i, j)] * sin[j]);
    let re = &qc * q.transpose();
    let im = &qs * q.transpose();
    Ok(Mat::from_fn(n, n, |i, j| c64::new(re[(i, j)], -im[(i, j)])))
}

/// Collapse consecutive equal amplitudes into (amplitude, repeat) runs.
pub fn runs(amplitudes: &[f64]) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &a in amplitudes {
        match out.last_mut() {
            Some((b, k)) if *b == a => *k += 1,
            _ => out.push((a, 1)),
        }
    }
    out
}

/// U_last ⋯ U_first for piecewise-constant generators, each run
/// exponentiated once over its full duration.
fn ordered_product(h: MatRef<'_, f64>, v: MatRef<'_, f64>, runs: &[(f64, usize)], dt: f64) -> Result<Mat<c64>> {
    let n = h.nrows();
    let mut acc = Mat::<c64>::identity(n, n);
    let chunk = (2 * parallel::workers()).max(8);
    for block in runs.chunks(chunk) {
        let exps = parallel::map(block, |&(a, k)| step_exponential(h, v, a, dt * k as f64));
        for u in exps {
            acc = u? * &acc;
        }
    }
    Ok(acc)
}

fn check_inputs(h: MatRef<'_, f64>, v: MatRef<'_, f64>) -> Result<()> {
    if h.nrows() != h.ncols() || v.nrows() != h.nrows() || v.ncols() != h.ncols() {
        return Err(Error::config("H_TI and trap operator must be square and of equal size"));
    }
    Ok(())
}

/// One-period Trotter propagator F₀ = Π_k exp(−i(H + c·w(t_k)·V)Δt).
///
/// For step counts divisible by 4 the midpoint amplitudes obey
/// a_{N−1−k} = a_k and a_{N/2−1−k} = −a_k. Every step factor is complex
/// symmetric, so with Q± the products over the first quarter at ±a the
/// half-period product is P = Q₋ᵀQ₊ and F₀ = PᵀP. This halves the work and
/// makes F₀ exactly complex symmetric.
pub fn floquet_propagator(h: MatRef<'_, f64>, v: MatRef<'_, f64>, drive: &TrapDrive) -> Result<Mat<c64>> {
    check_inputs(h, v)?;
    let amps = drive.amplitudes();
    let dt = drive.time_step();
    let n = drive.steps;
    if n % 4 != 0 {
        return ordered_product(h, v, &runs(&amps), dt);
    }
    let quarter = &amps[..n / 4];
    let minus: Vec<f64> = quarter.iter().map(|a| -a).collect();
    let qp = ordered_product(h, v, &runs(quarter), dt)?;
    let qm = ordered_product(h, v, &runs(&minus), dt)?;
    let half = qm.transpose() * &qp;
    Ok(half.transpose() * &half)
}

/// Reference implementation: a separate exponential for every step.
pub fn floquet_propagator_direct(h: MatRef<'_, f64>, v: MatRef<'_, f64>, drive: &TrapDrive) -> Result<Mat<c64>> {
    check_inputs(h, v)?;
    let steps: Vec<(f64, usize)> = drive.amplitudes().into_iter().map(|a| (a, 1)).collect();
    ordered_product(h, v, &steps, drive.time_step())
}

/// Largest absolute entry of F†F − I.
pub fn unitarity_defect(f: MatRef<'_, c64>) -> f64 {
    let g = f.adjoint() * f;
    let mut m: f64 = 0.0;
    for j in 0..g.ncols() {
        for i in 0..g.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            m = m.max((g[(i, j)] - c64::new(target, 0.0)).norm());
        }
    }
    m
}

/// Largest absolute entry of F − Fᵀ.
pub fn symmetry_defect(f: MatRef<'_, c64>) -> f64 {
    let mut m: f64 = 0.0;
    for j in 0..f.ncols() {
        for i in 0..j {
            m = m.max((f[(i, j)] - f[(j, i)]).norm());
        }
    }
    m
}

/// Largest absolute entrywise difference.
pub fn max_difference(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> f64 {
    let mut m: f64 = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::paul::{TrapOrientation, Waveform};

    fn model(n: usize) -> (Mat<f64>, Mat<f64>) {
        let h = Mat::<f64>::from_fn(n, n, |i, j| if i == j { 0.3 * (i as f64 - 2.3) } else { 0.0 });
        let v = Mat::<f64>::from_fn(n, n, |i, j| 1.0 / (1.0 + (i + j) as f64) + if i == j { 0.1 * i as f64 } else { 0.0 });
        (h, v)
    }

    fn drive(q: f64, waveform: Waveform, steps: usize) -> TrapDrive {
        // Ω = 0.5 and m = 16 make the prefactor c equal to q.
        TrapDrive { q, omega: 0.5, waveform, orientation: TrapOrientation::Radial, m_ion: 16.0, steps }
    }

    #[test]
    fn run_compression() {
        assert_eq!(runs(&[1.0, 1.0, -1.0, -1.0, -1.0, 1.0]), vec![(1.0, 2), (-1.0, 3), (1.0, 1)]);
        assert!(runs(&[]).is_empty());
    }

    #[test]
    fn static_limit_is_plain_exponential() {
        let (h, v) = model(6);
        let d = drive(0.0, Waveform::Sinusoidal, 64);
        let f = floquet_propagator(h.as_ref(), v.as_ref(), &d).unwrap();
        let t = d.period();
        for i in 0..6 {
            let phase = -h[(i, i)] * t;
            assert!((f[(i, i)] - c64::new(phase.cos(), phase.sin())).norm() < 1e-12);
        }
        assert!(unitarity_defect(f.as_ref()) < 1e-12);
    }

    #[test]
    fn symmetric_fast_path_matches_direct_product() {
        let (h, v) = model(7);
        for waveform in [Waveform::Sinusoidal, Waveform::Digital] {
            let d = drive(0.3, waveform, 48);
            let fast = floquet_propagator(h.as_ref(), v.as_ref(), &d).unwrap();
            let slow = floquet_propagator_direct(h.as_ref(), v.as_ref(), &d).unwrap();
            assert!(max_difference(fast.as_ref(), slow.as_ref()) < 1e-12, "{waveform:?}");
            assert!(symmetry_defect(fast.as_ref()) < 1e-13);
            assert!(unitarity_defect(fast.as_ref()) < 1e-12);
        }
    }

    #[test]
    fn odd_step_counts_use_the_plain_product() {
        let (h, v) = model(5);
        let d = drive(0.3, Waveform::Sinusoidal, 30);
        let a = floquet_propagator(h.as_ref(), v.as_ref(), &d).unwrap();
        let b = floquet_propagator_direct(h.as_ref(), v.as_ref(), &d).unwrap();
        assert!(max_difference(a.as_ref(), b.as_ref()) < 1e-13);
    }

    #[test]
    fn digital_drive_uses_two_cached_generators() {
        let (h, v) = model(6);
        let d = drive(0.2, Waveform::Digital, 40);
        let r = runs(&d.amplitudes());
        assert_eq!(r.len(), 3);
        let c = d.strength();
        let dt = d.time_step();
        let plus = step_exponential(h.as_ref(), v.as_ref(), c, dt).unwrap();
        let minus = step_exponential(h.as_ref(), v.as_ref(), -c, dt).unwrap();
        let mut f = Mat::<c64>::identity(6, 6);
        for a in d.amplitudes() {
            let u = if a > 0.0 { &plus } else { &minus };
            f = u * &f;
        }
        let cached = floquet_propagator(h.as_ref(), v.as_ref(), &d).unwrap();
        assert!(max_difference(f.as_ref(), cached.as_ref()) < 1e-12);
    }

    #[test]
    fn rejects_mismatched_shapes() {
        let (h, _) = model(4);
        let (_, v) = model(5);
        assert!(floquet_propagator(h.as_ref(), v.as_ref(), &drive(0.1, Waveform::Sinusoidal, 8)).is_err());
    }
}
