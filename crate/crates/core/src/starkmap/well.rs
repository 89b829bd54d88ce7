use crate::atomcore::level::RydbergLevel;
use crate::error::{Error, Result};
use crate::starkmap::multipole::MultipoleOperator;
use crate::starkmap::environment::Environment;
use crate::starkmap::scan::{diagonalize_scan_in, PotentialCurveSet};

/// Half-width of the harmonic fit window as a fraction of d.
pub const DEFAULT_FIT_WINDOW: f64 = 0.005;

/// A molecular potential well on one adiabatic curve (atomic units).
#[derive(Debug, Clone, serde::Serialize)]
pub struct WellDescriptor {
    pub label: String,
    /// Location of the minimum (Bohr).
    pub d: f64,
    /// Curve energy at the minimum, relative to the scan reference (Hartree).
    pub e_min: f64,
    /// Lower of the two barrier tops minus the minimum (Hartree).
    pub depth: f64,
    /// Harmonic angular frequency (atomic units, ħω in Hartree).
    pub omega: f64,
    /// Reduced mass (electron masses).
    pub mu: f64,
    /// Vibrational energies above the minimum (Hartree).
    pub vibrational: Vec<f64>,
    /// False when fewer bound levels exist than were requested.
    pub vibrational_complete: bool,
}

/// Least-squares quadratic y ≈ a x² + b x + c about x0, returning (a, b, c)
/// in the shifted variable x − x0.
pub fn fit_quadratic(x: &[f64], y: &[f64], x0: f64) -> Result<[f64; 3]> {
    if x.len() < 3 {
        return Err(Error::domain("quadratic fit needs at least 3 points"));
    }
    // normal equations in scaled coordinates for conditioning
    let s = x.iter().map(|v| (v - x0).abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut m = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for (&xi, &yi) in x.iter().zip(y) {
        let t = (xi - x0) / s;
        let p = [t * t, t, 1.0];
        for i in 0..3 {
            rhs[i] += p[i] * yi;
            for j in 0..3 {
                m[i][j] += p[i] * p[j];
            }
        }
    }
    let sol = solve3(m, rhs).ok_or_else(|| Error::Numerical("singular quadratic fit".into()))?;
    Ok([sol[0] / (s * s), sol[1] / s, sol[2]])
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for c in 0..3 {
        let p = (c..3).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap())?;
        if a[p][c] == 0.0 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..3 {
            let f = a[r][c] / a[c][c];
            for k in c..3 {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Index of the outermost strict interior local minimum.
pub fn outermost_minimum(e: &[f64]) -> Option<usize> {
    (1..e.len().saturating_sub(1)).rev().find(|&k| e[k] < e[k - 1] && e[k] <= e[k + 1])
}

/// Barrier tops reached by walking uphill from `k` in both directions.
fn barrier_tops(e: &[f64], k: usize) -> (usize, usize) {
    let mut lo = k;
    while lo > 0 && e[lo - 1] >= e[lo] {
        lo -= 1;
    }
    let mut hi = k;
    while hi + 1 < e.len() && e[hi + 1] >= e[hi] {
        hi += 1;
    }
    (lo, hi)
}

/// Characterize the outermost well of a sampled curve.
///
/// The minimum is refined by a parabola through the discrete minimum and its
/// neighbours; ω comes from a least-squares quadratic over ±`window`·d.
pub fn find_well(r: &[f64], e: &[f64], label: &str, mu: f64, window: f64) -> Result<WellDescriptor> {
    if r.len() != e.len() || r.len() < 3 {
        return Err(Error::domain("curve needs at least 3 samples"));
    }
    let k = outermost_minimum(e).ok_or_else(|| Error::WellNotFound(label.to_string()))?;
    let (x0, x1, x2) = (r[k - 1], r[k], r[k + 1]);
    let (y0, y1, y2) = (e[k - 1], e[k], e[k + 1]);
    let den = (x0 - x1) * (x0 - x2) * (x1 - x2);
    let a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / den;
    let b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / den;
    let d = if a > 0.0 { (-b / (2.0 * a)).clamp(x0, x2) } else { x1 };

    let half = window * d;
    let (xs, ys): (Vec<f64>, Vec<f64>) = r
        .iter()
        .zip(e)
        .filter(|(x, _)| (**x - d).abs() <= half)
        .map(|(x, y)| (*x, *y))
        .unzip();
    let [qa, qb, qc] = fit_quadratic(&xs, &ys, d)?;
    if !(qa > 0.0) {
        return Err(Error::WellNotFound(format!("{label}: non-positive curvature at the minimum")));
    }
    let e_min = qc - qb * qb / (4.0 * qa);
    let (lo, hi) = barrier_tops(e, k);
    let depth = e[lo].min(e[hi]) - e_min;
    Ok(WellDescriptor {
        label: label.to_string(),
        d,
        e_min,
        depth,
        omega: (2.0 * qa / mu).sqrt(),
        mu,
        vibrational: Vec::new(),
        vibrational_complete: false,
    })
}

/// Natural cubic spline through (x, y).
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            let mut c = vec![0.0; n];
            let mut d = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                let a = h0;
                let b = 2.0 * (h0 + h1);
                let rhs = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
                let denom = b - a * c[i - 1];
                c[i] = h1 / denom;
                d[i] = (rhs - a * d[i - 1]) / denom;
            }
            for i in (1..n - 1).rev() {
                m[i] = d[i] - c[i] * m[i + 1];
            }
        }
        Self { x: x.to_vec(), y: y.to_vec(), m }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let i = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i] + b * self.y[i + 1] + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}

/// Number of eigenvalues of the symmetric tridiagonal (diag, off) below x.
fn sturm_count(diag: &[f64], off: f64, x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for (i, &d) in diag.iter().enumerate() {
        let o2 = if i == 0 { 0.0 } else { off * off };
        q = d - x - if i == 0 { 0.0 } else { o2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (d.abs() + off.abs()).max(1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest `count` levels of −(1/2μ) ψ'' + V ψ on the sampled window, by a
/// three-point finite-difference operator on `points` nodes with hard walls.
/// Energies are relative to `e_min`; only levels below the lower end of the
/// window are reported, with a flag when fewer than requested exist.
pub fn vibrational_states(
    r: &[f64],
    e: &[f64],
    mu: f64,
    e_min: f64,
    count: usize,
    points: usize,
) -> Result<(Vec<f64>, bool)> {
    if r.len() < 4 || points < 10 {
        return Err(Error::domain("too few samples for the vibrational problem"));
    }
    let spline = CubicSpline::new(r, e);
    let (a, b) = (r[0], r[r.len() - 1]);
    let h = (b - a) / (points + 1) as f64;
    let kin = 1.0 / (2.0 * mu * h * h);
    let diag: Vec<f64> = (1..=points).map(|i| spline.eval(a + i as f64 * h) - e_min + 2.0 * kin).collect();
    let off = -kin;
    let edge = e[0].min(e[e.len() - 1]) - e_min;
    let lo = diag.iter().copied().fold(f64::INFINITY, f64::min) - 4.0 * kin;
    let mut levels = Vec::new();
    for k in 0..count {
        let (mut x0, mut x1) = (lo, edge);
        if sturm_count(&diag, off, x1) <= k {
            break;
        }
        for _ in 0..200 {
            let mid = 0.5 * (x0 + x1);
            if sturm_count(&diag, off, mid) > k {
                x1 = mid;
            } else {
                x0 = mid;
            }
            if x1 - x0 <= 1e-15 * x1.abs().max(1e-30) {
                break;
            }
        }
        levels.push(0.5 * (x0 + x1));
    }
    let complete = levels.len() == count;
    Ok((levels, complete))
}

/// Options for the two-stage well search.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct WellSearch {
    /// Coarse grid bounds as multiples of 1.85 n^{5/2} a0.
    pub coarse_span: (f64, f64),
    pub coarse_points: usize,
    /// Fine grid half-width as a fraction of the coarse minimum.
    pub fine_half_width: f64,
    pub fine_points: usize,
    pub fit_window: f64,
    pub vibrational_count: usize,
    /// Samples spanning the whole well (between the barrier tops, at most
    /// ±10% of d) used for the vibrational problem.
    pub span_points: usize,
}

impl Default for WellSearch {
    fn default() -> Self {
        Self {
            coarse_span: (0.6, 1.3),
            coarse_points: 120,
            fine_half_width: 0.0075,
            fine_points: 201,
            fit_window: DEFAULT_FIT_WINDOW,
            vibrational_count: 5,
            span_points: 161,
        }
    }
}

/// A located well with the fine-scan samples it was fitted on.
#[derive(Debug, Clone)]
pub struct LocatedWell {
    pub well: WellDescriptor,
    /// Energy rank of the adiabatic curve carrying the well.
    pub rank: usize,
    pub r: Vec<f64>,
    pub e: Vec<f64>,
}

/// Follow the adiabatic curve that is `label` (e.g. `50P1/2`) at large
/// separation inward, locate its outermost minimum on a coarse grid, then
/// rescan finely around it and fit.
pub fn locate_well(
    op: &MultipoleOperator,
    e_ref: f64,
    level: &RydbergLevel,
    mu: f64,
    opts: &WellSearch,
    env: Option<&Environment>,
) -> Result<LocatedWell> {
    let n = level.n as f64;
    let scale = 1.85 * n.powf(2.5);
    let (s0, s1) = opts.coarse_span;
    let m = opts.coarse_points.max(8);
    let coarse: Vec<f64> = (0..m).map(|i| scale * (s0 + (s1 - s0) * i as f64 / (m - 1) as f64)).collect();
    let set = diagonalize_scan_in(op, &coarse, e_ref, false, env)?;
    let label = level.label();
    let rank = set.index_by_label(&label)?;
    let curve = set.adiabatic_curve(rank);
    let k = outermost_minimum(&curve).ok_or_else(|| Error::WellNotFound(label.clone()))?;
    let centre = coarse[k];
    let hw = (opts.fine_half_width * centre).max(coarse[1] - coarse[0]);
    let f = opts.fine_points.max(8);
    let fine: Vec<f64> = (0..f).map(|i| centre - hw + 2.0 * hw * i as f64 / (f - 1) as f64).collect();
    let mut located = locate_on_grid(op, e_ref, &label, rank, &fine, mu, opts, env)?;

    // resample the full well for the vibrational problem
    let (lo, hi) = barrier_tops(&curve, k);
    let a = coarse[lo].max(0.9 * centre);
    let b = coarse[hi].min(1.1 * centre);
    let sp = opts.span_points.max(8);
    let span: Vec<f64> = (0..sp).map(|i| a + (b - a) * i as f64 / (sp - 1) as f64).collect();
    let span_set = diagonalize_scan_in(op, &span, e_ref, false, env)?;
    let span_e = span_set.adiabatic_curve(rank);
    let mut samples: Vec<(f64, f64)> = span.iter().copied().zip(span_e.iter().copied()).collect();
    samples.extend(located.r.iter().copied().zip(located.e.iter().copied()));
    samples.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    samples.dedup_by(|x, y| (x.0 - y.0).abs() < 1e-9 * centre);
    let (r_all, e_all): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
    let (levels, complete) =
        vibrational_states(&r_all, &e_all, mu, located.well.e_min, opts.vibrational_count, 4000)?;
    let kk = outermost_minimum(&e_all).unwrap_or(0);
    let (l2, h2) = barrier_tops(&e_all, kk);
    located.well.depth = e_all[l2].min(e_all[h2]) - located.well.e_min;
    located.well.vibrational = levels;
    located.well.vibrational_complete = complete;
    located.r = r_all;
    located.e = e_all;
    Ok(located)
}

/// Fit the well of adiabatic curve `rank` on an explicit grid.
#[allow(clippy::too_many_arguments)]
pub fn locate_on_grid(
    op: &MultipoleOperator,
    e_ref: f64,
    label: &str,
    rank: usize,
    grid: &[f64],
    mu: f64,
    opts: &WellSearch,
    env: Option<&Environment>,
) -> Result<LocatedWell> {
    let set: PotentialCurveSet = diagonalize_scan_in(op, grid, e_ref, false, env)?;
    let e = set.adiabatic_curve(rank);
    let mut well = find_well(grid, &e, label, mu, opts.fit_window)?;
    let (levels, complete) = vibrational_states(grid, &e, mu, well.e_min, opts.vibrational_count, 2000)?;
    well.vibrational = levels;
    well.vibrational_complete = complete;
    Ok(LocatedWell { well, rank, r: grid.to_vec(), e })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_parabola_fit() {
        let mu = 1000.0;
        let omega = 0.003;
        let x: Vec<f64> = (0..41).map(|i| 100.0 + 0.1 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.5 * mu * omega * omega * (v - 102.3).powi(2) - 7.0).collect();
        let w = find_well(&x, &y, "test", mu, 0.05).unwrap();
        assert!((w.omega / omega - 1.0).abs() < 1e-10);
        assert!((w.d - 102.3).abs() < 1e-9);
        assert!((w.e_min + 7.0).abs() < 1e-12);
    }

    #[test]
    fn harmonic_vibrational_spectrum() {
        let mu = 2000.0;
        let omega = 0.01;
        let x: Vec<f64> = (0..401).map(|i| -3.0 + 6.0 * i as f64 / 400.0).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.5 * mu * omega * omega * v * v).collect();
        let (lv, complete) = vibrational_states(&x, &y, mu, 0.0, 5, 4000).unwrap();
        assert!(complete);
        for (k, e) in lv.iter().enumerate() {
            let exact = omega * (k as f64 + 0.5);
            assert!((e / exact - 1.0).abs() < 1e-4, "{k}: {e} {exact}");
        }
    }

    #[test]
    fn shallow_well_reports_missing_levels() {
        let mu = 2000.0;
        let omega = 0.01;
        let x: Vec<f64> = (0..201).map(|i| -0.4 + 0.8 * i as f64 / 200.0).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.5 * mu * omega * omega * v * v).collect();
        // edge at 0.5·2000·1e-4·0.16 = 0.016: only two levels fit below it
        let (lv, complete) = vibrational_states(&x, &y, mu, 0.0, 5, 1000).unwrap();
        assert!(!complete);
        assert!(!lv.is_empty() && lv.len() < 5);
    }

    #[test]
    fn no_minimum_is_reported() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!(matches!(find_well(&x, &y, "x", 1.0, 0.1), Err(Error::WellNotFound(_))));
    }

    #[test]
    fn spline_reproduces_cubic_interior() {
        let x: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|v| v.sin()).collect();
        let s = CubicSpline::new(&x, &y);
        for i in 5..40 {
            let t = 0.1 * i as f64 + 0.037;
            assert!((s.eval(t) - t.sin()).abs() < 1e-5);
        }
    }

    proptest! {
        #[test]
        fn vibrational_levels_increase(omega in 0.002f64..0.02, shift in -1.0f64..1.0) {
            let mu = 1500.0;
            let x: Vec<f64> = (0..301).map(|i| -2.0 + 4.0 * i as f64 / 300.0).collect();
            let y: Vec<f64> = x.iter().map(|v| 0.5 * mu * omega * omega * (v - 0.1).powi(2) + 0.1 * v.powi(3) * omega + shift).collect();
            let (lv, _) = vibrational_states(&x, &y, mu, shift, 5, 1500).unwrap();
            prop_assert!(lv.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
