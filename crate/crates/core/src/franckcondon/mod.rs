//! Overlaps ⟨o_a,N|e^{ikζ_l}|o_b,N′⟩ between phonon Fock states of two
//! electronic configurations, by tensor Gauss-Hermite quadrature.

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::eigh;
use crate::modes::{normal_modes, Configuration, ModeSpectrum, SystemGeometry};
use crate::parallel;
use crate::quadrature::gauss_hermite;
use crate::units::{AMU_ME, BOHR_NM, TIME_S};

/// ħ in amu·μm²/μs.
pub fn hbar_lab() -> f64 {
    (BOHR_NM * 1e-3).powi(2) / (AMU_ME * TIME_S * 1e6)
}

/// Default effective wavenumber 2π/297 nm, in μm⁻¹.
pub fn default_wavenumber() -> f64 {
    2.0 * std::f64::consts::PI / 0.297
}

/// Occupations (n₁..n₄) of the modes in descending-frequency order.
pub type FockLabel = [u32; 4];

/// Fock-space truncation: the two lowest (bus) modes share at most
/// `bus_total` quanta, the two highest hold at most `high_max` each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockCutoff {
    pub bus_total: u32,
    pub high_max: u32,
}

impl Default for FockCutoff {
    fn default() -> Self {
        Self { bus_total: 3, high_max: 1 }
    }
}

impl FockCutoff {
    /// All retained labels, ordered by total quanta then lexicographically.
    pub fn states(&self) -> Vec<FockLabel> {
        let mut out = Vec::new();
        for n1 in 0..=self.high_max {
            for n2 in 0..=self.high_max {
                for n3 in 0..=self.bus_total {
                    for n4 in 0..=self.bus_total - n3 {
                        out.push([n1, n2, n3, n4]);
                    }
                }
            }
        }
        out.sort_by_key(|n| (n.iter().sum::<u32>(), *n));
        out
    }

    pub fn contains(&self, n: &FockLabel) -> bool {
        n[0] <= self.high_max && n[1] <= self.high_max && n[2] + n[3] <= self.bus_total
    }
}

/// Orthonormal Hermite functions without the Gaussian factor,
/// h_n(x) = H_n(x)/√(2ⁿ n! √π), for n = 0..=nmax.
pub fn hermite_functions(nmax: usize, x: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(nmax + 1);
    h.push(std::f64::consts::PI.powf(-0.25));
    if nmax >= 1 {
        h.push(std::f64::consts::SQRT_2 * x * h[0]);
    }
    for n in 1..nmax {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * h[n] - (nf / (nf + 1.0)).sqrt() * h[n - 1];
        h.push(next);
    }
    h
}

/// Mode-coordinate map of one configuration: q = W (r′ − r′_eq) gives each
/// mode coordinate in its natural unit √(ħ/ω_k).
struct ModeFrame {
    w: [[f64; 4]; 4],
    centre: [f64; 4],
    /// Π_k σ_k.
    volume: f64,
}

fn mass_sqrt(g: &SystemGeometry) -> [f64; 4] {
    let (i, a) = (g.m_ion.sqrt(), g.m_atom.sqrt());
    [i, i, a, a]
}

impl ModeFrame {
    fn new(g: &SystemGeometry, s: &ModeSpectrum) -> Self {
        let hbar = hbar_lab();
        let mut w = [[0.0; 4]; 4];
        let mut volume = 1.0;
        for k in 0..4 {
            let omega = 2.0 * std::f64::consts::PI * s.frequencies[k];
            let sigma = (hbar / omega).sqrt();
            volume *= sigma;
            for j in 0..4 {
                w[k][j] = s.vectors[k][j] / sigma;
            }
        }
        let m = mass_sqrt(g);
        let centre = std::array::from_fn(|j| m[j] * s.equilibrium[j]);
        Self { w, centre, volume }
    }

    fn coords(&self, r: &[f64; 4]) -> [f64; 4] {
        std::array::from_fn(|k| (0..4).map(|j| self.w[k][j] * (r[j] - self.centre[j])).sum())
    }

    /// Wᵀ W.
    fn metric(&self) -> [[f64; 4]; 4] {
        std::array::from_fn(|i| std::array::from_fn(|j| (0..4).map(|k| self.w[k][i] * self.w[k][j]).sum()))
    }
}

/// ψ_N at mass-weighted displacement r″ (√amu·μm) about the configuration's
/// equilibrium, normalized over r″.
pub fn mode_wavefunction(g: &SystemGeometry, s: &ModeSpectrum, n: &FockLabel, displacement: &[f64; 4]) -> f64 {
    let f = ModeFrame::new(g, s);
    let r: [f64; 4] = std::array::from_fn(|j| f.centre[j] + displacement[j]);
    let q = f.coords(&r);
    let mut v = f.volume.powf(-0.5);
    for k in 0..4 {
        v *= hermite_functions(n[k] as usize, q[k])[n[k] as usize] * (-0.5 * q[k] * q[k]).exp();
    }
    v
}

/// Quadrature settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOptions {
    /// Gauss-Hermite nodes per axis.
    pub order: usize,
    /// Nodes whose product weight is below this fraction of the largest are
    /// skipped.
    pub prune: f64,
    /// Recompute with `order + 8` and fail if any entry moves by more than
    /// `tolerance`.
    pub verify: bool,
    pub tolerance: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { order: 40, prune: 1e-30, verify: true, tolerance: 1e-6 }
    }
}

/// Overlaps between two configurations on a shared label set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapTable {
    pub source: Configuration,
    pub target: Configuration,
    /// Kicked atom (0 or 1).
    pub atom: usize,
    /// Wavenumber in μm⁻¹.
    pub k: f64,
    pub states: Vec<FockLabel>,
    /// `values[i][j]` = ⟨source, states[i]| e^{ikζ} |target, states[j]⟩.
    pub values: Vec<Vec<c64>>,
    pub order: usize,
}

impl OverlapTable {
    pub fn index(&self, n: &FockLabel) -> Option<usize> {
        self.states.iter().position(|s| s == n)
    }

    pub fn get(&self, n: &FockLabel, m: &FockLabel) -> Option<c64> {
        Some(self.values[self.index(n)?][self.index(m)?])
    }

    /// Largest |S| entry.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn max_quanta(states: &[FockLabel]) -> usize {
    states.iter().flat_map(|s| s.iter()).copied().max().unwrap_or(0) as usize
}

fn products(q: &[f64; 4], states: &[FockLabel], nmax: usize) -> Vec<f64> {
    let h: Vec<Vec<f64>> = q.iter().map(|&x| hermite_functions(nmax, x)).collect();
    states
        .iter()
        .map(|n| (0..4).map(|k| h[k][n[k] as usize]).product())
        .collect()
}

/// One table by quadrature of the given order.
#[allow(clippy::too_many_arguments)]
fn table_at_order(
    g: &SystemGeometry,
    a: &ModeSpectrum,
    b: &ModeSpectrum,
    states: &[FockLabel],
    atom: usize,
    k: f64,
    order: usize,
    prune: f64,
) -> Result<Vec<Vec<c64>>> {
    let (fa, fb) = (ModeFrame::new(g, a), ModeFrame::new(g, b));
    let (ga, gb) = (fa.metric(), fb.metric());
    let m = Mat::from_fn(4, 4, |i, j| 0.5 * (ga[i][j] + gb[i][j]));
    // centre of the combined Gaussian: M c = (G_a c_a + G_b c_b)/2
    let rhs: [f64; 4] = std::array::from_fn(|i| {
        (0..4).map(|j| 0.5 * (ga[i][j] * fa.centre[j] + gb[i][j] * fb.centre[j])).sum()
    });
    let (lam, u) = eigh(m.as_ref())?;
    if lam.iter().any(|l| !(*l > 0.0)) {
        return Err(Error::Numerical("overlap metric is not positive definite".into()));
    }
    let centre: [f64; 4] = std::array::from_fn(|i| {
        (0..4).map(|k| u[(i, k)] * (0..4).map(|j| u[(j, k)] * rhs[j]).sum::<f64>() / lam[k]).sum()
    });
    // r = c + T y with T = U Λ^{-1/2}, so (r − c)ᵀ M (r − c) = |y|²
    let t: [[f64; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|k| u[(i, k)] / lam[k].sqrt()));
    let jac: f64 = lam.iter().map(|l| l.powf(-0.5)).product();
    let norm = jac / (fa.volume * fb.volume).sqrt();
    let kick = k / g.m_atom.sqrt();

    let (x, w) = gauss_hermite(order);
    let wmax = w.iter().cloned().fold(0.0, f64::max).powi(4);
    let nmax = max_quanta(states);
    let ns = states.len();
    let first: Vec<usize> = (0..order).collect();
    let partials = parallel::map(&first, |&i0| {
        let mut rows_a: Vec<f64> = Vec::new();
        let mut rows_c: Vec<f64> = Vec::new();
        let mut rows_s: Vec<f64> = Vec::new();
        for i1 in 0..order {
            for i2 in 0..order {
                for i3 in 0..order {
                    let wt = w[i0] * w[i1] * w[i2] * w[i3];
                    if wt < prune * wmax {
                        continue;
                    }
                    let y = [x[i0], x[i1], x[i2], x[i3]];
                    let r: [f64; 4] = std::array::from_fn(|i| centre[i] + (0..4).map(|k| t[i][k] * y[k]).sum::<f64>());
                    let (qa, qb) = (fa.coords(&r), fb.coords(&r));
                    let expo = y.iter().map(|v| v * v).sum::<f64>()
                        - 0.5 * qa.iter().chain(qb.iter()).map(|v| v * v).sum::<f64>();
                    let amp = wt * expo.exp();
                    let (s, c) = (kick * (r[2 + atom] - fa.centre[2 + atom])).sin_cos();
                    let pb = products(&qb, states, nmax);
                    rows_a.extend(pb);
                    let pa = products(&qa, states, nmax);
                    rows_c.extend(pa.iter().map(|v| v * amp * c));
                    rows_s.extend(pa.iter().map(|v| v * amp * s));
                }
            }
        }
        let rows = rows_a.len() / ns.max(1);
        let bm = Mat::from_fn(rows, ns, |i, j| rows_a[i * ns + j]);
        let cm = Mat::from_fn(rows, ns, |i, j| rows_c[i * ns + j]);
        let sm = Mat::from_fn(rows, ns, |i, j| rows_s[i * ns + j]);
        (cm.transpose() * &bm, sm.transpose() * &bm)
    });
    let mut re = Mat::<f64>::zeros(ns, ns);
    let mut im = Mat::<f64>::zeros(ns, ns);
    for (c, s) in partials {
        re += c;
        im += s;
    }
    Ok((0..ns).map(|i| (0..ns).map(|j| c64::new(norm * re[(i, j)], norm * im[(i, j)])).collect()).collect())
}

fn check_atom(atom: usize) -> Result<()> {
    if atom > 1 {
        return Err(Error::config(format!("atom index must be 0 or 1, got {atom}")));
    }
    Ok(())
}

/// Table of overlaps between `a` and `b` over `states`.
pub fn overlap_table(
    g: &SystemGeometry,
    a: &ModeSpectrum,
    b: &ModeSpectrum,
    states: &[FockLabel],
    atom: usize,
    k: f64,
    opts: &QuadratureOptions,
) -> Result<OverlapTable> {
    check_atom(atom)?;
    if states.is_empty() || opts.order < 2 {
        return Err(Error::config("overlap table needs states and quadrature order ≥ 2"));
    }
    let values = table_at_order(g, a, b, states, atom, k, opts.order, opts.prune)?;
    if opts.verify {
        let check = table_at_order(g, a, b, states, atom, k, opts.order + 8, opts.prune)?;
        let diff = values
            .iter()
            .flatten()
            .zip(check.iter().flatten())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        if diff > opts.tolerance {
            return Err(Error::Accuracy {
                what: format!("overlap quadrature {}→{}", a.configuration.label(), b.configuration.label()),
                estimate: diff,
            });
        }
    }
    Ok(OverlapTable {
        source: a.configuration,
        target: b.configuration,
        atom,
        k,
        states: states.to_vec(),
        values,
        order: opts.order,
    })
}

/// Single overlap ⟨a,N|e^{ikζ_atom}|b,N′⟩.
#[allow(clippy::too_many_arguments)]
pub fn overlap(
    g: &SystemGeometry,
    a: &ModeSpectrum,
    b: &ModeSpectrum,
    n: &FockLabel,
    m: &FockLabel,
    atom: usize,
    k: f64,
    opts: &QuadratureOptions,
) -> Result<c64> {
    let states = if n == m { vec![*n] } else { vec![*n, *m] };
    let t = overlap_table(g, a, b, &states, atom, k, opts)?;
    Ok(t.get(n, m).expect("both labels present"))
}

/// The four single-photon transitions: (lower, upper, atom that binds).
pub const TRANSITIONS: [(Configuration, Configuration, usize); 4] = [
    (Configuration::Gg, Configuration::Gr, 1),
    (Configuration::Gg, Configuration::Rg, 0),
    (Configuration::Gr, Configuration::Rr, 0),
    (Configuration::Rg, Configuration::Rr, 1),
];

/// Mode spectra of all four configurations, in [`Configuration::ALL`] order.
pub fn all_spectra(g: &SystemGeometry) -> Result<Vec<ModeSpectrum>> {
    Configuration::ALL.iter().map(|&c| normal_modes(g, c)).collect()
}

fn spectrum_of(spectra: &[ModeSpectrum], c: Configuration) -> Result<&ModeSpectrum> {
    spectra
        .iter()
        .find(|s| s.configuration == c)
        .ok_or_else(|| Error::config(format!("missing {} spectrum", c.label())))
}

/// Tables for gg↔gR, gg↔Rg, gR↔RR and Rg↔RR. gg↔RR is a two-photon
/// process and is not built.
pub fn build_overlap_tables(
    g: &SystemGeometry,
    spectra: &[ModeSpectrum],
    k: f64,
    cutoff: &FockCutoff,
    opts: &QuadratureOptions,
) -> Result<Vec<OverlapTable>> {
    let states = cutoff.states();
    TRANSITIONS
        .iter()
        .map(|&(lo, hi, atom)| overlap_table(g, spectrum_of(spectra, lo)?, spectrum_of(spectra, hi)?, &states, atom, k, opts))
        .collect()
}

/// For each mode of `s`, the index of its reflected partner in `mirror`
/// (the spectrum of `s.configuration.mirror()`).
pub fn mirror_permutation(s: &ModeSpectrum, mirror: &ModeSpectrum) -> Vec<usize> {
    s.vectors
        .iter()
        .map(|v| {
            let m = [-v[1], -v[0], -v[3], -v[2]];
            (0..4)
                .max_by(|&i, &j| {
                    let d = |k: usize| (0..4).map(|c| m[c] * mirror.vectors[k][c]).sum::<f64>().abs();
                    d(i).total_cmp(&d(j))
                })
                .expect("four modes")
        })
        .collect()
}

/// Apply a mode permutation to a Fock label.
pub fn permute_label(n: &FockLabel, perm: &[usize]) -> FockLabel {
    let mut out = [0; 4];
    for (k, &p) in perm.iter().enumerate() {
        out[p] = n[k];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn quick() -> QuadratureOptions {
        QuadratureOptions { order: 24, verify: false, ..Default::default() }
    }

    fn setup() -> (SystemGeometry, Vec<ModeSpectrum>) {
        let g = SystemGeometry::reference();
        let s = all_spectra(&g).unwrap();
        (g, s)
    }

    #[test]
    fn cutoff_enumeration() {
        let c = FockCutoff::default();
        let s = c.states();
        assert_eq!(s.len(), 40);
        assert_eq!(s[0], [0, 0, 0, 0]);
        assert!(s.iter().all(|n| c.contains(n)));
        assert!(!c.contains(&[2, 0, 0, 0]) && !c.contains(&[0, 0, 2, 2]));
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        let (x, w) = gauss_hermite(30);
        for m in 0..6 {
            for n in 0..6 {
                let s: f64 = x.iter().zip(&w).map(|(&xi, &wi)| {
                    let h = hermite_functions(6, xi);
                    wi * h[m] * h[n]
                }).sum();
                assert!((s - if m == n { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ground_wavefunction_peaks_at_equilibrium() {
        let (g, s) = setup();
        let z = [0.0; 4];
        let p0 = mode_wavefunction(&g, &s[0], &[0, 0, 0, 0], &z);
        assert!(p0 > 0.0);
        assert!(mode_wavefunction(&g, &s[0], &[0, 0, 0, 0], &[0.01, 0.0, 0.0, 0.0]) < p0);
        // odd along its own mode coordinate
        let v = s[0].vectors[2];
        let dir: [f64; 4] = std::array::from_fn(|j| 0.05 * v[j]);
        let neg: [f64; 4] = dir.map(|x| -x);
        let a = mode_wavefunction(&g, &s[0], &[0, 0, 1, 0], &dir);
        let b = mode_wavefunction(&g, &s[0], &[0, 0, 1, 0], &neg);
        assert!(a != 0.0 && (a + b).abs() < 1e-12 * a.abs());
    }

    #[test]
    fn same_configuration_without_kick_is_identity() {
        let (g, s) = setup();
        let states = FockCutoff::default().states();
        for spec in &s {
            let t = overlap_table(&g, spec, spec, &states, 0, 0.0, &quick()).unwrap();
            for (i, row) in t.values.iter().enumerate() {
                for (j, z) in row.iter().enumerate() {
                    let target = if i == j { 1.0 } else { 0.0 };
                    assert!((z - c64::new(target, 0.0)).norm() < 1e-8, "{:?} {i} {j} {z}", spec.configuration);
                }
            }
        }
    }

    #[test]
    fn ground_state_kick_matches_gaussian_form() {
        let (g, s) = setup();
        let k = default_wavenumber();
        let spec = &s[3];
        let var: f64 = (0..4)
            .map(|p| {
                let omega = 2.0 * std::f64::consts::PI * spec.frequencies[p];
                spec.vectors[p][2].powi(2) * hbar_lab() / omega / 2.0
            })
            .sum::<f64>()
            / g.m_atom;
        let z = overlap(&g, spec, spec, &[0; 4], &[0; 4], 0, k, &quick()).unwrap();
        assert!((z.re - (-0.5 * k * k * var).exp()).abs() < 1e-10, "{z}");
        assert!(z.im.abs() < 1e-12);
    }

    #[test]
    fn blockade_transition_is_allowed() {
        let (g, s) = setup();
        let z = overlap(&g, &s[0], &s[1], &[0; 4], &[0, 0, 1, 0], 1, default_wavenumber(), &quick()).unwrap();
        assert!(z.norm() > 1e-3, "{z}");
    }

    #[test]
    fn completeness_grows_with_cutoff() {
        // soft RAIM spring so the projected ground state is spread over few quanta
        let g = SystemGeometry { omega_m: 0.6, omega_tweezer: 0.5, ..SystemGeometry::reference() };
        let s = all_spectra(&g).unwrap();
        let opts = QuadratureOptions { order: 16, verify: false, ..Default::default() };
        let mut last = 0.0;
        for (bus, high) in [(1, 0), (2, 1), (4, 2)] {
            let states = FockCutoff { bus_total: bus, high_max: high }.states();
            let t = overlap_table(&g, &s[0], &s[1], &states, 1, 5.0, &opts).unwrap();
            let sum: f64 = t.values[0].iter().map(|z| z.norm_sqr()).sum();
            assert!(sum <= 1.0 + 1e-10 && sum > last, "{bus}/{high}: {sum}");
            last = sum;
        }
        assert!(last > 0.99, "{last}");
    }

    #[test]
    fn mirror_tables_agree_in_magnitude() {
        let (g, s) = setup();
        let opts = quick();
        let k = default_wavenumber();
        let states = FockCutoff { bus_total: 2, high_max: 1 }.states();
        let a = overlap_table(&g, &s[0], &s[1], &states, 1, k, &opts).unwrap();
        let b = overlap_table(&g, &s[0], &s[2], &states, 0, k, &opts).unwrap();
        let pg = mirror_permutation(&s[0], &s[0]);
        let pr = mirror_permutation(&s[1], &s[2]);
        for n in &states {
            for m in &states {
                let x = a.get(n, m).unwrap().norm();
                let y = b.get(&permute_label(n, &pg), &permute_label(m, &pr)).unwrap().norm();
                assert!((x - y).abs() < 1e-10, "{n:?} {m:?} {x} {y}");
            }
        }
        assert!(a.max_abs() <= 1.0 + 1e-10);
    }

    #[test]
    fn order_increase_is_stable() {
        let (g, s) = setup();
        let states = FockCutoff { bus_total: 2, high_max: 1 }.states();
        let k = default_wavenumber();
        let lo = overlap_table(&g, &s[1], &s[3], &states, 0, k, &quick()).unwrap();
        let hi = overlap_table(&g, &s[1], &s[3], &states, 0, k, &QuadratureOptions { order: 48, ..quick() }).unwrap();
        for (x, y) in lo.values.iter().flatten().zip(hi.values.iter().flatten()) {
            assert!((x - y).norm() < 1e-6);
        }
    }

    #[test]
    fn bad_atom_index() {
        let (g, s) = setup();
        assert!(overlap(&g, &s[0], &s[1], &[0; 4], &[0; 4], 2, 1.0, &quick()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        #[test]
        fn reversing_the_kick_conjugates(k in 0.0f64..30.0) {
            let (g, s) = setup();
            let n = [0, 0, 0, 0];
            let m = [0, 0, 1, 0];
            let opts = QuadratureOptions { order: 16, verify: false, ..Default::default() };
            let p = overlap(&g, &s[0], &s[1], &n, &m, 1, k, &opts).unwrap();
            let q = overlap(&g, &s[0], &s[1], &n, &m, 1, -k, &opts).unwrap();
            prop_assert!((p - q.conj()).norm() < 1e-10);
            prop_assert!(p.norm() <= 1.0 + 1e-10);
        }
    }
}
