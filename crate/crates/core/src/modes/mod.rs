//! Axial normal modes of a two-ion crystal with a tweezer-held atom at each
//! end, in each of the four electronic configurations.

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::eigh;
use crate::units::{amu_to_me, bohr_to_um, mhz_to_energy};

/// Electronic configuration: which of the two ion-atom pairs forms a RAIM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Configuration {
    Gg,
    Gr,
    Rg,
    Rr,
}

impl Configuration {
    pub const ALL: [Configuration; 4] = [Configuration::Gg, Configuration::Gr, Configuration::Rg, Configuration::Rr];

    /// Whether pair 1 and pair 2 are bound.
    pub fn rydberg(self) -> [bool; 2] {
        match self {
            Configuration::Gg => [false, false],
            Configuration::Gr => [false, true],
            Configuration::Rg => [true, false],
            Configuration::Rr => [true, true],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Configuration::Gg => "gg",
            Configuration::Gr => "gR",
            Configuration::Rg => "Rg",
            Configuration::Rr => "RR",
        }
    }

    /// The configuration seen through the reflection z → −z.
    pub fn mirror(self) -> Self {
        match self {
            Configuration::Gr => Configuration::Rg,
            Configuration::Rg => Configuration::Gr,
            c => c,
        }
    }
}

impl std::str::FromStr for Configuration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gg" => Ok(Configuration::Gg),
            "gr" => Ok(Configuration::Gr),
            "rg" => Ok(Configuration::Rg),
            "rr" => Ok(Configuration::Rr),
            _ => Err(Error::config(format!("unknown configuration `{s}` (expected gg, gR, Rg or RR)"))),
        }
    }
}

/// Crystal parameters in laboratory units: masses in amu, frequencies in MHz
/// (ω = 2π×f) and lengths in μm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemGeometry {
    pub m_ion: f64,
    pub m_atom: f64,
    pub omega_ion: f64,
    pub omega_tweezer: f64,
    pub omega_m: f64,
    pub d: f64,
}

impl SystemGeometry {
    /// ⁹Be⁺ ions at 1 MHz, ⁸⁷Rb atoms in 0.2 MHz tweezers, 50P1/2 RAIM.
    pub fn reference() -> Self {
        Self { m_ion: 9.012, m_atom: 86.909, omega_ion: 1.0, omega_tweezer: 0.2, omega_m: 36.0, d: 1.735 }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.m_ion, self.m_atom, self.omega_ion, self.omega_tweezer, self.omega_m, self.d];
        if all.iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(())
        } else {
            Err(Error::config("masses, frequencies and d must be positive"))
        }
    }

    /// β = m_i/(m_i + m_a).
    pub fn beta(&self) -> f64 {
        self.m_ion / (self.m_ion + self.m_atom)
    }

    /// Length unit ℓ = (e²/(4πε₀ m_i ω_i²))^{1/3} in μm.
    pub fn length_unit(&self) -> f64 {
        let w = mhz_to_energy(self.omega_ion);
        bohr_to_um((1.0 / (amu_to_me(self.m_ion) * w * w)).cbrt())
    }

    /// Two-ion spacing d₁₂ = (e²/(2πε₀ m_i ω_i²))^{1/3} in μm.
    pub fn ion_spacing(&self) -> f64 {
        2f64.cbrt() * self.length_unit()
    }

    fn scaled(&self) -> Scaled {
        let l = self.length_unit();
        let mu = self.m_ion * self.m_atom / (self.m_ion + self.m_atom);
        let half = 0.5 * 2f64.cbrt();
        let d = self.d / l;
        Scaled {
            mass: [1.0, 1.0, self.m_atom / self.m_ion, self.m_atom / self.m_ion],
            spring: mu / self.m_ion * (self.omega_m / self.omega_ion).powi(2),
            tweezer: self.m_atom / self.m_ion * (self.omega_tweezer / self.omega_ion).powi(2),
            d,
            centres: [-(half + d), half + d],
            length: l,
        }
    }
}

/// Dimensionless model: lengths in ℓ, masses in m_i, frequencies in ω_i.
struct Scaled {
    mass: [f64; 4],
    spring: f64,
    tweezer: f64,
    d: f64,
    centres: [f64; 2],
    length: f64,
}

/// Coordinate order (z₁, z₂, ζ₁, ζ₂).
type Coords = [f64; 4];

impl Scaled {
    fn potential(&self, c: Configuration, x: &Coords) -> Result<f64> {
        let sep = (x[0] - x[1]).abs();
        if sep == 0.0 {
            return Err(Error::domain("coincident ions"));
        }
        let mut v = 0.5 * (x[0] * x[0] + x[1] * x[1]) + 1.0 / sep;
        for (l, bound) in c.rydberg().into_iter().enumerate() {
            let (z, zeta) = (x[l], x[2 + l]);
            v += if bound {
                0.5 * self.spring * ((z - zeta).abs() - self.d).powi(2)
            } else {
                0.5 * self.tweezer * (zeta - self.centres[l]).powi(2)
            };
        }
        Ok(v)
    }

    fn gradient(&self, c: Configuration, x: &Coords) -> Coords {
        let dz = x[0] - x[1];
        let f = -dz.signum() / (dz * dz);
        let mut g = [x[0] + f, x[1] - f, 0.0, 0.0];
        for (l, bound) in c.rydberg().into_iter().enumerate() {
            let (z, zeta) = (x[l], x[2 + l]);
            if bound {
                let t = self.spring * ((z - zeta).abs() - self.d) * (z - zeta).signum();
                g[l] += t;
                g[2 + l] -= t;
            } else {
                g[2 + l] += self.tweezer * (zeta - self.centres[l]);
            }
        }
        g
    }

    /// ∂²V/∂r_j∂r_k (not mass-weighted).
    fn second_derivatives(&self, c: Configuration, x: &Coords) -> [[f64; 4]; 4] {
        let k = 2.0 / (x[0] - x[1]).abs().powi(3);
        let mut h = [[0.0; 4]; 4];
        h[0][0] = 1.0 + k;
        h[1][1] = 1.0 + k;
        h[0][1] = -k;
        h[1][0] = -k;
        for (l, bound) in c.rydberg().into_iter().enumerate() {
            let a = 2 + l;
            if bound {
                h[l][l] += self.spring;
                h[a][a] += self.spring;
                h[l][a] -= self.spring;
                h[a][l] -= self.spring;
            } else {
                h[a][a] += self.tweezer;
            }
        }
        h
    }

    fn guess(&self) -> Coords {
        let half = 0.5 * 2f64.cbrt();
        [-half, half, self.centres[0], self.centres[1]]
    }
}

fn solve4(a: [[f64; 4]; 4], b: Coords) -> Result<Coords> {
    let m = Mat::from_fn(4, 4, |i, j| a[i][j]);
    let (vals, vecs) = eigh(m.as_ref())?;
    if vals.iter().any(|v| !(v.abs() > 1e-300)) {
        return Err(Error::Numerical("singular Hessian in Newton step".into()));
    }
    let mut x = [0.0; 4];
    for (k, &lam) in vals.iter().enumerate() {
        let proj: f64 = (0..4).map(|i| vecs[(i, k)] * b[i]).sum::<f64>() / lam;
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += proj * vecs[(i, k)];
        }
    }
    Ok(x)
}

fn norm(v: &Coords) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Gradient tolerance of the equilibrium search (dimensionless units).
pub const EQUILIBRIUM_TOLERANCE: f64 = 1e-12;

fn equilibrium_scaled(s: &Scaled, c: Configuration) -> Result<Coords> {
    let mut x = s.guess();
    for _ in 0..100 {
        let g = s.gradient(c, &x);
        if norm(&g) < EQUILIBRIUM_TOLERANCE {
            // keep each atom on the outer side of its ion
            if x[2] >= x[0] || x[3] <= x[1] {
                return Err(Error::Unstable(format!("{} atom crossed its ion", c.label())));
            }
            return Ok(x);
        }
        let step = solve4(s.second_derivatives(c, &x), g)?;
        for i in 0..4 {
            x[i] -= step[i];
        }
    }
    Err(Error::Numerical(format!("{} equilibrium did not converge in 100 Newton steps", c.label())))
}

/// V_o in units of m_i ω_i² ℓ² at positions given in μm.
pub fn potential(g: &SystemGeometry, c: Configuration, positions_um: &[f64; 4]) -> Result<f64> {
    g.validate()?;
    let s = g.scaled();
    let x = positions_um.map(|p| p / s.length);
    s.potential(c, &x)
}

/// Equilibrium positions (z₁, z₂, ζ₁, ζ₂) in μm.
pub fn equilibrium(g: &SystemGeometry, c: Configuration) -> Result<[f64; 4]> {
    g.validate()?;
    let s = g.scaled();
    Ok(equilibrium_scaled(&s, c)?.map(|x| x * s.length))
}

/// Mass-weighted Hessian A_jk = ∂²V/∂r_j∂r_k/√(m_j m_k) at equilibrium, in
/// units of ω_i².
pub fn hessian(g: &SystemGeometry, c: Configuration) -> Result<Mat<f64>> {
    g.validate()?;
    let s = g.scaled();
    let x = equilibrium_scaled(&s, c)?;
    Ok(mass_weighted(&s, &s.second_derivatives(c, &x)))
}

fn mass_weighted(s: &Scaled, h: &[[f64; 4]; 4]) -> Mat<f64> {
    Mat::from_fn(4, 4, |j, k| h[j][k] / (s.mass[j] * s.mass[k]).sqrt())
}

/// Mass-weighted Hessian by central differences of the analytic gradient,
/// step `h` in units of ℓ.
pub fn hessian_fd(g: &SystemGeometry, c: Configuration, h: f64) -> Result<Mat<f64>> {
    g.validate()?;
    let s = g.scaled();
    let x = equilibrium_scaled(&s, c)?;
    let mut out = [[0.0; 4]; 4];
    for k in 0..4 {
        let (mut p, mut m) = (x, x);
        p[k] += h;
        m[k] -= h;
        let (gp, gm) = (s.gradient(c, &p), s.gradient(c, &m));
        for j in 0..4 {
            out[j][k] = (gp[j] - gm[j]) / (2.0 * h);
        }
    }
    Ok(mass_weighted(&s, &out))
}

/// Normal modes of one configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSpectrum {
    pub configuration: Configuration,
    /// Equilibrium (z₁, z₂, ζ₁, ζ₂) in μm.
    pub equilibrium: [f64; 4],
    /// Mode frequencies in MHz (ω = 2π×f), descending.
    pub frequencies: Vec<f64>,
    /// `vectors[p]` is mode p in mass-weighted coordinates.
    pub vectors: Vec<[f64; 4]>,
}

/// Relative tolerance for treating two Hessian eigenvalues as degenerate.
const DEGENERATE: f64 = 1e-9;

/// Replace each degenerate cluster by the Gram-Schmidt basis built from the
/// projections of the unit vectors, strongest projection first, so the
/// result does not depend on the eigensolver's arbitrary rotation.
fn canonical_cluster(vecs: &mut [[f64; 4]]) {
    let mut proj: Vec<(usize, [f64; 4])> = (0..4)
        .map(|i| {
            let mut p = [0.0; 4];
            for v in vecs.iter() {
                for k in 0..4 {
                    p[k] += v[i] * v[k];
                }
            }
            (i, p)
        })
        .collect();
    proj.sort_by(|a, b| norm(&b.1).total_cmp(&norm(&a.1)).then(a.0.cmp(&b.0)));
    let mut basis: Vec<[f64; 4]> = Vec::new();
    for (_, mut p) in proj {
        if basis.len() == vecs.len() {
            break;
        }
        for b in &basis {
            let dot: f64 = (0..4).map(|k| p[k] * b[k]).sum();
            for k in 0..4 {
                p[k] -= dot * b[k];
            }
        }
        let n = norm(&p);
        if n > 1e-6 {
            basis.push(p.map(|x| x / n));
        }
    }
    vecs.copy_from_slice(&basis);
}

/// Flip so the largest-magnitude component (first one on ties) is positive.
fn fix_sign(v: &mut [f64; 4]) {
    let big = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(x) = v.iter().find(|x| x.abs() > big * (1.0 - 1e-9)) {
        if *x < 0.0 {
            for c in v.iter_mut() {
                *c = -*c;
            }
        }
    }
}

/// Descending-frequency spectrum with orthonormal, sign-fixed eigenvectors.
pub fn normal_modes(g: &SystemGeometry, c: Configuration) -> Result<ModeSpectrum> {
    let a = hessian(g, c)?;
    let (vals, u) = eigh(a.as_ref())?;
    if let Some(v) = vals.iter().find(|v| **v <= 0.0) {
        return Err(Error::Unstable(format!("{} Hessian eigenvalue {v:.3e} is not positive", c.label())));
    }
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
    let lam: Vec<f64> = order.iter().map(|&k| vals[k]).collect();
    let mut vectors: Vec<[f64; 4]> = order.iter().map(|&k| [u[(0, k)], u[(1, k)], u[(2, k)], u[(3, k)]]).collect();
    let mut start = 0;
    while start < 4 {
        let mut end = start + 1;
        while end < 4 && (lam[start] - lam[end]).abs() <= DEGENERATE * lam[start] {
            end += 1;
        }
        if end - start > 1 {
            canonical_cluster(&mut vectors[start..end]);
        }
        start = end;
    }
    vectors.iter_mut().for_each(fix_sign);
    Ok(ModeSpectrum {
        configuration: c,
        equilibrium: equilibrium(g, c)?,
        frequencies: lam.iter().map(|l| g.omega_ion * l.sqrt()).collect(),
        vectors,
    })
}

/// Closed-form frequencies in MHz, descending. gg and RR are exact; the
/// single-RAIM forms are the ω_M ≫ ω_i limit.
pub fn analytic_frequencies(g: &SystemGeometry, c: Configuration) -> Vec<f64> {
    let (wi, wt, wm, beta) = (g.omega_ion, g.omega_tweezer, g.omega_m, g.beta());
    let mut f = match c {
        Configuration::Gg => vec![3f64.sqrt() * wi, wi, wt, wt],
        Configuration::Rr => {
            let mut v = Vec::with_capacity(4);
            for cc in [3.0, 1.0] {
                let root = (cc * cc * wi.powi(4) + 2.0 * cc * (1.0 - 2.0 * beta) * wi * wi * wm * wm + wm.powi(4)).sqrt();
                for s in [1.0, -1.0] {
                    v.push(((cc * wi * wi + wm * wm + s * root) / 2.0).sqrt());
                }
            }
            v
        }
        Configuration::Gr | Configuration::Rg => {
            let inner = (1.0 + beta * (beta - 1.0)).sqrt();
            vec![
                wm + (1.0 - beta) * wi * wi / wm,
                wi * (1.0 + beta + inner).sqrt(),
                wi * (1.0 + beta - inner).sqrt(),
                wt,
            ]
        }
    };
    f.sort_by(|a, b| b.total_cmp(a));
    f
}

/// RR frequencies in the ω_M ≫ ω_i limit: {ω_M, ω_M, √(3β)ω_i, √β ω_i}.
pub fn rr_strong_binding_limit(g: &SystemGeometry) -> [f64; 4] {
    let b = g.beta();
    [g.omega_m, g.omega_m, (3.0 * b).sqrt() * g.omega_ion, b.sqrt() * g.omega_ion]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn beryllium_spacing() {
        let g = SystemGeometry::reference();
        assert!(rel(g.ion_spacing(), 9.2) < 0.01, "{}", g.ion_spacing());
        let eq = equilibrium(&g, Configuration::Gg).unwrap();
        assert!(rel(eq[1] - eq[0], g.ion_spacing()) < 1e-12);
        assert!((eq[2] + g.ion_spacing() / 2.0 + g.d).abs() < 1e-9);
        assert!((g.beta() - 0.0939).abs() < 1e-4);
    }

    #[test]
    fn potential_structure() {
        let g = SystemGeometry::reference();
        let x = [-4.0, 5.0, -6.1, 7.3];
        let v = |c| potential(&g, c, &x).unwrap();
        let rr = v(Configuration::Rr) - v(Configuration::Gg);
        let singles = v(Configuration::Gr) + v(Configuration::Rg) - 2.0 * v(Configuration::Gg);
        // tweezers act on ground-state atoms only, so the RAIM terms add
        assert!((rr - singles).abs() < 1e-12);
        let s = g.scaled();
        assert!(potential(&g, Configuration::Gg, &[1.0, 1.0, -3.0, 3.0]).is_err());
        let rest = [-4.6, 4.6, -4.6 - g.d, 4.6 + g.d];
        let ion_only = 0.5 * ((rest[0] / s.length).powi(2) * 2.0) + s.length / 9.2;
        assert!((potential(&g, Configuration::Rr, &rest).unwrap() - ion_only).abs() < 1e-12);
    }

    #[test]
    fn ground_state_frequencies() {
        let g = SystemGeometry::reference();
        let m = normal_modes(&g, Configuration::Gg).unwrap();
        for (a, b) in m.frequencies.iter().zip(analytic_frequencies(&g, Configuration::Gg)) {
            assert!(rel(*a, b) < 1e-10, "{a} {b}");
        }
        let h = hessian(&g, Configuration::Gg).unwrap();
        for i in 0..2 {
            for j in 2..4 {
                assert_eq!(h[(i, j)], 0.0);
            }
        }
        // tweezer modes are the bare atom coordinates
        assert!((m.vectors[2][2].abs() - 1.0).abs() < 1e-12 || (m.vectors[2][3].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn double_raim_matches_exact_formula() {
        let g = SystemGeometry::reference();
        let m = normal_modes(&g, Configuration::Rr).unwrap();
        for (a, b) in m.frequencies.iter().zip(analytic_frequencies(&g, Configuration::Rr)) {
            assert!(rel(*a, b) < 1e-9, "{a} {b}");
        }
        let lim = rr_strong_binding_limit(&g);
        assert!(rel(m.frequencies[2], lim[2]) < 0.02);
        assert!(rel(m.frequencies[3], lim[3]) < 0.02);
    }

    #[test]
    fn single_raim_limit() {
        let g = SystemGeometry::reference();
        let m = normal_modes(&g, Configuration::Rg).unwrap();
        let a = analytic_frequencies(&g, Configuration::Rg);
        for (x, y) in m.frequencies.iter().zip(&a) {
            assert!(rel(*x, *y) < 0.02, "{x} {y}");
        }
        assert!(rel(m.frequencies[3], g.omega_tweezer) < 1e-12);
    }

    #[test]
    fn mirror_configurations_agree() {
        let g = SystemGeometry::reference();
        let a = normal_modes(&g, Configuration::Gr).unwrap();
        let b = normal_modes(&g, Configuration::Rg).unwrap();
        for (x, y) in a.frequencies.iter().zip(&b.frequencies) {
            assert!(rel(*x, *y) < 1e-12);
        }
        for (u, v) in a.vectors.iter().zip(&b.vectors) {
            let mut m = [-v[1], -v[0], -v[3], -v[2]];
            fix_sign(&mut m);
            for k in 0..4 {
                assert!((u[k] - m[k]).abs() < 1e-9, "{u:?} {m:?}");
            }
        }
        let e = equilibrium(&g, Configuration::Rr).unwrap();
        assert!((e[0] + e[1]).abs() < 1e-12 && (e[2] + e[3]).abs() < 1e-12);
    }

    #[test]
    fn analytic_matches_finite_difference_hessian() {
        let g = SystemGeometry { omega_m: 5.0, ..SystemGeometry::reference() };
        for c in Configuration::ALL {
            let a = hessian(&g, c).unwrap();
            let f = hessian_fd(&g, c, 1e-6).unwrap();
            let scale = (0..4).map(|i| a[(i, i)].abs()).fold(0.0, f64::max);
            for i in 0..4 {
                for j in 0..4 {
                    assert!((a[(i, j)] - f[(i, j)]).abs() < 1e-6 * scale, "{c:?} {i}{j}");
                    assert_eq!(a[(i, j)], a[(j, i)]);
                }
            }
        }
    }

    #[test]
    fn trace_identity_and_orthonormality() {
        let g = SystemGeometry::reference();
        for c in Configuration::ALL {
            let m = normal_modes(&g, c).unwrap();
            let h = hessian(&g, c).unwrap();
            let tr: f64 = (0..4).map(|i| h[(i, i)]).sum();
            let sum: f64 = m.frequencies.iter().map(|f| (f / g.omega_ion).powi(2)).sum();
            assert!(rel(sum, tr) < 1e-10);
            for i in 0..4 {
                for j in 0..4 {
                    let dot: f64 = (0..4).map(|k| m.vectors[i][k] * m.vectors[j][k]).sum();
                    assert!((dot - if i == j { 1.0 } else { 0.0 }).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn bad_geometry() {
        let g = SystemGeometry { omega_m: 0.0, ..SystemGeometry::reference() };
        assert!(normal_modes(&g, Configuration::Rr).is_err());
        assert!("xx".parse::<Configuration>().is_err());
        assert_eq!("gR".parse::<Configuration>().unwrap(), Configuration::Gr);
    }

    proptest! {
        #[test]
        fn low_modes_approach_mixed_crystal(ratio in 5.0f64..60.0) {
            let base = SystemGeometry::reference();
            let a = normal_modes(&SystemGeometry { omega_m: ratio, ..base }, Configuration::Rr).unwrap();
            let b = normal_modes(&SystemGeometry { omega_m: ratio * 1.5, ..base }, Configuration::Rr).unwrap();
            let lim = rr_strong_binding_limit(&base);
            for k in 2..4 {
                prop_assert!((b.frequencies[k] - lim[k]).abs() <= (a.frequencies[k] - lim[k]).abs());
            }
        }
    }
}
