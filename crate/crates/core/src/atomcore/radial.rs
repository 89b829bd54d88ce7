use std::collections::HashMap;

use crate::atomcore::defects::QuantumDefectTable;
use crate::atomcore::level::{effective_numbers, RydbergLevel};
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

/// Inner cutoff of all radial integrals, in Bohr radii. Quantum-defect
/// wavefunctions are unphysical inside the ionic core.
pub const R_CORE: f64 = 0.05;
/// Highest power p of r^p for which radial integrals are cached.
pub const MAX_POWER: usize = 6;
/// Relative accuracy demanded of every radial integral.
pub const RADIAL_TOLERANCE: f64 = 1e-8;

const PANEL_ORDER: usize = 16;

/// Quantum-defect radial wavefunction
/// R(r) = N e^{−r/n*} (2r/n*)^{l*} L_k^{(2l*+1)}(2r/n*), with integer
/// Laguerre degree k = n* − l* − 1 and non-integer upper parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialFunction {
    pub n_star: f64,
    pub l_star: f64,
    pub degree: usize,
    log_norm: f64,
}

impl RadialFunction {
    pub fn new(level: &RydbergLevel, table: &QuantumDefectTable) -> Result<Self> {
        let e = effective_numbers(level, table)?;
        Ok(Self::from_effective(e.n_star, e.l_star, e.degree as usize))
    }

    /// Construct from effective quantum numbers directly; `n_star − l_star − 1`
    /// must equal `degree`.
    pub fn from_effective(n_star: f64, l_star: f64, degree: usize) -> Self {
        // N² = (2/n*)³ k! / (Γ(n*+l*+1) · 2n*)
        let k = degree as f64;
        let log_norm2 = 3.0 * (2.0 / n_star).ln() + libm::lgamma(k + 1.0)
            - libm::lgamma(n_star + l_star + 1.0)
            - (2.0 * n_star).ln();
        Self { n_star, l_star, degree, log_norm: 0.5 * log_norm2 }
    }

    /// Outer radius of the integration domain, 2n*(n*+15).
    pub fn outer_radius(&self) -> f64 {
        2.0 * self.n_star * (self.n_star + 15.0)
    }

    pub fn eval(&self, r: f64) -> f64 {
        let x = 2.0 * r / self.n_star;
        let alpha = 2.0 * self.l_star + 1.0;
        let lag = laguerre(self.degree, alpha, x);
        (self.log_norm - 0.5 * x + self.l_star * x.ln()).exp() * lag
    }
}

/// Generalized Laguerre polynomial L_k^{(α)}(x) by the upward three-term
/// recurrence, which is stable for x > 0.
pub fn laguerre(k: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for m in 1..k {
        let mf = m as f64;
        let next = ((2.0 * mf + 1.0 + alpha - x) * cur - (mf + alpha) * prev) / (mf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

pub fn radial_wavefunction(level: &RydbergLevel, table: &QuantumDefectTable, r: f64) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::domain("radial coordinate must be positive"));
    }
    Ok(RadialFunction::new(level, table)?.eval(r))
}

/// Composite Gauss-Legendre rule in s = √r on [R_CORE, r_out].
struct SqrtGrid {
    r: Vec<f64>,
    /// weight including the Jacobian dr = 2s ds
    w: Vec<f64>,
}

impl SqrtGrid {
    fn new(r_out: f64, panels: usize) -> Self {
        let (gx, gw) = gauss_legendre(PANEL_ORDER);
        let s0 = R_CORE.sqrt();
        let s1 = r_out.sqrt();
        let h = (s1 - s0) / panels as f64;
        let mut r = Vec::with_capacity(panels * PANEL_ORDER);
        let mut w = Vec::with_capacity(panels * PANEL_ORDER);
        for p in 0..panels {
            let a = s0 + p as f64 * h;
            for (x, wx) in gx.iter().zip(&gw) {
                let s = a + 0.5 * h * (x + 1.0);
                r.push(s * s);
                w.push(0.5 * h * wx * 2.0 * s);
            }
        }
        Self { r, w }
    }
}

fn default_panels(n_star_max: f64) -> usize {
    (3.0 * n_star_max).ceil() as usize + 20
}

/// Integrate f(r) = R_a R_b r^{p+2} on panels P and 2P; returns the fine
/// value and the error estimate relative to ∫|f|.
fn pair_integral(ra: &RadialFunction, rb: &RadialFunction, p: u32, panels: usize) -> (f64, f64) {
    let r_out = ra.outer_radius().max(rb.outer_radius());
    let eval = |grid: &SqrtGrid| {
        let mut sum = 0.0;
        let mut abs = 0.0;
        for (&r, &w) in grid.r.iter().zip(&grid.w) {
            let f = ra.eval(r) * rb.eval(r) * r.powi(p as i32 + 2) * w;
            sum += f;
            abs += f.abs();
        }
        (sum, abs)
    };
    let (coarse, _) = eval(&SqrtGrid::new(r_out, panels));
    let (fine, abs) = eval(&SqrtGrid::new(r_out, 2 * panels));
    (fine, (fine - coarse).abs() / abs.max(f64::MIN_POSITIVE))
}

/// ∫ R_a(r) r^{p+2} R_b(r) dr over [R_CORE, 2n*(n*+15)] (atomic units).
pub fn radial_integral(
    a: &RydbergLevel,
    b: &RydbergLevel,
    p: u32,
    table: &QuantumDefectTable,
) -> Result<f64> {
    if p as usize > MAX_POWER {
        return Err(Error::domain(format!("radial power {p} above {MAX_POWER}")));
    }
    let ra = RadialFunction::new(a, table)?;
    let rb = RadialFunction::new(b, table)?;
    // order the pair canonically so the result is exactly symmetric
    let (ra, rb) = if (a.n, a.l, a.j2) <= (b.n, b.l, b.j2) { (ra, rb) } else { (rb, ra) };
    let mut panels = default_panels(ra.n_star.max(rb.n_star));
    let mut last = (0.0, f64::INFINITY);
    for _ in 0..4 {
        last = pair_integral(&ra, &rb, p, panels);
        if last.1 < 0.1 * RADIAL_TOLERANCE {
            return Ok(last.0);
        }
        panels *= 2;
    }
    if last.1 > RADIAL_TOLERANCE {
        return Err(Error::Accuracy {
            what: format!("radial integral <{}|r^{p}|{}>", a.label(), b.label()),
            estimate: last.1,
        });
    }
    Ok(last.0)
}

/// Batch radial integrator: tabulates every distinct (n, l, j) channel on a
/// shared √r grid once and returns all moments p = 0..=6 for a pair.
pub struct RadialGrid {
    index: HashMap<(u32, u32, u32), usize>,
    fine: Vec<Vec<f64>>,
    coarse: Vec<Vec<f64>>,
    fine_r: Vec<f64>,
    coarse_r: Vec<f64>,
}

impl RadialGrid {
    pub fn new<'a>(
        levels: impl IntoIterator<Item = &'a RydbergLevel>,
        table: &QuantumDefectTable,
    ) -> Result<Self> {
        let mut keys: Vec<(u32, u32, u32)> = levels.into_iter().map(|l| l.nlj()).collect();
        keys.sort_unstable();
        keys.dedup();
        let funcs = keys
            .iter()
            .map(|&(n, l, j2)| RadialFunction::new(&RydbergLevel { n, l, j2, mj2: 1 }, table))
            .collect::<Result<Vec<_>>>()?;
        let n_star_max = funcs.iter().map(|f| f.n_star).fold(1.0, f64::max);
        let r_out = funcs.iter().map(|f| f.outer_radius()).fold(0.0, f64::max);
        let panels = default_panels(n_star_max);
        let coarse_grid = SqrtGrid::new(r_out, panels);
        let fine_grid = SqrtGrid::new(r_out, 2 * panels);
        let tabulate = |grid: &SqrtGrid| -> Vec<Vec<f64>> {
            // fold √w and r into each table so pair products need one multiply
            funcs
                .iter()
                .map(|f| {
                    grid.r
                        .iter()
                        .zip(&grid.w)
                        .map(|(&r, &w)| f.eval(r) * r * w.sqrt())
                        .collect()
                })
                .collect()
        };
        Ok(Self {
            index: keys.iter().enumerate().map(|(i, &k)| (k, i)).collect(),
            fine: tabulate(&fine_grid),
            coarse: tabulate(&coarse_grid),
            fine_r: fine_grid.r,
            coarse_r: coarse_grid.r,
        })
    }

    fn moments_on(a: &[f64], b: &[f64], r: &[f64]) -> ([f64; MAX_POWER + 1], [f64; MAX_POWER + 1]) {
        let mut m = [0.0; MAX_POWER + 1];
        let mut abs = [0.0; MAX_POWER + 1];
        for ((&x, &y), &r) in a.iter().zip(b).zip(r) {
            let mut f = x * y;
            for p in 0..=MAX_POWER {
                m[p] += f;
                abs[p] += f.abs();
                f *= r;
            }
        }
        (m, abs)
    }

    /// ∫ R_a r^{p+2} R_b dr for p = 0..=6.
    pub fn moments(&self, a: &RydbergLevel, b: &RydbergLevel) -> Result<[f64; MAX_POWER + 1]> {
        let lookup = |lvl: &RydbergLevel| {
            self.index
                .get(&lvl.nlj())
                .copied()
                .ok_or_else(|| Error::InvalidChannel(format!("{} not tabulated", lvl.label())))
        };
        let (mut ia, mut ib) = (lookup(a)?, lookup(b)?);
        if ia > ib {
            std::mem::swap(&mut ia, &mut ib);
        }
        let (fine, abs) = Self::moments_on(&self.fine[ia], &self.fine[ib], &self.fine_r);
        let (coarse, _) = Self::moments_on(&self.coarse[ia], &self.coarse[ib], &self.coarse_r);
        for p in 0..=MAX_POWER {
            let est = (fine[p] - coarse[p]).abs() / abs[p].max(f64::MIN_POSITIVE);
            if est > RADIAL_TOLERANCE {
                return Err(Error::Accuracy {
                    what: format!("radial integral <{}|r^{p}|{}>", a.label(), b.label()),
                    estimate: est,
                });
            }
        }
        Ok(fine)
    }
}
