use faer::{c64, Mat};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::floquet::lz::lz_probability;
use crate::floquet::paul::{paul_operator, TrapDrive};
use crate::floquet::propagator::floquet_propagator;
use crate::floquet::spectrum::{folded_distance, identify_raim_state, quasienergy_spectrum, RaimIdentification};
use crate::linalg::{congruence, eigh};
use crate::parallel;
use crate::starkmap::multipole::MultipoleOperator;
use crate::starkmap::scan::assemble_hti;

/// Settings for an E_flo scan.
#[derive(Debug, Clone)]
pub struct FloquetOptions {
    /// Number of adiabatic states around the RAIM state kept in the Floquet
    /// problem; 0 keeps the whole basis.
    pub subspace: usize,
    /// Overlap below which a point is flagged as a crossing.
    pub overlap_threshold: f64,
    /// A point is a spike when E_flo − E_RAIM departs from its local median
    /// by more than this multiple of the local median absolute deviation ...
    pub spike_factor: f64,
    /// ... and this absolute floor (Hartree).
    pub spike_floor: f64,
    /// Half width, in grid points, of the median window.
    pub median_half_window: usize,
    /// Half width, in grid points, of the gap refinement bracket.
    pub refine_half_steps: usize,
    /// Golden-section stopping width in Bohr; 0 disables refinement.
    pub refine_tolerance: f64,
    /// (ω_M, μ) in atomic units for Landau-Zener probabilities.
    pub lz: Option<(f64, f64)>,
    /// Keep Floquet modes of every grid point.
    pub keep_modes: bool,
}

impl Default for FloquetOptions {
    fn default() -> Self {
        FloquetOptions {
            subspace: 40,
            overlap_threshold: 0.5,
            spike_factor: 5.0,
            spike_floor: crate::units::mhz_to_energy(1.0),
            median_half_window: 10,
            refine_half_steps: 5,
            refine_tolerance: 2e-3,
            lz: None,
            keep_modes: false,
        }
    }
}

/// Floquet analysis at one core-ion distance.
#[derive(Debug, Clone)]
pub struct FloquetPoint {
    pub r: f64,
    /// Static RAIM energy E_RAIM (relative to the reference level).
    pub e_raim: f64,
    /// Static adiabatic energies of the whole basis.
    pub static_energies: Vec<f64>,
    /// First adiabatic rank of the Floquet subspace.
    pub offset: usize,
    pub quasienergies: Vec<f64>,
    pub raim: RaimIdentification,
    /// Adiabatic rank that dominates the partner mode.
    pub partner_level: Option<usize>,
    pub modes: Option<Mat<c64>>,
}

impl FloquetPoint {
    pub fn e_flo(&self) -> f64 {
        self.raim.e_flo
    }

    pub fn overlap(&self) -> f64 {
        self.raim.overlap
    }

    /// Folded quasienergy separation between the RAIM mode and its partner.
    pub fn pair_gap(&self, omega: f64) -> Option<f64> {
        let p = self.raim.partner?;
        Some(folded_distance(self.quasienergies[self.raim.index], self.quasienergies[p], omega))
    }
}

/// A detected avoided crossing.
#[derive(Debug, Clone, Serialize)]
pub struct CrossingRecord {
    /// Grid index of the representative point.
    pub index: usize,
    /// Core-ion distance of the refined minimum gap (Bohr).
    pub r: f64,
    /// Quasienergy gap 2g (Hartree).
    pub gap: f64,
    /// Adiabatic rank of the partner state.
    pub partner: Option<usize>,
    /// |d(E_RAIM − E_partner)/dr| (Hartree per Bohr).
    pub slope: Option<f64>,
    pub p_lz: Option<f64>,
}

/// E_flo scan over a grid.
#[derive(Debug, Clone)]
pub struct FloquetScan {
    pub rank: usize,
    pub drive: TrapDrive,
    pub points: Vec<FloquetPoint>,
    pub flagged: Vec<bool>,
    pub crossings: Vec<CrossingRecord>,
}

impl FloquetScan {
    pub fn min_overlap(&self) -> f64 {
        self.points.iter().map(|p| p.overlap()).fold(1.0, f64::min)
    }
}

fn subspace_range(dim: usize, rank: usize, size: usize) -> (usize, usize) {
    if size == 0 || size >= dim {
        return (0, dim);
    }
    let lo = rank.saturating_sub(size / 2).min(dim - size);
    (lo, lo + size)
}

/// Floquet modes, quasienergies and RAIM identification at one distance.
///
/// The RAIM state is the adiabatic eigenstate of rank `rank`. H_TI and the
/// trap operator are projected onto the `opts.subspace` adiabatic states
/// nearest in rank, where H_TI is diagonal.
pub fn floquet_point(
    op: &MultipoleOperator,
    e_ref: f64,
    rank: usize,
    drive: &TrapDrive,
    r: f64,
    opts: &FloquetOptions,
) -> Result<FloquetPoint> {
    let dim = op.dim();
    if rank >= dim {
        return Err(Error::config(format!("RAIM rank {rank} outside basis of size {dim}")));
    }
    let h = assemble_hti(op, r, e_ref)?;
    let (energies, vectors) = eigh(h.as_ref())?;
    let (lo, hi) = subspace_range(dim, rank, opts.subspace);
    let k = hi - lo;
    let basis = vectors.subcols(lo, k);
    let v = paul_operator(op, drive.orientation, r)?;
    let vs = congruence(v.as_ref(), basis);
    let hs = Mat::<f64>::from_fn(k, k, |i, j| if i == j { energies[lo + i] } else { 0.0 });
    let f = floquet_propagator(hs.as_ref(), vs.as_ref(), drive)?;
    let spec = quasienergy_spectrum(f.as_ref(), drive.period())?;
    let psi: Vec<c64> = (0..k).map(|i| c64::new(if lo + i == rank { 1.0 } else { 0.0 }, 0.0)).collect();
    let raim = identify_raim_state(spec.modes.as_ref(), &psi, hs.as_ref());
    let partner_level = raim.partner.and_then(|p| {
        (0..k)
            .filter(|&i| lo + i != rank)
            .max_by(|&a, &b| spec.modes[(a, p)].norm_sqr().total_cmp(&spec.modes[(b, p)].norm_sqr()))
            .map(|i| lo + i)
    });
    Ok(FloquetPoint {
        r,
        e_raim: energies[rank],
        static_energies: energies,
        offset: lo,
        quasienergies: spec.quasienergies,
        raim,
        partner_level,
        modes: opts.keep_modes.then_some(spec.modes),
    })
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Flag crossing points: low RAIM overlap, or an E_flo spike. A spike is a
/// point whose residual s = E_flo − E_RAIM sits further from the local
/// median of s than `spike_factor` local median absolute deviations.
pub fn flag_crossings(points: &[FloquetPoint], opts: &FloquetOptions) -> Vec<bool> {
    let s: Vec<f64> = points.iter().map(|p| p.e_flo() - p.e_raim).collect();
    let n = s.len();
    let w = opts.median_half_window;
    (0..n)
        .map(|k| {
            let window = &s[k.saturating_sub(w)..(k + w + 1).min(n)];
            let m = median(&mut window.to_vec());
            let mad = median(&mut window.iter().map(|x| (x - m).abs()).collect::<Vec<_>>());
            let excess = (s[k] - m).abs();
            let spike = excess > opts.spike_factor * mad && excess > opts.spike_floor;
            points[k].overlap() < opts.overlap_threshold || spike
        })
        .collect()
}

/// Minimize f on [a, b] by golden-section search.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Run the Floquet analysis over a grid and detect avoided crossings.
pub fn scan_eflo(
    op: &MultipoleOperator,
    e_ref: f64,
    rank: usize,
    drive: &TrapDrive,
    grid: &[f64],
    opts: &FloquetOptions,
) -> Result<FloquetScan> {
    if grid.is_empty() {
        return Err(Error::config("empty scan grid"));
    }
    let points: Vec<FloquetPoint> = parallel::map(grid, |&r| floquet_point(op, e_ref, rank, drive, r, opts))
        .into_iter()
        .collect::<Result<_>>()?;
    let flagged = flag_crossings(&points, opts);
    let mut clusters: Vec<usize> = Vec::new();
    let mut k = 0;
    while k < points.len() {
        if !flagged[k] {
            k += 1;
            continue;
        }
        let start = k;
        while k < points.len() && flagged[k] {
            k += 1;
        }
        let best = (start..k)
            .min_by(|&a, &b| points[a].overlap().total_cmp(&points[b].overlap()))
            .expect("non-empty cluster");
        clusters.push(best);
    }
    let crossings = parallel::map(&clusters, |&i| characterize(op, e_ref, rank, drive, grid, &points, i, opts))
        .into_iter()
        .collect::<Result<_>>()?;
    Ok(FloquetScan { rank, drive: drive.clone(), points, flagged, crossings })
}

#[allow(clippy::too_many_arguments)]
fn characterize(
    op: &MultipoleOperator,
    e_ref: f64,
    rank: usize,
    drive: &TrapDrive,
    grid: &[f64],
    points: &[FloquetPoint],
    i: usize,
    opts: &FloquetOptions,
) -> Result<CrossingRecord> {
    let p = &points[i];
    let omega = drive.omega;
    let mut r_best = p.r;
    let mut gap = p.pair_gap(omega).unwrap_or(0.0);
    if opts.refine_tolerance > 0.0 && grid.len() > 1 {
        let a = grid[i.saturating_sub(opts.refine_half_steps)];
        let b = grid[(i + opts.refine_half_steps).min(grid.len() - 1)];
        let quiet = FloquetOptions { keep_modes: false, ..opts.clone() };
        let mut failure = None;
        let (r, g) = golden_section(
            |r| match floquet_point(op, e_ref, rank, drive, r, &quiet) {
                Ok(q) => q.pair_gap(omega).unwrap_or(f64::INFINITY),
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::INFINITY
                }
            },
            a,
            b,
            opts.refine_tolerance,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        if g < gap {
            r_best = r;
            gap = g;
        }
    }
    let slope = p.partner_level.and_then(|lvl| {
        let (a, b) = (i.saturating_sub(1), (i + 1).min(points.len() - 1));
        (b > a).then(|| {
            let d = |q: &FloquetPoint| q.static_energies[rank] - q.static_energies[lvl];
            ((d(&points[b]) - d(&points[a])) / (points[b].r - points[a].r)).abs()
        })
    });
    let p_lz = match (opts.lz, slope) {
        (Some((w, mu)), Some(s)) => Some(lz_probability(0.5 * gap, s, w, mu)?),
        _ => None,
    };
    Ok(CrossingRecord { index: i, r: r_best, gap, partner: p.partner_level, slope, p_lz })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomcore::{build_basis, QuantumDefectTable};
    use crate::floquet::paul::{TrapOrientation, Waveform};
    use crate::floquet::spectrum::fold_quasienergy;
    use crate::starkmap::{build_multipole, reference_energy};

    #[test]
    fn subspace_is_clipped_to_basis() {
        assert_eq!(subspace_range(100, 3, 10), (0, 10));
        assert_eq!(subspace_range(100, 98, 10), (90, 100));
        assert_eq!(subspace_range(100, 50, 10), (45, 55));
        assert_eq!(subspace_range(100, 50, 0), (0, 100));
        assert_eq!(subspace_range(8, 5, 20), (0, 8));
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, f) = golden_section(|x| (x - 0.3).powi(2), -1.0, 2.0, 1e-9);
        assert!((x - 0.3).abs() < 1e-8);
        assert!(f < 1e-16);
    }

    #[test]
    fn median_and_flags() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    fn synthetic(r: f64, residual: f64, overlap: f64) -> FloquetPoint {
        FloquetPoint {
            r,
            e_raim: -1e-6,
            static_energies: vec![-1e-6],
            offset: 0,
            quasienergies: vec![0.0],
            raim: RaimIdentification {
                index: 0,
                overlap,
                e_flo: -1e-6 + residual,
                partner: None,
                partner_overlap: 0.0,
                ambiguous: overlap < 0.25,
            },
            partner_level: None,
            modes: None,
        }
    }

    #[test]
    fn spikes_and_overlap_dips_are_flagged() {
        let opts = FloquetOptions::default();
        let unit = opts.spike_floor;
        let mut pts: Vec<FloquetPoint> = (0..40).map(|i| synthetic(i as f64, 3.0 * unit + 0.01 * unit * i as f64, 0.99)).collect();
        pts[12].raim.e_flo += 20.0 * unit;
        pts[30].raim.overlap = 0.3;
        let flags = flag_crossings(&pts, &opts);
        let hits: Vec<usize> = (0..40).filter(|&i| flags[i]).collect();
        assert_eq!(hits, vec![12, 30]);
    }

    #[test]
    fn small_spikes_below_floor_are_ignored() {
        let opts = FloquetOptions::default();
        let mut pts: Vec<FloquetPoint> = (0..30).map(|i| synthetic(i as f64, 0.0, 0.999)).collect();
        pts[10].raim.e_flo += 0.5 * opts.spike_floor;
        assert!(flag_crossings(&pts, &opts).iter().all(|f| !f));
    }

    fn small_operator() -> (MultipoleOperator, f64) {
        let table = QuantumDefectTable::rb87();
        let basis = build_basis(12, &[1], &table).unwrap();
        let op = build_multipole(&basis, &table, 6).unwrap();
        (op, reference_energy(12, &table).unwrap())
    }

    #[test]
    fn static_drive_gives_exact_identification() {
        let (op, e_ref) = small_operator();
        let drive = TrapDrive::new(0.0, 50.0, Waveform::Sinusoidal, TrapOrientation::Radial, 9.012, 16).unwrap();
        let opts = FloquetOptions { subspace: 12, ..Default::default() };
        let rank = 40;
        let p = floquet_point(&op, e_ref, rank, &drive, 900.0, &opts).unwrap();
        assert!((p.overlap() - 1.0).abs() < 1e-12);
        assert!((p.e_flo() - p.e_raim).abs() < 1e-15);
        let eps = p.quasienergies[p.raim.index];
        assert!((eps - fold_quasienergy(p.e_raim, drive.omega)).abs() < 1e-10 * drive.omega);
    }

    #[test]
    fn scan_without_drive_has_no_crossings() {
        let (op, e_ref) = small_operator();
        let drive = TrapDrive::new(0.0, 50.0, Waveform::Sinusoidal, TrapOrientation::Radial, 9.012, 8).unwrap();
        let opts = FloquetOptions { subspace: 10, ..Default::default() };
        let grid: Vec<f64> = (0..12).map(|i| 900.0 + 2.0 * i as f64).collect();
        let s = scan_eflo(&op, e_ref, 40, &drive, &grid, &opts).unwrap();
        assert!(s.crossings.is_empty());
        assert!(s.min_overlap() > 1.0 - 1e-12);
    }

    #[test]
    fn rank_outside_basis_is_rejected() {
        let (op, e_ref) = small_operator();
        let drive = TrapDrive::new(0.1, 50.0, Waveform::Sinusoidal, TrapOrientation::Radial, 9.012, 8).unwrap();
        let err = floquet_point(&op, e_ref, 10_000, &drive, 900.0, &FloquetOptions::default()).unwrap_err();
        assert!(err.is_config());
    }
}
