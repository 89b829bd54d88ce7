use faer::Mat;

use crate::atomcore::defects::QuantumDefectTable;
use crate::atomcore::level::{level_energy, RydbergLevel};
use crate::error::{Error, Result};
use crate::linalg::eigh;
use crate::parallel;
use crate::starkmap::environment::Environment;
use crate::starkmap::multipole::MultipoleOperator;

/// Overlap below which a link between grid points counts as a diabatic jump.
pub const DIABATIC_THRESHOLD: f64 = 0.5;

/// Field-free nP3/2 energy of the scanned manifold, used as energy zero.
pub fn reference_energy(n_center: u32, table: &QuantumDefectTable) -> Result<f64> {
    level_energy(&RydbergLevel::new(n_center, 1, 3, 1)?, table)
}

/// H_TI(r) − E_ref = diag(E − E_ref) − Σ_{l'} M_{l'}/r^{l'+1}, r in Bohr.
pub fn assemble_hti(op: &MultipoleOperator, r: f64, e_ref: f64) -> Result<Mat<f64>> {
    if !(r > 0.0) {
        return Err(Error::domain(format!("core-ion distance must be positive, got {r}")));
    }
    let n = op.dim();
    let mut h = Mat::<f64>::zeros(n, n);
    for (k, m) in op.terms.iter().enumerate() {
        let c = -r.powi(-(k as i32 + 2));
        h += faer::Scale(c) * m;
    }
    for i in 0..n {
        h[(i, i)] += op.basis.energies[i] - e_ref;
    }
    Ok(h)
}

/// Rough ⟨r_e⟩ of the basis (largest hydrogenic estimate), for the
/// multipole-convergence warning r_ci > 3⟨r_e⟩.
pub fn electron_extent(op: &MultipoleOperator) -> f64 {
    op.basis
        .levels
        .iter()
        .map(|l| 1.5 * (l.n as f64).powi(2))
        .fold(0.0, f64::max)
}

/// Spectrum at one grid point.
#[derive(Debug, Clone)]
pub struct StarkPoint {
    pub r: f64,
    pub energies: Vec<f64>,
    pub vectors: Mat<f64>,
}

pub fn diagonalize_at(op: &MultipoleOperator, r: f64, e_ref: f64) -> Result<StarkPoint> {
    diagonalize_in(op, r, e_ref, None)
}

/// Spectrum of H_TI plus optional environment terms.
pub fn diagonalize_in(op: &MultipoleOperator, r: f64, e_ref: f64, env: Option<&Environment>) -> Result<StarkPoint> {
    let mut h = assemble_hti(op, r, e_ref)?;
    if let Some(env) = env {
        h += env.terms(op, r)?;
    }
    let (energies, vectors) = eigh(h.as_ref())?;
    Ok(StarkPoint { r, energies, vectors })
}

/// Adiabatic potential curves over a grid of core-ion distances.
#[derive(Debug, Clone)]
pub struct PotentialCurveSet {
    /// Grid in Bohr radii, ascending.
    pub r: Vec<f64>,
    /// Energies relative to `e_ref` (Hartree), ascending per point.
    pub energies: Vec<Vec<f64>>,
    /// Energy zero (absolute Hartree).
    pub e_ref: f64,
    /// Basis index carrying the largest weight of each eigenvector.
    pub dominant: Vec<Vec<usize>>,
    /// `links[k][a]` is the state at point k+1 continuing state a at point k.
    pub links: Vec<Vec<usize>>,
    /// |⟨ψ_a(r_k)|ψ_b(r_{k+1})⟩| for each link.
    pub link_overlap: Vec<Vec<f64>>,
    /// Eigenvectors, kept only when requested.
    pub vectors: Option<Vec<Mat<f64>>>,
    pub levels: Vec<RydbergLevel>,
}

/// Bijective overlap-maximizing assignment between two eigenbases. Pairs
/// are matched greedily by descending overlap; leftovers are matched in
/// energy order.
pub fn link_states(prev: &Mat<f64>, next: &Mat<f64>) -> (Vec<usize>, Vec<f64>) {
    let n = prev.ncols();
    let o = prev.transpose() * next;
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for b in 0..n {
        for a in 0..n {
            let v = o[(a, b)].abs();
            if v > 0.3 {
                pairs.push((v, a, b));
            }
        }
    }
    // ties broken by energy proximity, i.e. by index distance
    pairs.sort_by(|x, y| {
        y.0.partial_cmp(&x.0)
            .unwrap()
            .then(x.1.abs_diff(x.2).cmp(&y.1.abs_diff(y.2)))
    });
    let mut link = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for (_, a, b) in pairs {
        if link[a] == usize::MAX && !taken[b] {
            link[a] = b;
            taken[b] = true;
        }
    }
    let mut free: Vec<usize> = (0..n).filter(|&b| !taken[b]).collect();
    free.reverse();
    for l in link.iter_mut() {
        if *l == usize::MAX {
            *l = free.pop().expect("equal counts");
        }
    }
    let overlap = (0..n).map(|a| o[(a, link[a])].abs()).collect();
    (link, overlap)
}

fn dominant_indices(v: &Mat<f64>) -> Vec<usize> {
    (0..v.ncols())
        .map(|c| {
            (0..v.nrows())
                .max_by(|&i, &j| v[(i, c)].abs().partial_cmp(&v[(j, c)].abs()).unwrap())
                .unwrap_or(0)
        })
        .collect()
}

/// Diagonalize H_TI on every grid point (Bohr, ascending) and link states
/// across neighbouring points.
pub fn diagonalize_scan(
    op: &MultipoleOperator,
    grid: &[f64],
    e_ref: f64,
    keep_vectors: bool,
) -> Result<PotentialCurveSet> {
    diagonalize_scan_in(op, grid, e_ref, keep_vectors, None)
}

/// [`diagonalize_scan`] with optional environment terms at every point.
pub fn diagonalize_scan_in(
    op: &MultipoleOperator,
    grid: &[f64],
    e_ref: f64,
    keep_vectors: bool,
    env: Option<&Environment>,
) -> Result<PotentialCurveSet> {
    if grid.is_empty() {
        return Err(Error::config("empty grid"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config("grid must be strictly ascending"));
    }
    let n = op.dim();
    let mut set = PotentialCurveSet {
        r: grid.to_vec(),
        energies: Vec::with_capacity(grid.len()),
        e_ref,
        dominant: Vec::with_capacity(grid.len()),
        links: Vec::new(),
        link_overlap: Vec::new(),
        vectors: keep_vectors.then(Vec::new),
        levels: op.basis.levels.clone(),
    };
    // diagonalize in chunks so only a bounded number of eigenbases is alive
    let chunk = (2 * parallel::workers()).max(4);
    let mut prev: Option<Mat<f64>> = None;
    let indices: Vec<usize> = (0..grid.len()).collect();
    for block in indices.chunks(chunk) {
        let points = parallel::map(block, |&k| {
            diagonalize_in(op, grid[k], e_ref, env).map_err(|e| match e {
                Error::Numerical(_) => Error::Eigensolver { index: k },
                other => other,
            })
        });
        for p in points {
            let p = p?;
            debug_assert_eq!(p.energies.len(), n);
            if let Some(pv) = &prev {
                let (l, o) = link_states(pv, &p.vectors);
                set.links.push(l);
                set.link_overlap.push(o);
            }
            set.energies.push(p.energies);
            set.dominant.push(dominant_indices(&p.vectors));
            if let Some(v) = set.vectors.as_mut() {
                v.push(p.vectors.clone());
            }
            prev = Some(p.vectors);
        }
    }
    Ok(set)
}

impl PotentialCurveSet {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.energies.first().map_or(0, Vec::len)
    }

    /// Indices of the overlap-tracked curve that ends as state `last` at the
    /// outermost grid point, listed from the innermost point outward.
    pub fn tracked_indices(&self, last: usize) -> Vec<usize> {
        let m = self.len();
        let mut idx = vec![0; m];
        idx[m - 1] = last;
        for k in (0..m - 1).rev() {
            let target = idx[k + 1];
            idx[k] = self.links[k].iter().position(|&b| b == target).expect("bijection");
        }
        idx
    }

    /// Index of the state whose dominant component at the outermost grid
    /// point is `level` (any m_j).
    pub fn index_by_label(&self, label: &str) -> Result<usize> {
        let last = self.len() - 1;
        let mut best: Option<usize> = None;
        for (s, &b) in self.dominant[last].iter().enumerate() {
            if self.levels[b].label() == label {
                best = Some(best.map_or(s, |x: usize| x.min(s)));
            }
        }
        best.ok_or_else(|| Error::config(format!("no curve with label {label} at the outer grid edge")))
    }

    /// Energies along the adiabatic curve of fixed energy rank.
    pub fn adiabatic_curve(&self, rank: usize) -> Vec<f64> {
        self.energies.iter().map(|e| e[rank]).collect()
    }

    /// Energies along an overlap-tracked curve.
    pub fn tracked_curve(&self, last: usize) -> Vec<f64> {
        self.tracked_indices(last)
            .into_iter()
            .enumerate()
            .map(|(k, i)| self.energies[k][i])
            .collect()
    }
}
