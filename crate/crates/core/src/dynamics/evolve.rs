use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::dynamics::pulse::DriveTone;
use crate::dynamics::scheme::{excitation, LevelScheme};
use crate::error::{Error, Result};
use crate::modes::Configuration;

/// Rotating frame: single-excitation states rotate at the first tone's
/// frequency, RR at the sum of the first and second (or twice the first when
/// there is only one tone). All values in rad/μs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub single: f64,
    pub double: f64,
}

impl Frame {
    pub fn for_tones(tones: &[DriveTone]) -> Self {
        let w1 = tones.first().map_or(0.0, |t| t.frequency);
        let w2 = tones.get(1).map_or(w1, |t| t.frequency);
        Self { single: w1, double: w1 + w2 }
    }

    fn offset(&self, c: Configuration) -> f64 {
        match excitation(c) {
            0 => 0.0,
            1 => self.single,
            _ => self.double,
        }
    }

    /// Frequency gap bridged by an excitation step (1 or 2).
    fn step_gap(&self, step: usize) -> f64 {
        if step == 1 {
            self.single
        } else {
            self.double - self.single
        }
    }
}

/// Coefficient of |lower⟩⟨upper| for a block of the given step:
/// ½ Σ_j Ω_j f_j(t) e^{i(ω_j − Δθ)t}.
fn block_coefficient(tones: &[DriveTone], frame: &Frame, step: usize, t: f64) -> c64 {
    let gap = frame.step_gap(step);
    tones
        .iter()
        .map(|tone| c64::from_polar(0.5 * tone.amplitude(t), (tone.frequency - gap) * t))
        .fold(c64::new(0.0, 0.0), |a, b| a + b)
}

/// Diagonal of H in the rotating frame (rad/μs).
fn diagonal(scheme: &LevelScheme, frame: &Frame) -> Vec<f64> {
    scheme.states.iter().map(|s| s.phonon - frame.offset(s.configuration)).collect()
}

/// Dense rotating-frame Hamiltonian at time t (rad/μs).
pub fn hamiltonian(scheme: &LevelScheme, tones: &[DriveTone], t: f64) -> Mat<c64> {
    let frame = Frame::for_tones(tones);
    let n = scheme.len();
    let mut h = Mat::<c64>::zeros(n, n);
    for (i, d) in diagonal(scheme, &frame).into_iter().enumerate() {
        h[(i, i)] = c64::new(d, 0.0);
    }
    for b in &scheme.blocks {
        let coef = block_coefficient(tones, &frame, b.step, t);
        for (i, &l) in b.lower_index.iter().enumerate() {
            for (j, &u) in b.upper_index.iter().enumerate() {
                let z = coef * b.values[i][j];
                h[(l, u)] += z;
                h[(u, l)] += z.conj();
            }
        }
    }
    h
}

/// Integrator settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    /// Time step in μs.
    pub dt: f64,
    /// Record populations every this many steps.
    pub record_every: usize,
    pub norm_tolerance: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { dt: 1e-3, record_every: 10, norm_tolerance: 1e-6 }
    }
}

/// Configuration-resolved populations over time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    /// Times in μs.
    pub t: Vec<f64>,
    /// Populations of gg, gR, Rg, RR (summed over phonon states).
    pub populations: Vec<[f64; 4]>,
    pub norm: Vec<f64>,
    #[serde(skip)]
    pub final_state: Vec<c64>,
}

impl Trajectory {
    pub fn final_populations(&self) -> [f64; 4] {
        *self.populations.last().expect("trajectory has the initial point")
    }

    pub fn max_population(&self, c: Configuration) -> f64 {
        let k = config_slot(c);
        self.populations.iter().map(|p| p[k]).fold(0.0, f64::max)
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norm.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }
}

fn config_slot(c: Configuration) -> usize {
    Configuration::ALL.iter().position(|x| *x == c).expect("listed")
}

/// Per-configuration populations of a state vector.
pub fn populations(scheme: &LevelScheme, psi: &[c64]) -> [f64; 4] {
    let mut p = [0.0; 4];
    for (s, z) in scheme.states.iter().zip(psi) {
        p[config_slot(s.configuration)] += z.norm_sqr();
    }
    p
}

/// |gg, 0000⟩.
pub fn ground_state(scheme: &LevelScheme) -> Result<Vec<c64>> {
    let i = scheme
        .index(Configuration::Gg, &[0; 4])
        .ok_or_else(|| Error::config("scheme lacks |gg,0000⟩"))?;
    let mut psi = vec![c64::new(0.0, 0.0); scheme.len()];
    psi[i] = c64::new(1.0, 0.0);
    Ok(psi)
}

/// Off-diagonal drive with flattened blocks for fast products.
struct Drive<'a> {
    scheme: &'a LevelScheme,
    flat: Vec<Vec<c64>>,
}

impl<'a> Drive<'a> {
    fn new(scheme: &'a LevelScheme) -> Self {
        let flat = scheme.blocks.iter().map(|b| b.values.iter().flatten().copied().collect()).collect();
        Self { scheme, flat }
    }

    /// out = V x with block coefficients `coef`.
    fn apply(&self, coef: &[c64], x: &[c64], out: &mut [c64]) {
        out.iter_mut().for_each(|z| *z = c64::new(0.0, 0.0));
        for ((b, s), &c) in self.scheme.blocks.iter().zip(&self.flat).zip(coef) {
            let nu = b.upper_index.len();
            for (i, &l) in b.lower_index.iter().enumerate() {
                let row = &s[i * nu..(i + 1) * nu];
                let xl = x[l];
                let mut acc = c64::new(0.0, 0.0);
                for (j, &u) in b.upper_index.iter().enumerate() {
                    acc += row[j] * x[u];
                    out[u] += (c * row[j]).conj() * xl;
                }
                out[l] += c * acc;
            }
        }
    }
}

fn norm(x: &[c64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Integrate from ψ₀ over [0, t_f] with symmetric splitting: half a step of
/// the diagonal, the drive exponential at the step midpoint (Taylor series
/// to machine precision), half a step of the diagonal.
pub fn evolve(scheme: &LevelScheme, tones: &[DriveTone], psi0: &[c64], tf: f64, opts: &EvolveOptions) -> Result<Trajectory> {
    if psi0.len() != scheme.len() {
        return Err(Error::config("initial state does not match the level scheme"));
    }
    if !(opts.dt > 0.0) || !(tf >= 0.0) || opts.record_every == 0 {
        return Err(Error::config("dt and record interval must be positive"));
    }
    if (norm(psi0) - 1.0).abs() > 1e-12 {
        return Err(Error::domain("initial state must be normalized"));
    }
    let frame = Frame::for_tones(tones);
    let steps = (tf / opts.dt).round() as usize;
    let dt = if steps > 0 { tf / steps as f64 } else { 0.0 };
    let half: Vec<c64> = diagonal(scheme, &frame).iter().map(|d| c64::from_polar(1.0, -0.5 * d * dt)).collect();
    let drive = Drive::new(scheme);
    let mut psi = psi0.to_vec();
    let mut term = vec![c64::new(0.0, 0.0); psi.len()];
    let mut next = term.clone();
    let mut traj = Trajectory { t: vec![0.0], populations: vec![populations(scheme, &psi)], norm: vec![1.0], final_state: vec![] };
    let mut coef = vec![c64::new(0.0, 0.0); scheme.blocks.len()];
    for k in 0..steps {
        let tm = (k as f64 + 0.5) * dt;
        for (c, b) in coef.iter_mut().zip(&scheme.blocks) {
            *c = block_coefficient(tones, &frame, b.step, tm);
        }
        psi.iter_mut().zip(&half).for_each(|(z, p)| *z *= p);
        term.copy_from_slice(&psi);
        let scale = norm(&psi);
        for order in 1..40 {
            drive.apply(&coef, &term, &mut next);
            let f = c64::new(0.0, -dt / order as f64);
            for (t, n) in term.iter_mut().zip(&next) {
                *t = f * n;
            }
            psi.iter_mut().zip(&term).for_each(|(z, t)| *z += t);
            if norm(&term) < 1e-17 * scale {
                break;
            }
        }
        psi.iter_mut().zip(&half).for_each(|(z, p)| *z *= p);
        if (k + 1) % opts.record_every == 0 || k + 1 == steps {
            let nrm = norm(&psi);
            if (nrm - 1.0).abs() > opts.norm_tolerance {
                return Err(Error::Accuracy { what: "norm drift; reduce the time step".into(), estimate: (nrm - 1.0).abs() });
            }
            traj.t.push((k + 1) as f64 * dt);
            traj.populations.push(populations(scheme, &psi));
            traj.norm.push(nrm * nrm);
        }
    }
    traj.final_state = psi;
    Ok(traj)
}
