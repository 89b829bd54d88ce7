use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::evolve::{evolve, ground_state, EvolveOptions, Trajectory};
use crate::dynamics::pulse::{CrabPulse, DriveTone, Envelope};
use crate::dynamics::scheme::LevelScheme;
use crate::error::{Error, Result};
use crate::modes::Configuration;

/// Blockade target: gg,0000 → gR,0010.
pub const BLOCKADE_TARGET: [u32; 4] = [0, 0, 1, 0];
/// Anti-blockade second photon: gR,0010 → RR,0001.
pub const ANTIBLOCKADE_TARGET: [u32; 4] = [0, 0, 0, 1];

/// Tone frequencies (rad/μs) resonant with the blockade and anti-blockade
/// transitions.
pub fn resonant_frequencies(scheme: &LevelScheme) -> Result<(f64, f64)> {
    let w1 = scheme.resonance(Configuration::Gg, &[0; 4], Configuration::Gr, &BLOCKADE_TARGET)?;
    let w2 = scheme.resonance(Configuration::Gr, &BLOCKADE_TARGET, Configuration::Rr, &ANTIBLOCKADE_TARGET)?;
    Ok((w1, w2))
}

/// C = |P_gg − ½| + P_gR + |P_RR − ½| from configuration populations.
pub fn cost(populations: &[f64; 4]) -> f64 {
    (populations[0] - 0.5).abs() + populations[1] + (populations[3] - 0.5).abs()
}

/// Square single-tone pulse resonant with gg,0000 → gR,0010.
pub fn blockade(scheme: &LevelScheme, rabi_mhz: f64, tf: f64, opts: &EvolveOptions) -> Result<Trajectory> {
    let (w1, _) = resonant_frequencies(scheme)?;
    let tones = [DriveTone { rabi: rabi_mhz, frequency: w1, envelope: Envelope::Square }];
    evolve(scheme, &tones, &ground_state(scheme)?, tf, opts)
}

/// Two-stage random search settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Rabi frequencies of the two tones (MHz).
    pub rabi: [f64; 2],
    pub tf: f64,
    /// Cosine components per pulse.
    pub components: usize,
    pub draws: usize,
    pub seed: u64,
    /// First-stage Gaussian widths a (μs²) and centres b (μs).
    pub widths: Vec<f64>,
    pub centres: Vec<f64>,
    /// c_j drawn from [−c, c].
    pub coefficient_range: f64,
    /// Component frequencies drawn from this range (MHz).
    pub frequency_range: [f64; 2],
    pub evolve: EvolveOptions,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            rabi: [0.153, 0.14],
            tf: 10.0,
            components: 3,
            draws: 200,
            seed: 42,
            widths: vec![4.0, 8.0, 16.0, 32.0, 64.0],
            centres: vec![3.0, 4.0, 5.0, 6.0, 7.0],
            coefficient_range: 0.5,
            frequency_range: [0.05, 2.0],
            evolve: EvolveOptions::default(),
        }
    }
}

/// Search outcome: best pulse pair, its trajectory and the per-draw costs.
#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    pub pulses: [CrabPulse; 2],
    pub cost: f64,
    pub draw: usize,
    pub costs: Vec<f64>,
    /// First-stage (a, b).
    pub envelope: (f64, f64),
    pub trajectory: Trajectory,
}

impl SearchResult {
    /// Tones evaluated for the winning draw.
    pub fn tones(&self, scheme: &LevelScheme, rabi: [f64; 2]) -> Result<[DriveTone; 2]> {
        tones(scheme, rabi, &self.pulses)
    }
}

fn tones(scheme: &LevelScheme, rabi: [f64; 2], pulses: &[CrabPulse; 2]) -> Result<[DriveTone; 2]> {
    let (w1, w2) = resonant_frequencies(scheme)?;
    Ok([
        DriveTone { rabi: rabi[0], frequency: w1, envelope: Envelope::Crab(pulses[0].clone()) },
        DriveTone { rabi: rabi[1], frequency: w2, envelope: Envelope::Crab(pulses[1].clone()) },
    ])
}

fn run(scheme: &LevelScheme, pulses: &[CrabPulse; 2], opts: &SearchOptions) -> Result<Trajectory> {
    let tones = tones(scheme, opts.rabi, pulses)?;
    evolve(scheme, &tones, &ground_state(scheme)?, opts.tf, &opts.evolve)
}

fn random_pulse(rng: &mut ChaCha8Rng, a: f64, b: f64, opts: &SearchOptions) -> Result<CrabPulse> {
    let c = opts.coefficient_range;
    let [f0, f1] = opts.frequency_range;
    let coefficients = (0..opts.components).map(|_| rng.random_range(-c..=c)).collect();
    let frequencies = (0..opts.components).map(|_| rng.random_range(f0..=f1)).collect();
    CrabPulse { amplitude: 1.0, width: a, centre: b, coefficients, frequencies }.normalized(opts.tf)
}

/// Draw `index` of the search; its RNG stream depends only on (seed, index).
pub fn draw_pulses(seed: u64, index: usize, a: f64, b: f64, opts: &SearchOptions) -> Result<[CrabPulse; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    Ok([random_pulse(&mut rng, a, b, opts)?, random_pulse(&mut rng, a, b, opts)?])
}

/// First stage: shared Gaussian (a, b) for both tones on a grid, minimizing
/// the end-of-pulse single-excitation population with no modulation.
pub fn envelope_stage(scheme: &LevelScheme, opts: &SearchOptions) -> Result<(f64, f64)> {
    let grid: Vec<(f64, f64)> = opts.widths.iter().flat_map(|&a| opts.centres.iter().map(move |&b| (a, b))).collect();
    if grid.is_empty() {
        return Err(Error::config("empty envelope grid"));
    }
    let scores = crate::parallel::map(&grid, |&(a, b)| -> Result<f64> {
        let p = CrabPulse::gaussian(a, b).normalized(opts.tf)?;
        let pop = run(scheme, &[p.clone(), p], opts)?.final_populations();
        Ok(pop[1] + pop[2])
    });
    let mut best = (f64::INFINITY, grid[0]);
    for (s, g) in scores.into_iter().zip(&grid) {
        let s = s?;
        if s < best.0 {
            best = (s, *g);
        }
    }
    Ok(best.1)
}

/// Two-stage anti-blockade optimization. Draws are independent and reduced
/// by index, so the result does not depend on the thread count.
pub fn optimize_antiblockade(scheme: &LevelScheme, opts: &SearchOptions) -> Result<SearchResult> {
    if opts.draws == 0 {
        return Err(Error::config("at least one draw is required"));
    }
    let (a, b) = envelope_stage(scheme, opts)?;
    let draws: Vec<usize> = (0..opts.draws).collect();
    let results = crate::parallel::map(&draws, |&i| -> Result<([CrabPulse; 2], Trajectory)> {
        let pulses = draw_pulses(opts.seed, i, a, b, opts)?;
        let traj = run(scheme, &pulses, opts)?;
        Ok((pulses, traj))
    });
    let mut best: Option<(usize, f64, [CrabPulse; 2], Trajectory)> = None;
    let mut costs = Vec::with_capacity(opts.draws);
    for (i, r) in results.into_iter().enumerate() {
        let (pulses, traj) = r?;
        let c = cost(&traj.final_populations());
        costs.push(c);
        if best.as_ref().is_none_or(|b| c < b.1) {
            best = Some((i, c, pulses, traj));
        }
    }
    let (draw, cost, pulses, trajectory) = best.expect("at least one draw");
    Ok(SearchResult { pulses, cost, draw, costs, envelope: (a, b), trajectory })
}
