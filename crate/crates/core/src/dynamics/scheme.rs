use std::collections::HashMap;

use faer::c64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::franckcondon::{FockLabel, OverlapTable};
use crate::modes::{Configuration, ModeSpectrum};

/// Number of laser photons absorbed to reach a configuration.
pub fn excitation(c: Configuration) -> usize {
    c.rydberg().iter().filter(|b| **b).count()
}

/// One electronic×phonon basis state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelState {
    pub configuration: Configuration,
    pub label: FockLabel,
    /// Σ n_k ω_k in rad/μs.
    pub phonon: f64,
}

/// Overlap prefactors between two configurations, S[lower][upper].
#[derive(Debug, Clone)]
pub struct CouplingBlock {
    pub lower: Configuration,
    pub upper: Configuration,
    /// 1 for gg ↔ single, 2 for single ↔ RR.
    pub step: usize,
    pub lower_index: Vec<usize>,
    pub upper_index: Vec<usize>,
    pub values: Vec<Vec<c64>>,
}

/// Level scheme of the four configurations over a common Fock cutoff.
#[derive(Debug, Clone)]
pub struct LevelScheme {
    pub states: Vec<LevelState>,
    pub blocks: Vec<CouplingBlock>,
    /// Mode frequencies (MHz) per configuration.
    pub frequencies: HashMap<Configuration, Vec<f64>>,
    index: HashMap<(Configuration, FockLabel), usize>,
}

fn phonon_energy(freqs: &[f64], n: &FockLabel) -> f64 {
    2.0 * std::f64::consts::PI * freqs.iter().zip(n).map(|(f, k)| f * *k as f64).sum::<f64>()
}

impl LevelScheme {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index(&self, c: Configuration, n: &FockLabel) -> Option<usize> {
        self.index.get(&(c, *n)).copied()
    }

    /// Σ n_k ω_k of (c, n) in rad/μs, also for labels outside the scheme.
    pub fn phonon(&self, c: Configuration, n: &FockLabel) -> Result<f64> {
        let f = self
            .frequencies
            .get(&c)
            .ok_or_else(|| Error::config(format!("no {} spectrum in the scheme", c.label())))?;
        Ok(phonon_energy(f, n))
    }

    /// Laser frequency (rad/μs, relative to the bare electronic transition)
    /// resonant with (lower, n) → (upper, m).
    pub fn resonance(&self, lower: Configuration, n: &FockLabel, upper: Configuration, m: &FockLabel) -> Result<f64> {
        if excitation(upper) != excitation(lower) + 1 {
            return Err(Error::config("resonance must add one excitation"));
        }
        Ok(self.phonon(upper, m)? - self.phonon(lower, n)?)
    }
}

/// Assemble the scheme from the four spectra and the four overlap tables.
pub fn build_level_scheme(spectra: &[ModeSpectrum], tables: &[OverlapTable]) -> Result<LevelScheme> {
    let first = tables.first().ok_or_else(|| Error::config("no overlap tables"))?;
    let labels = &first.states;
    if tables.iter().any(|t| &t.states != labels) {
        return Err(Error::config("overlap tables use different Fock cutoffs"));
    }
    let mut frequencies = HashMap::new();
    for s in spectra {
        frequencies.insert(s.configuration, s.frequencies.clone());
    }
    let mut states = Vec::new();
    let mut index = HashMap::new();
    for c in Configuration::ALL {
        let f = frequencies
            .get(&c)
            .ok_or_else(|| Error::config(format!("missing {} spectrum", c.label())))?;
        for n in labels {
            index.insert((c, *n), states.len());
            states.push(LevelState { configuration: c, label: *n, phonon: phonon_energy(f, n) });
        }
    }
    let mut blocks = Vec::new();
    for t in tables {
        let step = excitation(t.target);
        if excitation(t.source) + 1 != step {
            return Err(Error::config(format!(
                "table {}→{} does not add one excitation",
                t.source.label(),
                t.target.label()
            )));
        }
        blocks.push(CouplingBlock {
            lower: t.source,
            upper: t.target,
            step,
            lower_index: labels.iter().map(|n| index[&(t.source, *n)]).collect(),
            upper_index: labels.iter().map(|n| index[&(t.target, *n)]).collect(),
            values: t.values.clone(),
        });
    }
    Ok(LevelScheme { states, blocks, frequencies, index })
}
