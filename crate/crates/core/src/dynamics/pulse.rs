use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid size of the normalization pass.
pub const NORMALIZATION_POINTS: usize = 10_000;

/// f(t) = |A e^{−(t−b)²/a} [1 + Σ_j c_j cos(ω_j t)]|, t in μs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrabPulse {
    pub amplitude: f64,
    /// Gaussian width parameter a (μs²).
    pub width: f64,
    /// Centre b (μs).
    pub centre: f64,
    pub coefficients: Vec<f64>,
    /// Component frequencies in MHz (ω_j = 2π×f_j).
    pub frequencies: Vec<f64>,
}

impl CrabPulse {
    /// Gaussian with the given width and centre and no modulation.
    pub fn gaussian(width: f64, centre: f64) -> Self {
        Self { amplitude: 1.0, width, centre, coefficients: vec![], frequencies: vec![] }
    }

    fn raw(&self, t: f64) -> f64 {
        let modulation: f64 = self
            .coefficients
            .iter()
            .zip(&self.frequencies)
            .map(|(c, f)| c * (2.0 * std::f64::consts::PI * f * t).cos())
            .sum();
        (self.amplitude * (-(t - self.centre).powi(2) / self.width).exp() * (1.0 + modulation)).abs()
    }

    /// Envelope value.
    pub fn value(&self, t: f64) -> f64 {
        self.raw(t)
    }

    /// Rescale A so the maximum over an evenly spaced grid on [0, t_f] is 1.
    pub fn normalized(mut self, tf: f64) -> Result<Self> {
        if !(self.width > 0.0) || !(tf > 0.0) {
            return Err(Error::config("CRAB width and duration must be positive"));
        }
        if self.coefficients.len() != self.frequencies.len() {
            return Err(Error::config("CRAB coefficient and frequency counts differ"));
        }
        self.amplitude = 1.0;
        let n = NORMALIZATION_POINTS;
        let peak = (0..=n).map(|i| self.raw(tf * i as f64 / n as f64)).fold(0.0, f64::max);
        if !(peak > 0.0) {
            return Err(Error::Numerical("CRAB envelope vanishes on the protocol window".into()));
        }
        self.amplitude = 1.0 / peak;
        Ok(self)
    }
}

/// Pulse envelope with unit maximum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Envelope {
    Square,
    Crab(CrabPulse),
}

impl Envelope {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Envelope::Square => 1.0,
            Envelope::Crab(p) => p.value(t),
        }
    }
}

/// One laser tone: Rabi frequency Ω (MHz, ω = 2π×f), frequency relative to
/// the bare electronic transition (rad/μs) and envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriveTone {
    pub rabi: f64,
    pub frequency: f64,
    pub envelope: Envelope,
}

impl DriveTone {
    /// Ω f(t) in rad/μs.
    pub fn amplitude(&self, t: f64) -> f64 {
        2.0 * std::f64::consts::PI * self.rabi * self.envelope.value(t)
    }
}
