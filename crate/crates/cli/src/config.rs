use std::path::{Path, PathBuf};

use raimsim::dynamics::EvolveOptions;
use raimsim::floquet::{TrapOrientation, Waveform};
use raimsim::franckcondon::{default_wavenumber, FockCutoff, QuadratureOptions};
use raimsim::modes::SystemGeometry;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Environment variable naming the directory searched for relative config paths.
pub const CONFIG_DIR_VAR: &str = "RAIMSIM_CONFIG_DIR";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AtomSection {
    pub species: String,
    pub ion: String,
    /// Quantum-defect table; the bundled ⁸⁷Rb table when absent.
    pub defects: Option<PathBuf>,
}

impl Default for AtomSection {
    fn default() -> Self {
        Self { species: "Rb87".into(), ion: "Be9".into(), defects: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrapSection {
    pub q: f64,
    pub omega_rf_mhz: f64,
    pub waveform: WaveformName,
    pub orientation: TrapOrientation,
    pub steps: usize,
    /// Adiabatic states kept in the Floquet problem.
    pub subspace: usize,
}

impl Default for TrapSection {
    fn default() -> Self {
        Self {
            q: 0.1,
            omega_rf_mhz: 150.0,
            waveform: WaveformName::Sinusoidal,
            orientation: TrapOrientation::Radial,
            steps: 8000,
            subspace: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum WaveformName {
    Sinusoidal,
    Digital,
}

impl From<WaveformName> for Waveform {
    fn from(w: WaveformName) -> Self {
        match w {
            WaveformName::Sinusoidal => Waveform::Sinusoidal,
            WaveformName::Digital => Waveform::Digital,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OverlapSection {
    pub k_per_um: f64,
    pub bus_total: u32,
    pub high_max: u32,
    pub order: usize,
    pub verify: bool,
}

impl Default for OverlapSection {
    fn default() -> Self {
        let q = QuadratureOptions::default();
        let c = FockCutoff::default();
        Self { k_per_um: default_wavenumber(), bus_total: c.bus_total, high_max: c.high_max, order: q.order, verify: q.verify }
    }
}

impl OverlapSection {
    pub fn cutoff(&self) -> FockCutoff {
        FockCutoff { bus_total: self.bus_total, high_max: self.high_max }
    }

    pub fn quadrature(&self) -> QuadratureOptions {
        QuadratureOptions { order: self.order, verify: self.verify, ..Default::default() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsSection {
    pub omega1_mhz: f64,
    pub omega2_mhz: f64,
    pub tf_us: f64,
    pub dt_ns: f64,
    pub record_every: usize,
    pub draws: usize,
    pub np: usize,
    pub seed: u64,
}

impl Default for DynamicsSection {
    fn default() -> Self {
        Self { omega1_mhz: 0.153, omega2_mhz: 0.14, tf_us: 10.0, dt_ns: 1.0, record_every: 10, draws: 200, np: 3, seed: 42 }
    }
}

impl DynamicsSection {
    pub fn evolve(&self) -> EvolveOptions {
        EvolveOptions { dt: self.dt_ns * 1e-3, record_every: self.record_every, ..Default::default() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from(".") }
    }
}

/// Everything a run depends on. Command-line flags are folded in before the
/// hash is taken, so the hash identifies the run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub atom: AtomSection,
    pub trap: TrapSection,
    #[serde(default = "SystemGeometry::reference")]
    pub geometry: SystemGeometry,
    pub overlaps: OverlapSection,
    pub dynamics: DynamicsSection,
    pub output: OutputSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            atom: AtomSection::default(),
            trap: TrapSection::default(),
            geometry: SystemGeometry::reference(),
            overlaps: OverlapSection::default(),
            dynamics: DynamicsSection::default(),
            output: OutputSection::default(),
        }
    }
}

/// Resolve a config path: as given if it exists, otherwise relative to
/// `$RAIMSIM_CONFIG_DIR`.
pub fn locate(path: &Path) -> PathBuf {
    if path.is_relative() && !path.exists() {
        if let Some(dir) = std::env::var_os(CONFIG_DIR_VAR) {
            let candidate = Path::new(&dir).join(path);
            if candidate.exists() {
                return candidate;
            }
        }
    }
    path.to_path_buf()
}

fn read(path: &Path) -> Result<(PathBuf, String), CliError> {
    let path = locate(path);
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    Ok((path, text))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let (path, text) = read(path)?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Replace the geometry by a file holding either the bare fields or a
    /// `[geometry]` table.
    pub fn load_geometry(&mut self, path: &Path) -> Result<(), CliError> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Wrapped {
            geometry: SystemGeometry,
        }
        let (path, text) = read(path)?;
        let geometry = match toml::from_str::<Wrapped>(&text) {
            Ok(w) => w.geometry,
            Err(_) => toml::from_str::<SystemGeometry>(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?,
        };
        geometry.validate().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        self.geometry = geometry;
        Ok(())
    }

    /// SHA-256 over the effective config and the command description.
    /// Output locations do not affect results and are left out.
    pub fn hash(&self, command: &str) -> String {
        let mut c = self.clone();
        c.output = OutputSection::default();
        let text = toml::to_string(&c).expect("config serializes");
        let digest = Sha256::new().chain_update(command.as_bytes()).chain_update(b"\n").chain_update(text.as_bytes()).finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
