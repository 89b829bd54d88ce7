//! `raimsim`: Stark maps, Floquet scans, critical-parameter maps, crystal
//! modes, Franck-Condon tables and driven blockade dynamics from the command
//! line. Every CSV starts with a comment header carrying the tool version,
//! a SHA-256 of the effective configuration and the unit of each column.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod output;

use config::{RunConfig, WaveformName};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
    Core(raimsim::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 1,
            CliError::Core(e) if e.is_config() => 2,
            CliError::Core(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<raimsim::Error> for CliError {
    fn from(e: raimsim::Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Parser, Debug)]
#[command(name = "raimsim", version, about = "Rydberg atom-ion molecules in Paul traps")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML run configuration; relative paths fall back to $RAIMSIM_CONFIG_DIR.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory receiving all output files.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads (default: available cores). Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Adiabatic potential curves of H_TI over a core-ion distance grid.
    StarkMap(StarkMapArgs),
    /// E_flo scan with avoided-crossing detection.
    FloquetScan(FloquetArgs),
    /// Landau-Zener analysis of crossings in a two-level digital trap.
    LzDigital(FloquetArgs),
    /// n_crit versus Ω_rf from the closed-form scaling laws.
    CritMap(CritMapArgs),
    /// Normal modes of the four electronic configurations.
    Modes(GeometryArgs),
    /// Franck-Condon tables of the four single-photon transitions.
    Overlaps(OverlapArgs),
    /// Single-tone blockade protocol.
    Blockade(BlockadeArgs),
    /// Two-tone anti-blockade protocol with pulse optimization.
    Antiblockade(AntiblockadeArgs),
    /// Data behind a published figure.
    Repro(ReproArgs),
}

#[derive(Args, Debug)]
pub struct StarkMapArgs {
    #[arg(long)]
    pub species: Option<String>,
    #[arg(long)]
    pub ion: Option<String>,
    #[arg(long, default_value_t = 50)]
    pub n: u32,
    /// Reference state, e.g. P1/2; its lowest |m_j| sector is diagonalized.
    #[arg(long, default_value = "P1/2")]
    pub state: String,
    /// Grid in nm.
    #[arg(long)]
    pub rmin: f64,
    #[arg(long)]
    pub rmax: f64,
    #[arg(long)]
    pub step: f64,
    #[arg(long, default_value = "curves.csv")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct FloquetArgs {
    #[arg(long)]
    pub drive: Option<WaveformName>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub omega_rf_mhz: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// radial or axial
    #[arg(long, value_parser = commands::parse_orientation)]
    pub orientation: Option<raimsim::floquet::TrapOrientation>,
    #[arg(long, default_value_t = 22)]
    pub n: u32,
    /// lo:hi:step in nm (an `nm` suffix is accepted).
    #[arg(long, default_value = "184:186:0.01nm")]
    pub window: String,
    #[arg(long)]
    pub subspace: Option<usize>,
    #[arg(long, default_value = "eflo.csv")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct CritMapArgs {
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub ion: Option<String>,
    /// lo:hi in MHz.
    #[arg(long, default_value = "1:1000")]
    pub omega_range_mhz: String,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    #[arg(long, default_value = "critmap.csv")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct GeometryArgs {
    /// Geometry file (bare fields or a [geometry] table).
    #[arg(long)]
    pub geometry: Option<PathBuf>,
    #[arg(long, default_value = "modes.csv")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SchemeArgs {
    #[arg(long)]
    pub geometry: Option<PathBuf>,
    /// Effective laser wavenumber in μm⁻¹.
    #[arg(long)]
    pub k_per_um: Option<f64>,
    /// Fock cutoff, e.g. `bus=3,high=1`.
    #[arg(long)]
    pub cutoff_spec: Option<String>,
    /// Gauss-Hermite nodes per mode.
    #[arg(long)]
    pub order: Option<usize>,
    /// Skip the quadrature-order check.
    #[arg(long)]
    pub no_verify: bool,
}

#[derive(Args, Debug)]
pub struct OverlapArgs {
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long, default_value = "overlaps.csv")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct BlockadeArgs {
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long)]
    pub omega1_mhz: Option<f64>,
    #[arg(long)]
    pub tf_us: Option<f64>,
    #[arg(long)]
    pub dt_ns: Option<f64>,
    #[arg(long, default_value = "traj.csv")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct AntiblockadeArgs {
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long)]
    pub omega1_mhz: Option<f64>,
    #[arg(long)]
    pub omega2_mhz: Option<f64>,
    #[arg(long)]
    pub tf_us: Option<f64>,
    #[arg(long)]
    pub dt_ns: Option<f64>,
    #[arg(long)]
    pub draws: Option<usize>,
    #[arg(long)]
    pub np: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Trajectory and pulse files.
    #[arg(long, num_args = 2, value_names = ["TRAJ", "PULSES"], default_values = ["traj.csv", "pulses.csv"])]
    pub out: Vec<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReproArgs {
    #[arg(value_enum)]
    pub figure: Figure,
    /// Principal quantum numbers for figS3.
    #[arg(long, value_delimiter = ',', default_values_t = [20u32, 25, 30, 35, 40, 45, 50])]
    pub n_list: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    #[value(name = "fig2e")]
    Fig2e,
    #[value(name = "fig3a")]
    Fig3a,
    #[value(name = "fig3b")]
    Fig3b,
    #[value(name = "figS3")]
    FigS3,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(d) = &cli.common.out_dir {
        cfg.output.dir = d.clone();
    }
    if let Some(w) = cli.common.workers {
        if w == 0 {
            return Err(CliError::Config("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot size the worker pool: {e}")))?;
    }
    match cli.command {
        Command::StarkMap(a) => commands::stark_map(cfg, &a),
        Command::FloquetScan(a) => commands::floquet_scan(cfg, &a),
        Command::LzDigital(a) => commands::lz_digital(cfg, &a),
        Command::CritMap(a) => commands::crit_map(cfg, &a),
        Command::Modes(a) => commands::modes(cfg, &a),
        Command::Overlaps(a) => commands::overlaps(cfg, &a),
        Command::Blockade(a) => commands::blockade(cfg, &a),
        Command::Antiblockade(a) => commands::antiblockade(cfg, &a),
        Command::Repro(a) => commands::repro(cfg, &a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("raimsim: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
