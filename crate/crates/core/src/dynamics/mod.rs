//! Driven electronic×phonon dynamics: level scheme, rotating-frame
//! Hamiltonian, unitary integration and the blockade and anti-blockade
//! protocols.

mod evolve;
mod optimize;
mod pulse;
mod scheme;

pub use evolve::{evolve, ground_state, hamiltonian, populations, EvolveOptions, Frame, Trajectory};
pub use optimize::{
    blockade, cost, draw_pulses, envelope_stage, optimize_antiblockade, resonant_frequencies, SearchOptions,
    SearchResult, ANTIBLOCKADE_TARGET, BLOCKADE_TARGET,
};
pub use pulse::{CrabPulse, DriveTone, Envelope, NORMALIZATION_POINTS};
pub use scheme::{build_level_scheme, excitation, CouplingBlock, LevelScheme, LevelState};
