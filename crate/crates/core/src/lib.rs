//! Simulation kernels for Rydberg atom-ion molecules in Paul traps.
//!
//! Everything runs in Hartree atomic units internally; see [`units`] for
//! conversions. Half-integer angular momenta are stored doubled.

pub mod atomcore;
pub mod dynamics;
pub mod error;
pub mod floquet;
pub mod franckcondon;
pub mod quadrature;
pub mod units;

pub use error::{Error, Result};
pub mod linalg;
pub mod modes;
pub mod parallel;
pub mod scaling;
pub mod starkmap;
