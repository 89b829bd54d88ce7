//! Paul-trap drive, Trotterized Floquet propagators, quasienergy spectra,
//! E_flo scans with crossing detection and Landau-Zener probabilities.

pub mod lz;
pub mod paul;
pub mod propagator;
pub mod scan;
pub mod spectrum;

pub use lz::{adiabaticity, lz_probability, oscillator_length};
pub use paul::{paul_operator, radial_parts, TrapDrive, TrapOrientation, Waveform};
pub use propagator::{floquet_propagator, floquet_propagator_direct, unitarity_defect};
pub use scan::{floquet_point, scan_eflo, CrossingRecord, FloquetOptions, FloquetPoint, FloquetScan};
pub use spectrum::{fold_quasienergy, identify_raim_state, quasienergy_spectrum, QuasiSpectrum, RaimIdentification};
