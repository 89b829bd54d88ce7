//! Atom-ion Stark maps: multipole Hamiltonian, adiabatic curves, wells and
//! environment corrections.

pub mod environment;
pub mod multipole;
pub mod scan;
pub mod well;

pub use multipole::{build_multipole, MultipoleOperator};
pub use scan::{assemble_hti, diagonalize_scan, diagonalize_scan_in, reference_energy, PotentialCurveSet};
pub use well::{find_well, locate_well, vibrational_states, LocatedWell, WellDescriptor, WellSearch};
pub use environment::{environment_terms, AxialOrientation, Environment};
