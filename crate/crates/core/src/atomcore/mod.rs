//! Quantum-defect levels, radial wavefunctions and angular algebra.

pub mod angular;
pub mod basis;
pub mod defects;
pub mod level;
pub mod radial;
pub mod species;
pub mod wigner;

pub use angular::angular_matrix_element;
pub use basis::{build_basis, BasisSet};
pub use defects::{parse_half_integer, DefectChannel, QuantumDefectTable};
pub use level::{effective_numbers, level_energy, RydbergLevel};
pub use radial::{radial_integral, radial_wavefunction, RadialFunction, RadialGrid};
pub use wigner::{wigner3j, wigner6j};
