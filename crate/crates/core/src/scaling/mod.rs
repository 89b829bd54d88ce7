//! Power-law fits of well properties and closed-form critical parameters.

pub mod critical;
pub mod fit;
pub mod moments;

pub use critical::{chi, coupling, crit_map, n_crit, photon_number, single_photon_boundary, CritRow, PowerLaw, ScalingConstants, TrapParameters};
pub use fit::{fit_power_law, fit_prefactor, PowerLawFit};
pub use moments::{transition_moments, CoupledPair, MomentOptions, TransitionMoments};
pub mod survey;
pub use survey::{fit_survey, survey_level, SurveyFits, SurveyOptions, SurveyRow};
