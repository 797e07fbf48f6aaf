//! Finite-scale estimators, meant to be checked against the closed forms.

mod centers;
mod fit;
mod measures;
mod sets;

pub use centers::{select_centers, splitmix64, CenterPolicy, DEFAULT_MAX_CENTERS};
pub use fit::{ols, FitReport, MIN_SCALES};
pub use measures::{
    adjacent_square_ratio, doubling_profile, estimate_measure_spectrum, mass_ratio_profile, DoublingProfile,
    DoublingRow,
};
pub use sets::{
    estimate_assouad_dimension, estimate_assouad_spectrum, estimate_lower_spectrum, estimate_spectrum,
    fit_box_dimension, THETA_SWEEP,
};
