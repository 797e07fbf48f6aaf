//! Exact dimension formulas and root finding for the implicit ones.

mod affinity;
mod curve;
mod formulas;
mod report;
mod root;

pub use affinity::{affinity_dimension, affinity_dimension_of, singular_value_function, AffinityReport, AFFINITY_CAP};
pub use curve::{theta_grid, SpectrumCurve, SpectrumKind};
pub use formulas::{
    carpet_dimensions, carpet_measure_dimensions, carpet_spectrum, kleinian_dimensions, lalley_gatzouras_family,
    percolation_theory, self_similar_measure_dimensions, sequence_box_dimension, sequence_dimensions,
    sequence_spectrum, similarity_dimension, spectrum_bounds, spiral_dimensions, spiral_report, spiral_spectrum,
    spiral_winding_alpha_bound, KleinianDimensions, LalleyGatzouras, SpectrumBounds, WindingBounds,
};
pub use report::{DimKind, DimensionReport, LatticeViolation};
pub use root::{bisect_decreasing, ROOT_TOL};
