//! Iterated function systems, grid carpets and their Bernoulli measures.

mod affine;
mod carpet;
mod measure;
pub mod presets;
mod spec_file;

pub use affine::{
    attractor_by_depth, attractor_by_depth_with, chaos_game, check_strong_separation,
    max_depth_under_cap, AffineMap, IfsSpec, MapKind, SeedChoice, SeparationReport, BURN_IN,
    SIMILARITY_TOL,
};
pub use carpet::{
    approx_square, carpet_attractor, carpet_attractor_with_cap, level_for_scale, ApproxSquare,
    CarpetSpec,
};
pub use measure::{approx_square_mass, cylinder_mass, CylinderWord, MeasureBase, WeightedMeasureSpec};
pub use spec_file::{parse_system, system_to_json, LoadedSystem};
