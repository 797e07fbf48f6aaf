//! Covering numbers, Assouad-type dimensions and their spectra.

// Range checks are written `!(x > lo)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_form;
pub mod error;
pub mod estimators;
pub mod families;
pub mod geometry;
pub mod ifs;
pub mod io;
mod linalg;
pub mod percolation;
pub mod scalar;

pub use error::{default_cap, Error, Result};
pub use geometry::{CountMethod, CountReport, DyadicScale, MeshIndex, PointSet};
pub use scalar::Scalar;

pub type PointSet64 = PointSet<f64>;
pub type PointSet32 = PointSet<f32>;
pub type IfsSpec64 = ifs::IfsSpec<f64>;
pub type IfsSpec32 = ifs::IfsSpec<f32>;
pub type WeightedMeasure64 = ifs::WeightedMeasureSpec<f64>;
pub type WeightedMeasure32 = ifs::WeightedMeasureSpec<f32>;
