use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::root::bisect_decreasing;
use crate::error::{Error, Result};
use crate::ifs::{max_depth_under_cap, IfsSpec};
use crate::linalg::{mat_mul, singular_values};
use crate::scalar::{from_usize, Scalar};

/// Default bound on the number of words enumerated at the deepest level.
pub const AFFINITY_CAP: usize = 1 << 20;

/// Per-level roots of `Σ_{|w| = k} φ^s(A_w) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinityReport<T> {
    /// Root at the deepest level.
    pub dimension: T,
    /// `trace[k - 1]` is the root at level `k`.
    pub trace: Vec<T>,
}

/// Singular value function `φ^s`, with `s > d` handled through `|det|^{s/d}`.
pub fn singular_value_function<T: Scalar>(sv: &[T], s: T) -> T {
    let d = sv.len();
    let dd = from_usize::<T>(d);
    if s >= dd {
        let det: T = sv.iter().copied().fold(T::one(), |a, b| a * b);
        return det.powf(s / dd);
    }
    let whole = s.floor().to_usize().unwrap_or(0);
    let frac = s - s.floor();
    let mut v = T::one();
    for &x in &sv[..whole] {
        v = v * x;
    }
    if frac > T::zero() {
        v = v * sv[whole].powf(frac);
    }
    v
}

/// Affinity dimension approximated at levels `1..=k_max`.
///
/// `matrices` are row-major `d x d` linear parts. The deepest level may not
/// hold more than `cap` words.
pub fn affinity_dimension<T: Scalar>(
    matrices: &[Vec<T>],
    d: usize,
    k_max: usize,
    cap: usize,
) -> Result<AffinityReport<T>> {
    if matrices.is_empty() || k_max == 0 || d == 0 {
        return Err(Error::InvalidSpec("need at least one matrix, d >= 1 and k_max >= 1".into()));
    }
    for a in matrices {
        if a.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                found: a.len(),
            });
        }
        if !(singular_values(a, d)[0] < T::one()) {
            return Err(Error::OutOfRange("every matrix must be a strict contraction".into()));
        }
    }
    let words = (matrices.len() as u128).checked_pow(k_max as u32);
    if words.is_none_or(|w| w > cap as u128) {
        return Err(Error::CapExceeded {
            requested: words.unwrap_or(u128::MAX),
            cap,
            suggestion: Some(max_depth_under_cap(matrices.len(), cap)),
        });
    }

    let mut level: Vec<Vec<T>> = matrices.to_vec();
    let mut trace = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        if k > 1 {
            level = level
                .par_iter()
                .flat_map_iter(|w| matrices.iter().map(move |a| mat_mul(w, a, d)))
                .collect();
        }
        let svs: Vec<Vec<T>> = level.par_iter().map(|a| singular_values(a, d)).collect();
        let root = bisect_decreasing(|s| {
            svs.par_iter().map(|sv| singular_value_function(sv, s)).sum::<T>() - T::one()
        });
        trace.push(root);
    }
    Ok(AffinityReport {
        dimension: *trace.last().expect("k_max >= 1"),
        trace,
    })
}

/// [`affinity_dimension`] on the linear parts of an IFS.
pub fn affinity_dimension_of<T: Scalar>(ifs: &IfsSpec<T>, k_max: usize) -> Result<AffinityReport<T>> {
    let mats: Vec<Vec<T>> = ifs.maps().iter().map(|m| m.linear().to_vec()).collect();
    affinity_dimension(&mats, ifs.dim(), k_max, AFFINITY_CAP)
}
