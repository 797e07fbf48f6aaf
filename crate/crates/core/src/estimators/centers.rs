use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sup_distance, PointSet};
use crate::scalar::{lit, Scalar};

/// Default number of hashed centers.
pub const DEFAULT_MAX_CENTERS: usize = 4096;

/// Which points serve as ball centers.
///
/// `Hashed` keeps the `max_centers` points with the smallest seeded hash of
/// their coordinate bits, so the choice does not depend on point order.
/// Subsampling biases Assouad-type estimates down and lower-type ones up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "lowercase")]
pub enum CenterPolicy {
    Hashed { max_centers: usize, seed: u64 },
    All,
    Explicit { points: Vec<Vec<f64>> },
}

impl Default for CenterPolicy {
    fn default() -> Self {
        CenterPolicy::Hashed {
            max_centers: DEFAULT_MAX_CENTERS,
            seed: 0,
        }
    }
}

/// SplitMix64 finaliser.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn point_hash<T: Scalar>(p: &[T], seed: u64) -> u64 {
    p.iter()
        .fold(splitmix64(seed), |h, x| splitmix64(h ^ x.exact_bits()))
}

/// Center coordinates under `policy`, flattened row-major.
pub fn select_centers<T: Scalar>(set: &PointSet<T>, policy: &CenterPolicy) -> Result<Vec<Vec<T>>> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    match policy {
        CenterPolicy::All => Ok(set.points().map(|p| p.to_vec()).collect()),
        CenterPolicy::Hashed { max_centers, seed } => {
            if *max_centers == 0 {
                return Err(Error::NoValidCenters);
            }
            if set.len() <= *max_centers {
                return Ok(set.points().map(|p| p.to_vec()).collect());
            }
            let mut keyed: Vec<(u64, usize)> = set
                .points()
                .enumerate()
                .map(|(i, p)| (point_hash(p, *seed), i))
                .collect();
            keyed.select_nth_unstable(*max_centers - 1);
            keyed.truncate(*max_centers);
            keyed.sort_unstable();
            Ok(keyed.into_iter().map(|(_, i)| set.point(i).to_vec()).collect())
        }
        CenterPolicy::Explicit { points } => {
            if points.is_empty() {
                return Err(Error::NoValidCenters);
            }
            let tol = set.resolution();
            points
                .iter()
                .map(|c| {
                    if c.len() != set.dim() {
                        return Err(Error::DimensionMismatch {
                            expected: set.dim(),
                            found: c.len(),
                        });
                    }
                    let c: Vec<T> = c.iter().map(|&x| lit::<T>(x)).collect();
                    if set.points().any(|p| sup_distance(p, &c) <= tol) {
                        Ok(c)
                    } else {
                        Err(Error::CenterOffSet)
                    }
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hashed_is_order_independent() {
        let pts: Vec<f64> = (0..100).map(|i| i as f64 / 100.0).collect();
        let mut rev = pts.clone();
        rev.reverse();
        let a = PointSet::from_flat(1, pts, 0.01, "a").unwrap();
        let b = PointSet::from_flat(1, rev, 0.01, "b").unwrap();
        let policy = CenterPolicy::Hashed { max_centers: 10, seed: 7 };
        let ca = select_centers(&a, &policy).unwrap();
        assert_eq!(ca.len(), 10);
        assert_eq!(ca, select_centers(&b, &policy).unwrap());
        let other = select_centers(&a, &CenterPolicy::Hashed { max_centers: 10, seed: 8 }).unwrap();
        assert_ne!(ca, other);
    }

    #[test]
    fn explicit_centers_must_lie_on_set() {
        let s = PointSet::from_flat(1, vec![0.0f64, 0.5], 0.0, "s").unwrap();
        assert!(select_centers(&s, &CenterPolicy::Explicit { points: vec![vec![0.5]] }).is_ok());
        assert_eq!(
            select_centers(&s, &CenterPolicy::Explicit { points: vec![vec![0.25]] }),
            Err(Error::CenterOffSet)
        );
    }
}
