//! Sequence sets and polynomial spirals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::scalar::{lit, Scalar};

/// Default cutoff for sequence families.
pub const DEFAULT_N_MAX: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SequenceKind {
    /// `{0} ∪ {1/n^p}`.
    Polynomial { p: f64 },
    /// `{1/x : x ∈ X}` for a strictly increasing list of positive integers.
    Reciprocal { xs: Vec<u64> },
    /// `{0} ∪ {c^n}`.
    Geometric { c: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub kind: SequenceKind,
    pub n_max: u64,
}

impl SequenceSpec {
    pub fn polynomial(p: f64, n_max: u64) -> Self {
        Self {
            kind: SequenceKind::Polynomial { p },
            n_max,
        }
    }

    pub fn geometric(c: f64, n_max: u64) -> Self {
        Self {
            kind: SequenceKind::Geometric { c },
            n_max,
        }
    }

    /// Reciprocals of `xs`, keeping entries up to `n_max`.
    pub fn reciprocal(xs: Vec<u64>, n_max: u64) -> Self {
        Self {
            kind: SequenceKind::Reciprocal { xs },
            n_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max == 0 {
            return Err(Error::InvalidSpec("n_max must be positive".into()));
        }
        match &self.kind {
            SequenceKind::Polynomial { p } if !(*p > 0.0 && p.is_finite()) => {
                Err(Error::InvalidSpec(format!("exponent p = {p} must be > 0")))
            }
            SequenceKind::Geometric { c } if !(*c > 0.0 && *c < 1.0) => {
                Err(Error::InvalidSpec(format!("ratio c = {c} must lie in (0, 1)")))
            }
            SequenceKind::Reciprocal { xs } => {
                if xs.first() == Some(&0) {
                    return Err(Error::InvalidSpec("reciprocal set needs positive integers".into()));
                }
                if xs.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidSpec("X must be strictly increasing".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Generates the sequence set as a one-dimensional sample.
///
/// Resolution is `n_max^-p` for the polynomial kind and `c^n_max` for the
/// geometric kind. A reciprocal set built from a finite list is represented
/// exactly, so its resolution is 0.
pub fn generate_sequence<T: Scalar>(spec: &SequenceSpec) -> Result<PointSet<T>> {
    spec.validate()?;
    let n_max = spec.n_max;
    let (coords, resolution, label): (Vec<T>, T, String) = match &spec.kind {
        SequenceKind::Polynomial { p } => {
            let pt = lit::<T>(*p);
            let mut v: Vec<T> = (1..=n_max)
                .map(|n| lit::<T>(n as f64).powf(pt).recip())
                .collect();
            v.push(T::zero());
            (
                v,
                lit::<T>(n_max as f64).powf(pt).recip(),
                format!("polynomial sequence p={p}, n_max={n_max}"),
            )
        }
        SequenceKind::Geometric { c } => {
            let ct = lit::<T>(*c);
            let mut v: Vec<T> = Vec::with_capacity(n_max as usize + 1);
            let mut x = T::one();
            for _ in 0..n_max {
                x = x * ct;
                if x == T::zero() {
                    break;
                }
                v.push(x);
            }
            v.push(T::zero());
            let res = ct.powi(n_max.min(i32::MAX as u64) as i32);
            (v, res, format!("geometric sequence c={c}, n_max={n_max}"))
        }
        SequenceKind::Reciprocal { xs } => {
            let v: Vec<T> = xs
                .iter()
                .take_while(|&&x| x <= n_max)
                .map(|&x| lit::<T>(x as f64).recip())
                .collect();
            (v, T::zero(), format!("reciprocal set, {} terms", xs.len()))
        }
    };
    if coords.is_empty() {
        return Err(Error::EmptyOutput);
    }
    PointSet::dedup_from_flat(1, coords, resolution, label)
}

/// Polynomial spiral `x^-p e^{ix}` sampled at uniform angular steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpiralSpec {
    pub p: f64,
    pub x_max: f64,
    pub samples_per_turn: usize,
}

/// Smallest accepted angular sampling density.
pub const MIN_SAMPLES_PER_TURN: usize = 4;

impl SpiralSpec {
    pub fn new(p: f64, x_max: f64, samples_per_turn: usize) -> Self {
        Self {
            p,
            x_max,
            samples_per_turn,
        }
    }

    /// Spiral covering `turns` full turns starting at `x = 1`.
    pub fn with_turns(p: f64, turns: f64, samples_per_turn: usize) -> Self {
        Self::new(p, 1.0 + std::f64::consts::TAU * turns, samples_per_turn)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p.is_finite()) {
            return Err(Error::InvalidSpec(format!("exponent p = {} must be > 0", self.p)));
        }
        if self.samples_per_turn < MIN_SAMPLES_PER_TURN {
            return Err(Error::InvalidSpec(format!(
                "samples_per_turn must be at least {MIN_SAMPLES_PER_TURN}"
            )));
        }
        if !(self.x_max.is_finite() && self.x_max > 1.0) {
            return Err(Error::InvalidSpec("x_max must be finite and > 1".into()));
        }
        if self.sample_count() < self.samples_per_turn {
            return Err(Error::InvalidSpec(
                "x_max too small to complete one turn".into(),
            ));
        }
        Ok(())
    }

    fn sample_count(&self) -> usize {
        let steps = (self.x_max - 1.0) * self.samples_per_turn as f64 / std::f64::consts::TAU;
        (steps + 1e-9).floor() as usize
    }

    /// Parameter of sample `j` (1-based).
    pub fn parameter(&self, j: usize) -> f64 {
        1.0 + j as f64 * std::f64::consts::TAU / self.samples_per_turn as f64
    }
}

/// Samples the spiral at `x_j = 1 + 2πj / samples_per_turn`, `x_j ≤ x_max`.
///
/// Resolution is the longest chord between consecutive samples. The part of
/// the curve beyond `x_max` lies inside the disc of radius `x_max^-p` and is
/// not represented.
pub fn generate_spiral<T: Scalar>(spec: &SpiralSpec) -> Result<PointSet<T>> {
    spec.validate()?;
    let count = spec.sample_count();
    let p = lit::<T>(spec.p);
    let mut coords = Vec::with_capacity(2 * count);
    for j in 1..=count {
        let x = lit::<T>(spec.parameter(j));
        let rad = x.powf(-p);
        coords.push(rad * x.cos());
        coords.push(rad * x.sin());
    }
    let mut res = T::zero();
    for w in coords.chunks_exact(2).collect::<Vec<_>>().windows(2) {
        let chord = ((w[0][0] - w[1][0]).powi(2) + (w[0][1] - w[1][1]).powi(2)).sqrt();
        res = res.max(chord);
    }
    let label = format!(
        "spiral p={}, x_max={}, samples_per_turn={}",
        spec.p, spec.x_max, spec.samples_per_turn
    );
    PointSet::dedup_from_flat(2, coords, res, label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{mesh_count, DyadicScale};
    use std::f64::consts::PI;

    #[test]
    fn polynomial_small() {
        let s: PointSet<f64> = generate_sequence(&SequenceSpec::polynomial(1.0, 4)).unwrap();
        let mut v = s.coords().to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(v, vec![0.0, 0.25, 1.0 / 3.0, 0.5, 1.0]);
        assert_eq!(s.resolution(), 0.25);
    }

    #[test]
    fn geometric_small() {
        let s: PointSet<f64> = generate_sequence(&SequenceSpec::geometric(0.5, 3)).unwrap();
        let mut v = s.coords().to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(v, vec![0.0, 0.125, 0.25, 0.5]);
    }

    fn primes(limit: u64) -> Vec<u64> {
        (2..=limit)
            .filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect()
    }

    #[test]
    fn reciprocal_primes_mesh_matches_enumeration() {
        let ps = primes(100);
        assert_eq!(ps.len(), 25);
        let s: PointSet<f64> = generate_sequence(&SequenceSpec::reciprocal(ps.clone(), 100)).unwrap();
        assert_eq!(s.len(), 25);
        let mut cells: Vec<i64> = ps
            .iter()
            .map(|&q| (256.0 / q as f64).floor() as i64)
            .collect();
        // 1/2 is the maximum and sits on the lattice: it folds into the cell below.
        let top = cells.iter_mut().find(|c| **c == 128).unwrap();
        *top = 127;
        cells.sort();
        cells.dedup();
        let c = mesh_count(&s, DyadicScale::new(8)).unwrap();
        assert_eq!(c.count, cells.len());
    }

    #[test]
    fn invalid_sequences() {
        assert!(generate_sequence::<f64>(&SequenceSpec::polynomial(0.0, 4)).is_err());
        assert!(generate_sequence::<f64>(&SequenceSpec::geometric(1.0, 4)).is_err());
        assert!(generate_sequence::<f64>(&SequenceSpec::reciprocal(vec![3, 2], 4)).is_err());
    }

    #[test]
    fn polynomial_gaps_decrease() {
        let s: PointSet<f64> = generate_sequence(&SequenceSpec::polynomial(1.5, 500)).unwrap();
        let mut v = s.coords().to_vec();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let gaps: Vec<f64> = v[..v.len() - 1].windows(2).map(|w| w[0] - w[1]).collect();
        assert!(gaps.windows(2).all(|g| g[0] > g[1]));
    }

    #[test]
    fn spiral_four_samples() {
        let spec = SpiralSpec::with_turns(1.0, 1.0, 4);
        let s: PointSet<f64> = generate_spiral(&spec).unwrap();
        assert_eq!(s.len(), 4);
        let xs = [1.0 + PI / 2.0, 1.0 + PI, 1.0 + 1.5 * PI, 1.0 + 2.0 * PI];
        for (p, x) in s.points().zip(xs) {
            assert!((p[0] - x.cos() / x).abs() < 1e-15);
            assert!((p[1] - x.sin() / x).abs() < 1e-15);
        }
    }

    #[test]
    fn spiral_radii_match_parameter_and_decrease() {
        let spec = SpiralSpec::with_turns(0.5, 3.0, 64);
        let s: PointSet<f64> = generate_spiral(&spec).unwrap();
        let mut prev = f64::INFINITY;
        for (j, p) in s.points().enumerate() {
            let r = p[0].hypot(p[1]);
            let x = spec.parameter(j + 1);
            assert!((r - x.powf(-0.5)).abs() < 1e-14);
            assert!(r < prev);
            prev = r;
        }
    }

    #[test]
    fn spiral_needs_a_full_turn() {
        let err = generate_spiral::<f64>(&SpiralSpec::new(1.0, 4.0, 64)).unwrap_err();
        assert!(err.to_string().contains("one turn"));
    }
}
