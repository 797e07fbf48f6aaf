use std::ops::Deref;

use serde::{Deserialize, Serialize};

use super::affine::{chaos_game, IfsSpec};
use super::carpet::{ApproxSquare, CarpetSpec};
use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::scalar::{from_usize, lit, Scalar};

/// Finite word over the map alphabet. The empty word is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CylinderWord {
    pub letters: Vec<usize>,
}

impl CylinderWord {
    pub fn new(letters: Vec<usize>) -> Self {
        Self { letters }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn concat(&self, other: &[usize]) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(other);
        Self { letters }
    }
}

impl Deref for CylinderWord {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.letters
    }
}

impl From<Vec<usize>> for CylinderWord {
    fn from(letters: Vec<usize>) -> Self {
        Self { letters }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureBase<T> {
    Ifs(IfsSpec<T>),
    Carpet(CarpetSpec),
}

/// Self-similar or self-affine measure: a base system plus Bernoulli weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedMeasureSpec<T> {
    base: MeasureBase<T>,
    weights: Vec<T>,
}

impl<T: Scalar> WeightedMeasureSpec<T> {
    pub fn new(base: MeasureBase<T>, weights: Vec<T>) -> Result<Self> {
        let alphabet = match &base {
            MeasureBase::Ifs(ifs) => ifs.len(),
            MeasureBase::Carpet(c) => c.total(),
        };
        if weights.len() != alphabet {
            return Err(Error::DimensionMismatch {
                expected: alphabet,
                found: weights.len(),
            });
        }
        if weights.iter().any(|&p| !(p > T::zero())) {
            return Err(Error::InvalidSpec("weights must be strictly positive".into()));
        }
        let sum: T = weights.iter().copied().sum();
        let tol = lit::<T>(1e-12).max(T::epsilon() * from_usize::<T>(4 * alphabet));
        if (sum - T::one()).abs() > tol {
            return Err(Error::InvalidSpec(format!("weights sum to {sum}, not 1")));
        }
        Ok(Self { base, weights })
    }

    pub fn ifs(ifs: IfsSpec<T>, weights: Vec<T>) -> Result<Self> {
        Self::new(MeasureBase::Ifs(ifs), weights)
    }

    pub fn carpet(spec: CarpetSpec, weights: Vec<T>) -> Result<Self> {
        Self::new(MeasureBase::Carpet(spec), weights)
    }

    /// Carpet with equal weights on every cell.
    pub fn uniform_carpet(spec: CarpetSpec) -> Self {
        let n = spec.total();
        let w = vec![from_usize::<T>(n).recip(); n];
        Self::carpet(spec, w).expect("uniform weights are valid")
    }

    pub fn base(&self) -> &MeasureBase<T> {
        &self.base
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn alphabet_len(&self) -> usize {
        self.weights.len()
    }

    pub fn as_carpet(&self) -> Option<&CarpetSpec> {
        match &self.base {
            MeasureBase::Carpet(c) => Some(c),
            MeasureBase::Ifs(_) => None,
        }
    }

    /// The base system as a general IFS.
    pub fn to_ifs(&self) -> IfsSpec<T> {
        match &self.base {
            MeasureBase::Ifs(ifs) => ifs.clone(),
            MeasureBase::Carpet(c) => c.to_ifs(),
        }
    }

    /// Column masses `P(i) = sum of p_(i, j)` for a carpet base, one per column.
    pub fn column_masses(&self) -> Option<Vec<T>> {
        let c = self.as_carpet()?;
        let mut out = vec![T::zero(); c.m() as usize];
        for (&(i, _), &p) in c.cells().iter().zip(&self.weights) {
            out[i as usize] = out[i as usize] + p;
        }
        Some(out)
    }

    /// Sampled points of the measure by random iteration.
    pub fn chaos_game(&self, n_points: usize, seed: u64) -> Result<PointSet<T>> {
        chaos_game(&self.to_ifs(), &self.weights, n_points, seed)
    }
}

/// `μ([w]) = p_{w_1} ... p_{w_k}`; the empty word has mass 1.
pub fn cylinder_mass<T: Scalar>(measure: &WeightedMeasureSpec<T>, word: &[usize]) -> Result<T> {
    let n = measure.alphabet_len();
    let mut mass = T::one();
    for &letter in word {
        let p = measure
            .weights
            .get(letter)
            .ok_or(Error::InvalidLetter { letter, alphabet: n })?;
        mass = mass * *p;
    }
    Ok(mass)
}

/// Mass of an approximate square: cell weights up to `l_2`, column masses
/// from `l_2 + 1` to `l_1`. Non-admissible squares carry no mass.
///
/// Panics when the measure is not carried by a carpet.
pub fn approx_square_mass<T: Scalar>(measure: &WeightedMeasureSpec<T>, square: &ApproxSquare) -> T {
    let spec = measure
        .as_carpet()
        .expect("approximate squares need a carpet measure");
    let columns = measure.column_masses().expect("carpet base");
    let mut mass = T::one();
    for l in 0..square.l2 {
        match spec.cell_index(square.columns[l], square.rows[l]) {
            Some(k) => mass = mass * measure.weights[k],
            None => return T::zero(),
        }
    }
    for l in square.l2..square.l1 {
        mass = mass * columns[square.columns[l] as usize];
    }
    mass
}
