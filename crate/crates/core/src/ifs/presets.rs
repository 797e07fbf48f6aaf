//! Named systems used throughout the examples and tests.

use super::affine::IfsSpec;
use super::carpet::CarpetSpec;
use super::measure::WeightedMeasureSpec;
use crate::error::Result;
use crate::scalar::{lit, Scalar};

/// Middle-third Cantor set: `x/3`, `x/3 + 2/3`.
pub fn cantor<T: Scalar>() -> IfsSpec<T> {
    let third = lit::<T>(1.0) / lit(3.0);
    IfsSpec::similarities_1d(&[third, third], &[T::zero(), lit::<T>(2.0) / lit(3.0)])
        .expect("valid system")
}

/// Overlapping system `αx`, `βx`, `γx + 1 - γ` on the unit interval.
pub fn overlapping_line<T: Scalar>(alpha: T, beta: T, gamma: T) -> Result<IfsSpec<T>> {
    IfsSpec::similarities_1d(&[alpha, beta, gamma], &[T::zero(), T::zero(), T::one() - gamma])
}

/// Carpet with `m = 2`, `n = 3`, two cells in the first column and one in the second.
pub fn two_three_carpet() -> CarpetSpec {
    CarpetSpec::new(2, 3, vec![(0, 0), (0, 2), (1, 1)]).expect("valid carpet")
}

/// Carpet with `m = 3`, `n = 5`: one cell in column 0, three in column 2.
///
/// Columns are not adjacent and cells in a column are not stacked, so the
/// very strong separation condition holds.
pub fn three_five_carpet() -> CarpetSpec {
    CarpetSpec::new(3, 5, vec![(0, 2), (2, 0), (2, 2), (2, 4)]).expect("valid carpet")
}

/// Weight `ε` on the lone cell, `(1 - ε)/3` on each of the others.
pub fn three_five_measure<T: Scalar>(epsilon: T) -> Result<WeightedMeasureSpec<T>> {
    let rest = (T::one() - epsilon) / lit(3.0);
    WeightedMeasureSpec::carpet(three_five_carpet(), vec![epsilon, rest, rest, rest])
}

/// Carpet with `m = 2`, `n = 4` and cells `(0,0)`, `(1,0)`, `(0,3)`. It has
/// adjacent columns and supports no doubling self-affine measure.
pub fn two_four_carpet() -> CarpetSpec {
    CarpetSpec::new(2, 4, vec![(0, 0), (1, 0), (0, 3)]).expect("valid carpet")
}

/// Weights in cell order `(0,0)`, `(1,0)`, `(0,3)`.
pub fn two_four_measure<T: Scalar>(p00: T, p10: T, p03: T) -> Result<WeightedMeasureSpec<T>> {
    WeightedMeasureSpec::carpet(two_four_carpet(), vec![p00, p10, p03])
}

/// Horizontally adjacent words of length `2k` for [`two_four_carpet`] at
/// scale `4^-k`: `(1,0)^{k+1} (0,0)^{k-1}` and `(1,0)^k (0,0) (1,0)^{k-1}`.
///
/// Their approximate squares share an edge and their mass ratio is
/// `((p_(0,0) + p_(0,3)) / p_(1,0))^{k-2}`.
pub fn two_four_witness_words(k: usize) -> (Vec<usize>, Vec<usize>) {
    let mut d = vec![1; k + 1];
    d.extend(std::iter::repeat_n(0, k.saturating_sub(1)));
    let mut e = vec![1; k];
    e.push(0);
    e.extend(std::iter::repeat_n(1, k.saturating_sub(1)));
    (d, e)
}
