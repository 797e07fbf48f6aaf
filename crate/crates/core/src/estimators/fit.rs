use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{from_usize, Scalar};

/// Minimum number of scales in any fit.
pub const MIN_SCALES: usize = 4;

/// Result of a log-log slope fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport<T> {
    pub estimate: T,
    /// Dyadic exponents of the finest and coarsest scales used, `(k_min, k_max)`.
    pub scale_range: (u32, u32),
    /// RMS residual of the fit in natural-log units.
    pub residual: T,
    pub n_scales: usize,
    pub method: String,
    /// Fitted intercept; stands in for the multiplicative constant.
    pub intercept: T,
    /// Every count was equal, so the slope is reported as 0.
    pub flat: bool,
    /// Number of centers (or words) the extremum was taken over.
    pub centers: usize,
    /// For pair sweeps: the `(j, k)` scale pair giving the largest raw ratio.
    pub best_pair: Option<(u32, u32)>,
    /// For pair sweeps: `max log N / log(R/r)` over all pairs.
    pub raw_max: Option<T>,
    /// `(x, y)` samples that entered the fit.
    pub samples: Vec<(T, T)>,
    pub notes: Vec<String>,
}

/// Ordinary least squares `y = a + b x`: returns `(b, a, rms residual)`.
pub fn ols<T: Scalar>(xs: &[T], ys: &[T]) -> (T, T, T) {
    let n = from_usize::<T>(xs.len());
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxx = sxx + (x - mx) * (x - mx);
        sxy = sxy + (x - mx) * (y - my);
    }
    let b = if sxx > T::zero() { sxy / sxx } else { T::zero() };
    let a = my - b * mx;
    let ss: T = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let e = y - a - b * x;
            e * e
        })
        .sum();
    (b, a, (ss / n).sqrt())
}

/// Fits `log count` against `x` for each exponent `k`.
///
/// `samples` holds `(k, x, count)`. Counts of zero are rejected by the
/// callers before this point.
pub(crate) fn fit_counts<T: Scalar>(method: &str, samples: &[(u32, T, usize)], centers: usize) -> Result<FitReport<T>> {
    if samples.len() < MIN_SCALES {
        return Err(Error::TooFewScales {
            found: samples.len(),
            required: MIN_SCALES,
        });
    }
    let xs: Vec<T> = samples.iter().map(|s| s.1).collect();
    let ys: Vec<T> = samples.iter().map(|s| from_usize::<T>(s.2).ln()).collect();
    fit_logs(method, samples.iter().map(|s| s.0), xs, ys, centers)
}

pub(crate) fn fit_logs<T: Scalar>(
    method: &str,
    exponents: impl Iterator<Item = u32> + Clone,
    xs: Vec<T>,
    ys: Vec<T>,
    centers: usize,
) -> Result<FitReport<T>> {
    if xs.len() < MIN_SCALES {
        return Err(Error::TooFewScales {
            found: xs.len(),
            required: MIN_SCALES,
        });
    }
    let k_min = exponents.clone().min().unwrap_or(0);
    let k_max = exponents.max().unwrap_or(0);
    let flat = ys.iter().all(|&y| y == ys[0]);
    let (slope, intercept, residual) = if flat {
        (T::zero(), ys[0], T::zero())
    } else {
        ols(&xs, &ys)
    };
    let mut notes = Vec::new();
    if flat {
        notes.push("flat: every count is equal".to_string());
    }
    Ok(FitReport {
        estimate: slope,
        scale_range: (k_min, k_max),
        residual,
        n_scales: xs.len(),
        method: method.to_string(),
        intercept,
        flat,
        centers,
        best_pair: None,
        raw_max: None,
        samples: xs.into_iter().zip(ys).collect(),
        notes,
    })
}
