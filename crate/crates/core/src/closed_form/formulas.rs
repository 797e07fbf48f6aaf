use serde::{Deserialize, Serialize};

use super::report::{DimKind, DimensionReport};
use super::root::bisect_decreasing;
use crate::error::{Error, Result};
use crate::ifs::{CarpetSpec, WeightedMeasureSpec};
use crate::scalar::{from_usize, lit, Scalar};

const UNASSERTED: &str = "separation condition not asserted by caller; formulas evaluated regardless";

fn check_theta<T: Scalar>(theta: T) -> Result<()> {
    if theta > T::zero() && theta < T::one() {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("theta = {theta} must lie in (0, 1)")))
    }
}

fn check_positive<T: Scalar>(name: &str, x: T) -> Result<()> {
    if x > T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("{name} = {x} must be positive")))
    }
}

/// Root `s` of `Σ c_i^s = 1` (Hutchinson–Moran). May exceed the ambient dimension.
pub fn similarity_dimension<T: Scalar>(ratios: &[T]) -> Result<T> {
    if ratios.is_empty() {
        return Err(Error::InvalidSpec("at least one ratio is required".into()));
    }
    if ratios.iter().any(|&c| !(c > T::zero() && c < T::one())) {
        return Err(Error::OutOfRange("similarity ratios must lie in (0, 1)".into()));
    }
    Ok(bisect_decreasing(|s| {
        ratios.iter().map(|&c| c.powf(s)).sum::<T>() - T::one()
    }))
}

// ---------------------------------------------------------------------------
// Bedford–McMullen carpets

struct CarpetLogs<T> {
    log_m: T,
    log_n: T,
    n0: T,
    total: T,
    n_max: T,
    n_min: T,
}

impl<T: Scalar> CarpetLogs<T> {
    fn new(spec: &CarpetSpec) -> Self {
        Self {
            log_m: lit::<T>(f64::from(spec.m())).ln(),
            log_n: lit::<T>(f64::from(spec.n())).ln(),
            n0: from_usize::<T>(spec.nonempty_columns()),
            total: from_usize::<T>(spec.total()),
            n_max: from_usize::<T>(spec.max_column()),
            n_min: from_usize::<T>(spec.min_column()),
        }
    }

    fn with_fibre(&self, fibre: T) -> T {
        self.n0.ln() / self.log_m + fibre.ln() / self.log_n
    }

    fn box_dim(&self) -> T {
        self.n0.ln() / self.log_m + (self.total / self.n0).ln() / self.log_n
    }

    fn rho(&self) -> T {
        self.log_m / self.log_n
    }
}

/// Lower, Hausdorff, box, quasi-Assouad and Assouad dimensions of a carpet.
pub fn carpet_dimensions<T: Scalar>(spec: &CarpetSpec) -> DimensionReport<T> {
    const TAG: &str = "bedford-mcmullen carpet formula";
    let c = CarpetLogs::<T>::new(spec);
    let rho = c.rho();
    let hausdorff = spec
        .column_counts()
        .into_iter()
        .filter(|&k| k > 0)
        .map(|k| from_usize::<T>(k).powf(rho))
        .sum::<T>()
        .ln()
        / c.log_m;
    let assouad = c.with_fibre(c.n_max);
    let mut r = DimensionReport::default();
    r.set(DimKind::Lower, c.with_fibre(c.n_min), TAG)
        .set(DimKind::Hausdorff, hausdorff, TAG)
        .set_box(c.box_dim(), TAG)
        .set(DimKind::QuasiAssouad, assouad, TAG)
        .set(DimKind::Assouad, assouad, TAG);
    r
}

/// `(assouad, lower)` spectra of a carpet at `theta`, with the phase
/// transition at `log m / log n`.
pub fn carpet_spectrum<T: Scalar>(spec: &CarpetSpec, theta: T) -> Result<(T, T)> {
    check_theta(theta)?;
    let c = CarpetLogs::<T>::new(spec);
    if theta >= c.rho() {
        return Ok((c.with_fibre(c.n_max), c.with_fibre(c.n_min)));
    }
    let branch = |fibre: T| {
        let slope = (c.total / fibre).ln() / c.log_m + fibre.ln() / c.log_n;
        (c.box_dim() - theta * slope) / (T::one() - theta)
    };
    Ok((branch(c.n_max), branch(c.n_min)))
}

// ---------------------------------------------------------------------------
// Sequences and spirals

/// Box dimension `1 / (1 + p)` of `{n^-p}`.
pub fn sequence_box_dimension<T: Scalar>(p: T) -> T {
    (T::one() + p).recip()
}

/// `min{1 / ((1 + p)(1 - θ)), 1}`.
pub fn sequence_spectrum<T: Scalar>(p: T, theta: T) -> Result<T> {
    check_positive("p", p)?;
    check_theta(theta)?;
    Ok((((T::one() + p) * (T::one() - theta)).recip()).min(T::one()))
}

/// Full report for the polynomial sequence set.
pub fn sequence_dimensions<T: Scalar>(p: T) -> Result<DimensionReport<T>> {
    check_positive("p", p)?;
    let mut r = DimensionReport::default();
    r.set(DimKind::Lower, T::zero(), "isolated points")
        .set(DimKind::Hausdorff, T::zero(), "countable set")
        .set_box(sequence_box_dimension(p), "polynomial sequence box formula")
        .set(DimKind::QuasiAssouad, T::one(), "polynomial sequence spectrum limit")
        .set(DimKind::Assouad, T::one(), "polynomial sequence spectrum limit");
    Ok(r)
}

/// Box dimension of the spiral `x ↦ x^-p e^{ix}`: `2 / (1 + p)` for `p < 1`, else 1.
pub fn spiral_dimensions<T: Scalar>(p: T) -> Result<T> {
    check_positive("p", p)?;
    Ok(if p < T::one() {
        lit::<T>(2.0) / (T::one() + p)
    } else {
        T::one()
    })
}

/// Assouad spectrum of the spiral.
pub fn spiral_spectrum<T: Scalar>(p: T, theta: T) -> Result<T> {
    check_positive("p", p)?;
    check_theta(theta)?;
    let two = lit::<T>(2.0);
    let one = T::one();
    let v = if p <= one {
        two / ((one + p) * (one - theta))
    } else {
        one + theta / (p * (one - theta))
    };
    Ok(v.min(two))
}

/// Spiral report: box from [`spiral_dimensions`], Assouad and quasi-Assouad 2.
pub fn spiral_report<T: Scalar>(p: T) -> Result<DimensionReport<T>> {
    let two = lit::<T>(2.0);
    let mut r = DimensionReport::default();
    r.set_box(spiral_dimensions(p)?, "spiral box formula")
        .set(DimKind::QuasiAssouad, two, "spiral spectrum limit")
        .set(DimKind::Assouad, two, "spiral spectrum limit");
    Ok(r)
}

/// Upper bounds on the winding exponent α of a bi-Hölder image of the spiral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingBounds<T> {
    /// From box dimension alone: `(p + 1) / 2`.
    pub box_bound: T,
    /// From the Assouad spectrum: `(pβ + β) / (p + 2β)`.
    pub spectrum_bound: T,
    /// Sharp: `pβ / (p + β)`.
    pub sharp_bound: T,
}

pub fn spiral_winding_alpha_bound<T: Scalar>(p: T, beta: T) -> Result<WindingBounds<T>> {
    check_positive("p", p)?;
    if !(beta >= T::one()) {
        return Err(Error::OutOfRange(format!("beta = {beta} must be at least 1")));
    }
    let two = lit::<T>(2.0);
    Ok(WindingBounds {
        box_bound: (p + T::one()) / two,
        spectrum_bound: (p * beta + beta) / (p + two * beta),
        sharp_bound: p * beta / (p + beta),
    })
}

// ---------------------------------------------------------------------------
// Limit sets and measures

/// Dimensions of a geometrically finite Kleinian limit set and its
/// Patterson–Sullivan measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KleinianDimensions<T> {
    pub limit_set: DimensionReport<T>,
    pub measure: DimensionReport<T>,
}

pub fn kleinian_dimensions<T: Scalar>(
    delta: T,
    k_min: u32,
    k_max: u32,
    d: u32,
    has_parabolic: bool,
) -> Result<KleinianDimensions<T>> {
    const TAG: &str = "kleinian parabolic rank formula";
    if !(delta > T::zero()) || delta > lit::<T>(f64::from(d)) {
        return Err(Error::OutOfRange(format!("delta = {delta} must lie in (0, d]")));
    }
    let mut set = DimensionReport::default();
    let mut mu = DimensionReport::default();
    if !has_parabolic {
        for r in [&mut set, &mut mu] {
            for kind in DimKind::ALL {
                r.set(kind, delta, "critical exponent, no parabolics");
            }
        }
        return Ok(KleinianDimensions { limit_set: set, measure: mu });
    }
    if !(1 <= k_min && k_min <= k_max && k_max <= d) {
        return Err(Error::OutOfRange(format!(
            "need 1 <= k_min ({k_min}) <= k_max ({k_max}) <= d ({d})"
        )));
    }
    let (kmin, kmax) = (lit::<T>(f64::from(k_min)), lit::<T>(f64::from(k_max)));
    if !(delta > kmax / lit::<T>(2.0)) {
        return Err(Error::OutOfRange(format!("delta = {delta} must exceed k_max / 2")));
    }
    let two_delta = delta + delta;
    set.set(DimKind::Lower, kmin.min(delta), TAG)
        .set(DimKind::Hausdorff, delta, "critical exponent")
        .set_box(delta, "critical exponent")
        .set(DimKind::Assouad, kmax.max(delta), TAG);
    mu.set(DimKind::Lower, kmin.min(two_delta - kmax), TAG)
        .set(DimKind::Hausdorff, delta, "critical exponent")
        .set(DimKind::Assouad, kmax.max(two_delta - kmin), TAG);
    Ok(KleinianDimensions { limit_set: set, measure: mu })
}

/// Self-similar measure with ratios `c_i` and weights `p_i`: Assouad and box
/// are `max log p_i / log c_i`, lower is the min, Hausdorff is
/// `Σ p_i log p_i / Σ p_i log c_i`.
pub fn self_similar_measure_dimensions<T: Scalar>(
    ratios: &[T],
    weights: &[T],
    separation_asserted: bool,
) -> Result<DimensionReport<T>> {
    const TAG: &str = "self-similar measure formula";
    if ratios.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: ratios.len(),
            found: weights.len(),
        });
    }
    if ratios.is_empty() {
        return Err(Error::InvalidSpec("at least one map is required".into()));
    }
    if ratios.iter().any(|&c| !(c > T::zero() && c < T::one())) || weights.iter().any(|&p| !(p > T::zero())) {
        return Err(Error::OutOfRange("ratios must lie in (0, 1) and weights be positive".into()));
    }
    let local: Vec<T> = ratios.iter().zip(weights).map(|(&c, &p)| p.ln() / c.ln()).collect();
    let max = local.iter().copied().fold(T::neg_infinity(), T::max);
    let min = local.iter().copied().fold(T::infinity(), T::min);
    let num: T = weights.iter().map(|&p| p * p.ln()).sum();
    let den: T = ratios.iter().zip(weights).map(|(&c, &p)| p * c.ln()).sum();
    let mut r = DimensionReport::default();
    r.set(DimKind::Lower, min, TAG)
        .set(DimKind::Hausdorff, num / den, "entropy over lyapunov exponent")
        .set_box(max, TAG)
        .set(DimKind::Assouad, max, TAG);
    if !separation_asserted {
        r.flag(UNASSERTED);
    }
    Ok(r)
}

/// Self-affine measure on a carpet.
///
/// Hausdorff dimension is `h(μ)/log n + (log n - log m)/log n · dim πμ`,
/// with `dim πμ = H(P)/log m` for the projected column measure.
pub fn carpet_measure_dimensions<T: Scalar>(
    measure: &WeightedMeasureSpec<T>,
    separation_asserted: bool,
) -> Result<DimensionReport<T>> {
    const TAG: &str = "carpet measure formula";
    let spec = measure
        .as_carpet()
        .ok_or_else(|| Error::InvalidSpec("measure is not carried by a carpet".into()))?;
    let columns = measure.column_masses().expect("carpet base");
    let log_m = lit::<T>(f64::from(spec.m())).ln();
    let log_n = lit::<T>(f64::from(spec.n())).ln();
    let mut col_a = T::neg_infinity();
    let mut col_l = T::infinity();
    let mut fib_a = T::neg_infinity();
    let mut fib_l = T::infinity();
    let mut cell_max = T::neg_infinity();
    for (&(i, _), &p) in spec.cells().iter().zip(measure.weights()) {
        let big_p = columns[i as usize];
        let col = (big_p.recip()).ln();
        let fib = (big_p / p).ln();
        col_a = col_a.max(col);
        col_l = col_l.min(col);
        fib_a = fib_a.max(fib);
        fib_l = fib_l.min(fib);
        cell_max = cell_max.max(p.recip().ln());
    }
    let entropy: T = measure.weights().iter().map(|&p| -p * p.ln()).sum();
    let column_entropy: T = columns
        .iter()
        .filter(|&&q| q > T::zero())
        .map(|&q| -q * q.ln())
        .sum();
    let projection = column_entropy / log_m;
    let hausdorff = entropy / log_n + (log_n - log_m) / log_n * projection;
    let box_dim = col_a * (log_m.recip() - log_n.recip()) + cell_max / log_n;
    let mut r = DimensionReport::default();
    r.set(DimKind::Lower, col_l / log_m + fib_l / log_n, TAG)
        .set(DimKind::Hausdorff, hausdorff, "ledrappier-young formula")
        .set_box(box_dim, TAG)
        .set(DimKind::Assouad, col_a / log_m + fib_a / log_n, TAG);
    if !separation_asserted {
        r.flag(UNASSERTED);
    }
    Ok(r)
}

// ---------------------------------------------------------------------------
// Lalley–Gatzouras family

/// Dimensions of the three-map Lalley–Gatzouras family `F_λ`, with its spectra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LalleyGatzouras<T> {
    pub lambda: T,
    pub report: DimensionReport<T>,
    /// `log 3 / (-log λ)`, where both spectra reach their plateaus.
    pub transition: T,
}

pub fn lalley_gatzouras_family<T: Scalar>(lambda: T) -> Result<LalleyGatzouras<T>> {
    const TAG: &str = "lalley-gatzouras family formula";
    let third = lit::<T>(3.0).recip();
    if !(lambda > T::zero() && lambda <= third) {
        return Err(Error::OutOfRange(format!("lambda = {lambda} must lie in (0, 1/3]")));
    }
    let (ln2, ln3) = (lit::<T>(2.0).ln(), lit::<T>(3.0).ln());
    let mut report = DimensionReport::default();
    if (lambda - third).abs() <= T::epsilon() {
        for kind in DimKind::ALL {
            report.set(kind, T::one(), "self-similar case");
        }
        return Ok(LalleyGatzouras {
            lambda,
            report,
            transition: T::one(),
        });
    }
    let neg_log = -lambda.ln();
    let base = ln2 / ln3;
    let hausdorff = (lit::<T>(2.0).powf(ln3 / neg_log) + T::one()).ln() / ln3;
    let assouad = base + ln2 / neg_log;
    report
        .set(DimKind::Lower, base, TAG)
        .set(DimKind::Hausdorff, hausdorff, TAG)
        .set_box(base + (lit::<T>(1.5)).ln() / neg_log, TAG)
        .set(DimKind::QuasiAssouad, assouad, TAG)
        .set(DimKind::Assouad, assouad, TAG);
    report.flag("spectra are the displayed adaptation of the carpet spectra, not independently derived");
    Ok(LalleyGatzouras {
        lambda,
        report,
        transition: ln3 / neg_log,
    })
}

impl<T: Scalar> LalleyGatzouras<T> {
    /// `(assouad, lower)` spectra at `theta`.
    pub fn spectrum(&self, theta: T) -> Result<(T, T)> {
        check_theta(theta)?;
        let a = self.report.assouad.expect("set");
        let l = self.report.lower.expect("set");
        if theta > self.transition || self.transition >= T::one() {
            return Ok((a, l));
        }
        let (ln2, ln3) = (lit::<T>(2.0).ln(), lit::<T>(3.0).ln());
        let neg_log = -self.lambda.ln();
        let b = self.report.box_upper.expect("set");
        let one = T::one();
        let slope = lit::<T>(1.5).ln() / ln3 + ln2 / neg_log;
        Ok(((b - theta * slope) / (one - theta), (b - theta) / (one - theta)))
    }
}

// ---------------------------------------------------------------------------
// Percolation and generic bounds

/// Almost-sure dimensions of supercritical Mandelbrot percolation in `[0,1]^d`
/// with subdivision `m` and retention `p`.
pub fn percolation_theory<T: Scalar>(d: u32, m: u32, p: T) -> Result<DimensionReport<T>> {
    if d == 0 || m < 2 || !(p <= T::one()) {
        return Err(Error::OutOfRange("need d >= 1, m >= 2 and p <= 1".into()));
    }
    let dd = lit::<T>(f64::from(d));
    let lm = lit::<T>(f64::from(m)).ln();
    let critical = (-dd * lm).exp();
    if !(p > critical) {
        return Err(Error::Subcritical {
            p: p.to_f64().unwrap_or(f64::NAN),
            critical: critical.to_f64().unwrap_or(f64::NAN),
        });
    }
    let b = dd + p.ln() / lm;
    let mut r = DimensionReport::default();
    r.set(DimKind::Hausdorff, b, "percolation almost-sure formula")
        .set_box(b, "percolation almost-sure formula")
        .set(DimKind::QuasiAssouad, b, "percolation spectrum equals box")
        .set(DimKind::Assouad, dd, "percolation almost-sure formula");
    r.flag("almost-sure values conditioned on non-extinction");
    Ok(r)
}

/// Bounds on the Assouad spectrum from box and quasi-Assouad dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumBounds<T> {
    pub lower: T,
    pub upper: T,
    /// `min{box + (1-ρ)θ/((1-θ)ρ) · (qA - box), qA}`.
    pub generic: T,
}

/// General bounds at `theta`, where `rho` is the phase transition (the
/// smallest `θ` with spectrum equal to `qA`).
pub fn spectrum_bounds<T: Scalar>(box_upper: T, quasi_assouad: T, rho: T, theta: T) -> Result<SpectrumBounds<T>> {
    check_theta(theta)?;
    if !(rho > T::zero() && rho < T::one()) {
        return Err(Error::OutOfRange(format!("rho = {rho} must lie in (0, 1)")));
    }
    if !(box_upper >= T::zero() && box_upper <= quasi_assouad) {
        return Err(Error::InvalidSpec(format!(
            "need 0 <= box ({box_upper}) <= quasi-Assouad ({quasi_assouad})"
        )));
    }
    let one = T::one();
    if quasi_assouad > T::zero() && rho < one - box_upper / quasi_assouad {
        return Err(Error::InvalidSpec(format!(
            "rho = {rho} is below 1 - box/qA, incompatible with the given dimensions"
        )));
    }
    let upper = (box_upper / (one - theta)).min(quasi_assouad);
    let lower = if theta < rho {
        box_upper.max((one - rho) / (one - theta) * quasi_assouad)
    } else {
        quasi_assouad
    };
    let generic = (box_upper
        + (one - rho) * theta / ((one - theta) * rho) * (quasi_assouad - box_upper))
        .min(quasi_assouad);
    Ok(SpectrumBounds { lower, upper, generic })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::presets;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn hutchinson_moran_examples() {
        let s: f64 = similarity_dimension(&[1.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert!(close(s, 2f64.ln() / 3f64.ln(), 1e-11));
        let s: f64 = similarity_dimension(&[1.0 / 3.0, 0.5, 0.125]).unwrap();
        assert!(close(s, 0.9582, 1e-4));
        let s: f64 = similarity_dimension(&[0.5, 0.5, 0.5, 1.0 / 3.0]).unwrap();
        assert!(close(s, 1.7999, 1e-4));
        assert!(similarity_dimension::<f64>(&[]).is_err());
        assert!(similarity_dimension::<f64>(&[1.0]).is_err());
    }

    #[test]
    fn worked_carpet() {
        let r: DimensionReport<f64> = carpet_dimensions(&presets::three_five_carpet());
        assert!(close(r.lower.unwrap(), 0.6309, 1e-4));
        assert!(close(r.hausdorff.unwrap(), 1.0347, 1e-4));
        assert!(close(r.box_dim().unwrap(), 1.0616, 1e-4));
        assert!(close(r.assouad.unwrap(), 1.3135, 1e-4));
        assert!(r.check_lattice(1e-12).is_ok());
    }

    #[test]
    fn two_three_carpet_hand_values() {
        let r: DimensionReport<f64> = carpet_dimensions(&presets::two_three_carpet());
        let l3 = 3f64.ln();
        assert!(close(r.assouad.unwrap(), 1.0 + 2f64.ln() / l3, 1e-12));
        assert!(close(r.lower.unwrap(), 1.0, 1e-12));
        assert!(close(r.box_dim().unwrap(), 1.0 + 1.5f64.ln() / l3, 1e-12));
    }

    #[test]
    fn uniform_fibres_coincide() {
        let spec = CarpetSpec::new(2, 3, vec![(0, 0), (0, 2), (1, 0), (1, 1)]).unwrap();
        let r: DimensionReport<f64> = carpet_dimensions(&spec);
        let a = r.assouad.unwrap();
        for k in DimKind::ALL {
            assert!(close(r.get(k).unwrap(), a, 1e-12), "{k:?}");
        }
    }

    #[test]
    fn carpet_spectrum_against_generic_form() {
        let spec = presets::three_five_carpet();
        let dims: DimensionReport<f64> = carpet_dimensions(&spec);
        let rho = 3f64.ln() / 5f64.ln();
        let (a, _) = carpet_spectrum(&spec, 0.2).unwrap();
        let g = spectrum_bounds(dims.box_dim().unwrap(), dims.assouad.unwrap(), rho, 0.2).unwrap();
        assert!(close(a, g.generic, 1e-12));
        let (a, l) = carpet_spectrum(&spec, rho).unwrap();
        assert_eq!((a, l), (dims.assouad.unwrap(), dims.lower.unwrap()));
        let (a, l) = carpet_spectrum(&spec, rho * (1.0 - 1e-12)).unwrap();
        assert!(close(a, dims.assouad.unwrap(), 1e-9) && close(l, dims.lower.unwrap(), 1e-9));
        assert!(carpet_spectrum(&spec, 1.0f64).is_err());
    }

    #[test]
    fn sequence_values() {
        assert_eq!(sequence_spectrum(1.0f64, 0.5).unwrap(), 1.0);
        assert!(close(sequence_spectrum(1.0f64, 1e-9).unwrap(), 0.5, 1e-8));
        assert_eq!(sequence_spectrum(3.0f64, 0.5).unwrap(), 0.5);
        assert!(sequence_dimensions(1.0f64).unwrap().check_lattice(0.0).is_ok());
    }

    #[test]
    fn spiral_values() {
        assert!(close(spiral_dimensions(0.5f64).unwrap(), 4.0 / 3.0, 1e-15));
        assert_eq!(spiral_spectrum(2.0f64, 0.5).unwrap(), 1.5);
        assert_eq!(spiral_spectrum(2.0f64, 2.0 / 3.0).unwrap(), 2.0);
        assert_eq!(spiral_spectrum(2.0f64, 0.9).unwrap(), 2.0);
        let b = spiral_winding_alpha_bound(1.0f64, 1.0).unwrap();
        assert_eq!((b.box_bound, b.spectrum_bound, b.sharp_bound), (1.0, 2.0 / 3.0, 0.5));
        let b = spiral_winding_alpha_bound(1.0f64, 1e9).unwrap();
        assert!(close(b.spectrum_bound, b.box_bound, 1e-8));
        assert!(spiral_winding_alpha_bound(1.0f64, 0.5).is_err());
    }

    #[test]
    fn kleinian_examples() {
        let k = kleinian_dimensions(1.305f64, 1, 1, 2, true).unwrap();
        assert!(close(k.measure.assouad.unwrap(), 1.61, 1e-9));
        assert_eq!(k.limit_set.assouad.unwrap(), 1.305);
        assert_eq!(k.limit_set.lower.unwrap(), 1.0);
        let k = kleinian_dimensions(0.7f64, 1, 1, 1, true).unwrap();
        assert_eq!(k.limit_set.assouad.unwrap(), 1.0);
        assert_eq!(k.limit_set.hausdorff.unwrap(), 0.7);
        let k = kleinian_dimensions(0.9f64, 1, 1, 2, false).unwrap();
        assert!(DimKind::ALL.iter().all(|&d| k.limit_set.get(d) == Some(0.9)));
        assert!(kleinian_dimensions(0.4f64, 1, 1, 2, true).is_err());
        assert!(kleinian_dimensions(1.5f64, 2, 1, 2, true).is_err());
    }

    #[test]
    fn self_similar_measure_examples() {
        let c = [1.0 / 3.0, 1.0 / 3.0];
        let r = self_similar_measure_dimensions(&c, &[0.5f64, 0.5], true).unwrap();
        let s = 2f64.ln() / 3f64.ln();
        for k in [DimKind::Lower, DimKind::Hausdorff, DimKind::BoxUpper, DimKind::Assouad] {
            assert!(close(r.get(k).unwrap(), s, 1e-12));
        }
        assert!(r.flags.is_empty());
        let r = self_similar_measure_dimensions(&c, &[0.7f64, 0.3], false).unwrap();
        assert!(close(r.assouad.unwrap(), 1.0959, 1e-4));
        assert!(close(r.lower.unwrap(), 0.7f64.ln() / (1.0f64 / 3.0).ln(), 1e-12));
        // The quoted value 0.3245 is a truncation of 0.32466.
        assert!(close(r.lower.unwrap(), 0.3245, 2e-4));
        assert_eq!(r.flags.len(), 1);
        assert!(self_similar_measure_dimensions(&c, &[1.0f64], true).is_err());
    }

    #[test]
    fn carpet_measure_examples() {
        let set: DimensionReport<f64> = carpet_dimensions(&presets::three_five_carpet());
        let cu = presets::three_five_measure(0.5f64).unwrap();
        let r = carpet_measure_dimensions(&cu, true).unwrap();
        assert!(close(r.assouad.unwrap(), set.assouad.unwrap(), 1e-12));
        assert!(close(r.lower.unwrap(), set.lower.unwrap(), 1e-12));

        // Uniform weights: ε = 1/4. P = (1/4, 3/4), p_d = 1/4 everywhere.
        let u = presets::three_five_measure(0.25f64).unwrap();
        let r = carpet_measure_dimensions(&u, true).unwrap();
        let (l3, l5) = (3f64.ln(), 5f64.ln());
        let want = 4f64.ln() * (1.0 / l3 - 1.0 / l5) + 4f64.ln() / l5;
        assert!(close(r.box_dim().unwrap(), want, 1e-12));
    }

    #[test]
    fn mcmullen_measure_realises_hausdorff() {
        for spec in [presets::three_five_carpet(), presets::two_three_carpet()] {
            let set: DimensionReport<f64> = carpet_dimensions(&spec);
            let rho = spec.rho();
            let counts = spec.column_counts();
            let scale = (spec.m() as f64).powf(set.hausdorff.unwrap());
            let w: Vec<f64> = spec
                .cells()
                .iter()
                .map(|&(i, _)| (counts[i as usize] as f64).powf(rho - 1.0) / scale)
                .collect();
            let mu = WeightedMeasureSpec::carpet(spec.clone(), w).unwrap();
            let r = carpet_measure_dimensions(&mu, true).unwrap();
            assert!(close(r.hausdorff.unwrap(), set.hausdorff.unwrap(), 1e-12));
        }
    }

    #[test]
    fn lalley_gatzouras_values() {
        let f = lalley_gatzouras_family(1.0f64 / 3.0).unwrap();
        assert!(DimKind::ALL.iter().all(|&k| f.report.get(k) == Some(1.0)));
        let f = lalley_gatzouras_family(1.0f64 / 9.0).unwrap();
        assert!(close(f.report.assouad.unwrap(), 0.9464, 1e-4));
        assert!(f.report.check_lattice(1e-12).is_ok());
        let near = lalley_gatzouras_family(1.0f64 / 3.0 - 1e-9).unwrap();
        assert!(close(near.report.assouad.unwrap(), 2.0 * 2f64.ln() / 3f64.ln(), 1e-6));
        // Spectra meet the plateaus at the transition.
        let (a, l) = f.spectrum(f.transition).unwrap();
        assert!(close(a, f.report.assouad.unwrap(), 1e-12));
        assert!(close(l, f.report.lower.unwrap(), 1e-12));
        assert!(lalley_gatzouras_family(0.5f64).is_err());
    }

    #[test]
    fn percolation_values() {
        let r = percolation_theory(2, 2, 0.8f64).unwrap();
        assert!(close(r.box_dim().unwrap(), 1.678, 1e-3));
        assert_eq!(r.assouad.unwrap(), 2.0);
        assert!(matches!(percolation_theory(2, 2, 0.2f64), Err(Error::Subcritical { .. })));
        let near = percolation_theory(2, 2, 0.25f64 + 1e-6).unwrap();
        assert!(near.box_dim().unwrap() < 1e-4);
    }

    #[test]
    fn bounds_examples() {
        let b = spectrum_bounds(0.5f64, 1.0, 0.8, 0.4).unwrap();
        assert!(close(b.generic, 0.5 + (0.2 * 0.4) / (0.6 * 0.8) * 0.5, 1e-15));
        assert!(b.lower <= b.generic && b.generic <= b.upper);
        let b = spectrum_bounds(0.5f64, 1.0, 0.8, 0.9).unwrap();
        assert_eq!(b.generic, 1.0);
        let b = spectrum_bounds(0.5f64, 1.0, 0.8, 1e-12).unwrap();
        assert!(close(b.lower, 0.5, 1e-9) && close(b.upper, 0.5, 1e-9) && close(b.generic, 0.5, 1e-9));
        assert!(spectrum_bounds(1.2f64, 1.0, 0.8, 0.4).is_err());
        assert!(spectrum_bounds(0.1f64, 1.0, 0.5, 0.4).is_err());
    }
}
