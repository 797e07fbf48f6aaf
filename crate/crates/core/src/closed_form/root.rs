use crate::scalar::{lit, Scalar};

/// Absolute tolerance for every bisection in the crate.
pub const ROOT_TOL: f64 = 1e-12;

/// Root of a decreasing function on `[0, ∞)` with `f(0) >= 0`.
///
/// The upper end starts at 1 and doubles until `f` turns negative; the
/// bracket is then halved until it is shorter than [`ROOT_TOL`] or stops
/// shrinking in the working precision.
pub fn bisect_decreasing<T: Scalar>(mut f: impl FnMut(T) -> T) -> T {
    let mut lo = T::zero();
    if f(lo) <= T::zero() {
        return lo;
    }
    let mut hi = T::one();
    let mut guard = 0;
    while f(hi) > T::zero() {
        lo = hi;
        hi = hi + hi;
        guard += 1;
        assert!(guard < 1100, "no sign change: function is not decreasing to a root");
    }
    let tol = lit::<T>(ROOT_TOL);
    let two = lit::<T>(2.0);
    while hi - lo > tol {
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / two
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_known_roots() {
        let r = bisect_decreasing(|s: f64| 2.0 - s);
        assert!((r - 2.0).abs() < 1e-12);
        let r = bisect_decreasing(|s: f64| 1000.0 - s);
        assert!((r - 1000.0).abs() < 1e-9);
        assert_eq!(bisect_decreasing(|s: f64| -1.0 - s), 0.0);
    }

    #[test]
    fn single_precision_terminates() {
        let r = bisect_decreasing(|s: f32| 2f32 * 3f32.powf(-s) - 1.0);
        assert!((r - 2f32.ln() / 3f32.ln()).abs() < 1e-6);
    }
}
