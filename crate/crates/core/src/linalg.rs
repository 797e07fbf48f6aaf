//! Small dense linear algebra on row-major `d x d` matrices.

use crate::scalar::{lit, Scalar};

pub fn identity<T: Scalar>(d: usize) -> Vec<T> {
    let mut m = vec![T::zero(); d * d];
    for i in 0..d {
        m[i * d + i] = T::one();
    }
    m
}

pub fn mat_mul<T: Scalar>(a: &[T], b: &[T], d: usize) -> Vec<T> {
    let mut out = vec![T::zero(); d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            if aik == T::zero() {
                continue;
            }
            for j in 0..d {
                out[i * d + j] = out[i * d + j] + aik * b[k * d + j];
            }
        }
    }
    out
}

/// Singular values in decreasing order, by one-sided Jacobi rotations.
///
/// Column orthogonalisation keeps small singular values accurate to
/// relative precision, which matters for long matrix products.
pub fn singular_values<T: Scalar>(a: &[T], d: usize) -> Vec<T> {
    let mut u = a.to_vec();
    let eps = T::epsilon();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..d {
            for q in p + 1..d {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for i in 0..d {
                    let (up, uq) = (u[i * d + p], u[i * d + q]);
                    alpha = alpha + up * up;
                    beta = beta + uq * uq;
                    gamma = gamma + up * uq;
                }
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (lit::<T>(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = (T::one() + t * t).sqrt().recip();
                let s = c * t;
                for i in 0..d {
                    let (up, uq) = (u[i * d + p], u[i * d + q]);
                    u[i * d + p] = c * up - s * uq;
                    u[i * d + q] = s * up + c * uq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<T> = (0..d)
        .map(|j| (0..d).map(|i| u[i * d + j] * u[i * d + j]).sum::<T>().sqrt())
        .collect();
    sv.sort_by(|x, y| y.partial_cmp(x).expect("finite singular values"));
    sv
}

pub fn operator_norm<T: Scalar>(a: &[T], d: usize) -> T {
    singular_values(a, d)[0]
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve<T: Scalar>(a: &[T], b: &[T], d: usize) -> Option<Vec<T>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for col in 0..d {
        let pivot = (col..d).max_by(|&i, &j| {
            m[i * d + col]
                .abs()
                .partial_cmp(&m[j * d + col].abs())
                .expect("finite entries")
        })?;
        if m[pivot * d + col].abs() <= T::epsilon() * lit(1e-3) {
            return None;
        }
        if pivot != col {
            for j in 0..d {
                m.swap(pivot * d + j, col * d + j);
            }
            x.swap(pivot, col);
        }
        for row in col + 1..d {
            let f = m[row * d + col] / m[col * d + col];
            for j in col..d {
                m[row * d + j] = m[row * d + j] - f * m[col * d + j];
            }
            x[row] = x[row] - f * x[col];
        }
    }
    for col in (0..d).rev() {
        let mut acc = x[col];
        for j in col + 1..d {
            acc = acc - m[col * d + j] * x[j];
        }
        x[col] = acc / m[col * d + col];
    }
    Some(x)
}
