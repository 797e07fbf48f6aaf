use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{from_usize, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumKind {
    Assouad,
    Lower,
}

impl SpectrumKind {
    pub fn name(self) -> &'static str {
        match self {
            SpectrumKind::Assouad => "assouad",
            SpectrumKind::Lower => "lower",
        }
    }
}

/// `n` equally spaced interior points `i / (n + 1)` of `(0, 1)`.
pub fn theta_grid<T: Scalar>(n: usize) -> Vec<T> {
    (1..=n)
        .map(|i| from_usize::<T>(i) / from_usize::<T>(n + 1))
        .collect()
}

/// Sampled `θ ↦ value` curve with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumCurve<T> {
    pub theta: Vec<T>,
    pub values: Vec<T>,
    pub kind: SpectrumKind,
    pub provenance: String,
}

impl<T: Scalar> SpectrumCurve<T> {
    pub fn new(theta: Vec<T>, values: Vec<T>, kind: SpectrumKind, provenance: impl Into<String>) -> Result<Self> {
        if theta.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: theta.len(),
                found: values.len(),
            });
        }
        if theta.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidSpec("theta samples must be strictly increasing".into()));
        }
        if theta.iter().any(|&t| !(t > T::zero() && t < T::one())) {
            return Err(Error::OutOfRange("theta samples must lie in (0, 1)".into()));
        }
        Ok(Self {
            theta,
            values,
            kind,
            provenance: provenance.into(),
        })
    }

    /// Evaluates `f` on the grid.
    pub fn sample(
        theta: Vec<T>,
        kind: SpectrumKind,
        provenance: impl Into<String>,
        mut f: impl FnMut(T) -> Result<T>,
    ) -> Result<Self> {
        let values = theta.iter().map(|&t| f(t)).collect::<Result<Vec<T>>>()?;
        Self::new(theta, values, kind, provenance)
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// `box ≤ value ≤ min(box / (1 - θ), qA)` at every sample.
    pub fn check_sandwich(&self, box_dim: T, quasi_assouad: T, tol: T) -> std::result::Result<(), String> {
        for (&t, &v) in self.theta.iter().zip(&self.values) {
            let upper = (box_dim / (T::one() - t)).min(quasi_assouad);
            if v < box_dim - tol || v > upper + tol {
                return Err(format!(
                    "value {v} at theta {t} outside [{box_dim}, {upper}]"
                ));
            }
        }
        Ok(())
    }

    /// `((1 - θ₂) / (1 - θ₁)) v(θ₂) ≤ v(θ₁)` for every sampled `θ₁ < θ₂`.
    pub fn check_two_point(&self, tol: T) -> std::result::Result<(), String> {
        let n = self.len();
        for i in 0..n {
            for j in i + 1..n {
                let (t1, t2) = (self.theta[i], self.theta[j]);
                let lhs = (T::one() - t2) / (T::one() - t1) * self.values[j];
                if lhs > self.values[i] + tol {
                    return Err(format!("two-point inequality fails for theta {t1} < {t2}"));
                }
            }
        }
        Ok(())
    }

    /// Upper half of the two-point inequality with the intermediate spectrum
    /// value bounded by `qA`; this is the Lipschitz-type continuity bound.
    pub fn check_continuity(&self, quasi_assouad: T, tol: T) -> std::result::Result<(), String> {
        for w in 0..self.len().saturating_sub(1) {
            let (t1, t2) = (self.theta[w], self.theta[w + 1]);
            let bound = (T::one() - t2) / (T::one() - t1) * self.values[w + 1]
                + (t2 - t1) / (T::one() - t1) * quasi_assouad;
            if self.values[w] > bound + tol {
                return Err(format!("jump between theta {t1} and {t2} exceeds the bound"));
            }
        }
        Ok(())
    }

    /// Once the curve reaches `qA` it stays there.
    pub fn check_plateau(&self, quasi_assouad: T, tol: T) -> std::result::Result<(), String> {
        let mut reached = false;
        for (&t, &v) in self.theta.iter().zip(&self.values) {
            let at = (v - quasi_assouad).abs() <= tol;
            if reached && !at {
                return Err(format!("curve leaves the plateau at theta {t}"));
            }
            reached |= at;
        }
        Ok(())
    }

    /// CSV with a versioned header line.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# assouad-kit spectrum v1, kind={}, provenance={}\ntheta,value\n",
            self.kind.name(),
            self.provenance.replace('\n', " ")
        );
        for (t, v) in self.theta.iter().zip(&self.values) {
            let _ = writeln!(out, "{t},{v}");
        }
        out
    }

    /// Parses the output of [`SpectrumCurve::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Format("missing header".into()))?;
        let rest = header
            .strip_prefix("# assouad-kit spectrum v1, kind=")
            .ok_or_else(|| Error::Format("not an assouad-kit spectrum v1 file".into()))?;
        let (kind, provenance) = rest.split_once(", provenance=").unwrap_or((rest, ""));
        let kind = match kind {
            "assouad" => SpectrumKind::Assouad,
            "lower" => SpectrumKind::Lower,
            other => return Err(Error::Format(format!("unknown spectrum kind {other:?}"))),
        };
        let (mut theta, mut values) = (Vec::new(), Vec::new());
        for (lineno, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line == "theta,value" {
                continue;
            }
            let parsed = line
                .split_once(',')
                .and_then(|(t, v)| Some((t.trim().parse::<T>().ok()?, v.trim().parse::<T>().ok()?)));
            let (t, v) = parsed.ok_or_else(|| Error::Format(format!("line {}: expected theta,value", lineno + 2)))?;
            theta.push(t);
            values.push(v);
        }
        Self::new(theta, values, kind, provenance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_interior() {
        let g: Vec<f64> = theta_grid(3);
        assert_eq!(g, vec![0.25, 0.5, 0.75]);
    }

    #[test]
    fn checks_on_saturating_curve() {
        let theta = theta_grid::<f64>(19);
        let c = SpectrumCurve::sample(theta, SpectrumKind::Assouad, "test", |t| {
            Ok((0.5 / (1.0 - t)).min(1.0))
        })
        .unwrap();
        assert!(c.check_sandwich(0.5, 1.0, 1e-12).is_ok());
        assert!(c.check_two_point(1e-12).is_ok());
        assert!(c.check_plateau(1.0, 1e-12).is_ok());
        assert!(c.check_continuity(1.0, 1e-12).is_ok());
        assert!(c.to_csv().starts_with("# assouad-kit spectrum v1, kind=assouad, provenance=test\ntheta,value\n0.05,"));
    }

    #[test]
    fn csv_round_trip() {
        let c = SpectrumCurve::new(vec![0.1, 0.3], vec![0.7, 1.0 / 3.0], SpectrumKind::Lower, "a, b").unwrap();
        assert_eq!(SpectrumCurve::<f64>::from_csv(&c.to_csv()).unwrap(), c);
        assert!(SpectrumCurve::<f64>::from_csv("theta,value\n0.5,1\n").is_err());
    }

    #[test]
    fn plateau_violation_detected() {
        let c = SpectrumCurve::new(vec![0.2, 0.4, 0.6], vec![0.8, 1.0, 0.9], SpectrumKind::Assouad, "bad").unwrap();
        assert!(c.check_plateau(1.0, 1e-12).is_err());
        assert!(SpectrumCurve::new(vec![0.4, 0.2], vec![1.0, 1.0], SpectrumKind::Lower, "x").is_err());
    }
}
