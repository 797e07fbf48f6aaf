use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::scalar::{lit, Scalar};

/// Named entries of a [`DimensionReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimKind {
    Lower,
    Hausdorff,
    BoxLower,
    BoxUpper,
    QuasiAssouad,
    Assouad,
}

impl DimKind {
    pub const ALL: [DimKind; 6] = [
        DimKind::Lower,
        DimKind::Hausdorff,
        DimKind::BoxLower,
        DimKind::BoxUpper,
        DimKind::QuasiAssouad,
        DimKind::Assouad,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DimKind::Lower => "lower",
            DimKind::Hausdorff => "hausdorff",
            DimKind::BoxLower => "box_lower",
            DimKind::BoxUpper => "box_upper",
            DimKind::QuasiAssouad => "quasi_assouad",
            DimKind::Assouad => "assouad",
        }
    }
}

/// Dimension values of one set or measure, each optional and tagged with
/// the formula that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport<T> {
    pub lower: Option<T>,
    pub hausdorff: Option<T>,
    pub box_lower: Option<T>,
    pub box_upper: Option<T>,
    pub assouad: Option<T>,
    pub quasi_assouad: Option<T>,
    pub provenance: BTreeMap<DimKind, String>,
    /// Hypotheses assumed rather than checked, and other caveats.
    pub flags: Vec<String>,
}

impl<T: Scalar> Default for DimensionReport<T> {
    fn default() -> Self {
        Self {
            lower: None,
            hausdorff: None,
            box_lower: None,
            box_upper: None,
            assouad: None,
            quasi_assouad: None,
            provenance: BTreeMap::new(),
            flags: Vec::new(),
        }
    }
}

/// A pair of entries breaking the expected ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeViolation<T> {
    pub smaller: DimKind,
    pub larger: DimKind,
    pub values: (T, T),
}

impl<T: Scalar> DimensionReport<T> {
    pub fn get(&self, kind: DimKind) -> Option<T> {
        match kind {
            DimKind::Lower => self.lower,
            DimKind::Hausdorff => self.hausdorff,
            DimKind::BoxLower => self.box_lower,
            DimKind::BoxUpper => self.box_upper,
            DimKind::QuasiAssouad => self.quasi_assouad,
            DimKind::Assouad => self.assouad,
        }
    }

    /// Sets an entry with its provenance tag.
    pub fn set(&mut self, kind: DimKind, value: T, tag: &str) -> &mut Self {
        let slot = match kind {
            DimKind::Lower => &mut self.lower,
            DimKind::Hausdorff => &mut self.hausdorff,
            DimKind::BoxLower => &mut self.box_lower,
            DimKind::BoxUpper => &mut self.box_upper,
            DimKind::QuasiAssouad => &mut self.quasi_assouad,
            DimKind::Assouad => &mut self.assouad,
        };
        *slot = Some(value);
        self.provenance.insert(kind, tag.to_string());
        self
    }

    /// Sets both box dimensions.
    pub fn set_box(&mut self, value: T, tag: &str) -> &mut Self {
        self.set(DimKind::BoxLower, value, tag);
        self.set(DimKind::BoxUpper, value, tag)
    }

    pub fn flag(&mut self, note: &str) -> &mut Self {
        self.flags.push(note.to_string());
        self
    }

    /// Box dimension when the lower and upper values agree.
    pub fn box_dim(&self) -> Option<T> {
        match (self.box_lower, self.box_upper) {
            (Some(a), Some(b)) if a == b => Some(a),
            (None, Some(b)) => Some(b),
            (Some(a), None) => Some(a),
            _ => None,
        }
    }

    /// Checks `lower ≤ hausdorff ≤ box_lower ≤ box_upper ≤ quasi_assouad ≤ assouad`
    /// on every pair of present entries, up to `tol`.
    pub fn check_lattice(&self, tol: T) -> Result<(), LatticeViolation<T>> {
        let present: Vec<(DimKind, T)> = DimKind::ALL
            .iter()
            .filter_map(|&k| self.get(k).map(|v| (k, v)))
            .collect();
        for (i, &(ka, a)) in present.iter().enumerate() {
            for &(kb, b) in &present[i + 1..] {
                if a > b + tol {
                    return Err(LatticeViolation {
                        smaller: ka,
                        larger: kb,
                        values: (a, b),
                    });
                }
            }
        }
        if let (Some(b), Some(q)) = (self.box_upper, self.quasi_assouad) {
            if b <= T::zero() && q > tol {
                return Err(LatticeViolation {
                    smaller: DimKind::QuasiAssouad,
                    larger: DimKind::BoxUpper,
                    values: (q, b),
                });
            }
        }
        Ok(())
    }

    /// All present values lie in `[0, d]` up to `tol`.
    pub fn within_ambient(&self, d: usize, tol: T) -> bool {
        let top = lit::<T>(d as f64) + tol;
        DimKind::ALL
            .iter()
            .filter_map(|&k| self.get(k))
            .all(|v| v >= -tol && v <= top)
    }
}
