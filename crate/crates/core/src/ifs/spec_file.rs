//! JSON documents for carpets and IFSs (schema version 1).
//!
//! ```json
//! {"v":1,"kind":"carpet","m":3,"n":5,"cells":[[0,2],[2,0]],"weights":[0.5,0.5]}
//! {"v":1,"kind":"ifs","d":1,"maps":[{"linear":[[0.5]],"translation":[0],"kind":"similarity","ratio":0.5}]}
//! ```

use serde::{Deserialize, Serialize};

use super::affine::{AffineMap, IfsSpec, MapKind};
use super::carpet::CarpetSpec;
use super::measure::{MeasureBase, WeightedMeasureSpec};
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

const VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Document {
    Carpet {
        v: u32,
        m: u32,
        n: u32,
        cells: Vec<[u32; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
    },
    Ifs {
        v: u32,
        d: usize,
        maps: Vec<MapDoc>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
struct MapDoc {
    linear: Vec<Vec<f64>>,
    translation: Vec<f64>,
    kind: MapKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ratio: Option<f64>,
}

/// A parsed system, with its measure when weights were supplied.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedSystem<T> {
    Carpet {
        spec: CarpetSpec,
        measure: Option<WeightedMeasureSpec<T>>,
    },
    Ifs {
        ifs: IfsSpec<T>,
        measure: Option<WeightedMeasureSpec<T>>,
    },
}

impl<T: Scalar> LoadedSystem<T> {
    pub fn measure(&self) -> Option<&WeightedMeasureSpec<T>> {
        match self {
            Self::Carpet { measure, .. } | Self::Ifs { measure, .. } => measure.as_ref(),
        }
    }

    /// The base system as a general IFS.
    pub fn to_ifs(&self) -> IfsSpec<T> {
        match self {
            Self::Carpet { spec, .. } => spec.to_ifs(),
            Self::Ifs { ifs, .. } => ifs.clone(),
        }
    }
}

fn check_version(v: u32) -> Result<()> {
    if v != VERSION {
        return Err(Error::Format(format!("unsupported schema version {v}")));
    }
    Ok(())
}

pub fn parse_system<T: Scalar>(text: &str) -> Result<LoadedSystem<T>> {
    let doc: Document = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    let cast = |w: Vec<f64>| w.into_iter().map(lit::<T>).collect::<Vec<T>>();
    match doc {
        Document::Carpet {
            v,
            m,
            n,
            cells,
            weights,
        } => {
            check_version(v)?;
            let spec = CarpetSpec::new(m, n, cells.into_iter().map(|[i, j]| (i, j)).collect())?;
            let measure = weights
                .map(|w| WeightedMeasureSpec::carpet(spec.clone(), cast(w)))
                .transpose()?;
            Ok(LoadedSystem::Carpet { spec, measure })
        }
        Document::Ifs { v, d, maps, weights } => {
            check_version(v)?;
            let maps = maps
                .into_iter()
                .map(|md| {
                    if md.linear.len() != d || md.linear.iter().any(|row| row.len() != d) {
                        return Err(Error::DimensionMismatch {
                            expected: d,
                            found: md.linear.len(),
                        });
                    }
                    let linear = md.linear.into_iter().flatten().map(lit::<T>).collect();
                    AffineMap::from_parts(
                        d,
                        linear,
                        cast(md.translation),
                        md.kind,
                        md.ratio.map(lit::<T>),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let ifs = IfsSpec::new(maps)?;
            let measure = weights
                .map(|w| WeightedMeasureSpec::ifs(ifs.clone(), cast(w)))
                .transpose()?;
            Ok(LoadedSystem::Ifs { ifs, measure })
        }
    }
}

pub fn system_to_json<T: Scalar>(system: &LoadedSystem<T>) -> String {
    let to64 = |w: &[T]| w.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
    let doc = match system {
        LoadedSystem::Carpet { spec, measure } => Document::Carpet {
            v: VERSION,
            m: spec.m(),
            n: spec.n(),
            cells: spec.cells().iter().map(|&(i, j)| [i, j]).collect(),
            weights: measure.as_ref().map(|mu| to64(mu.weights())),
        },
        LoadedSystem::Ifs { ifs, measure } => Document::Ifs {
            v: VERSION,
            d: ifs.dim(),
            maps: ifs
                .maps()
                .iter()
                .map(|m| MapDoc {
                    linear: m.linear().chunks(ifs.dim()).map(to64).collect(),
                    translation: to64(m.translation()),
                    kind: m.kind(),
                    ratio: m.ratio().and_then(|c| c.to_f64()),
                })
                .collect(),
            weights: measure.as_ref().map(|mu| to64(mu.weights())),
        },
    };
    serde_json::to_string(&doc).expect("serialisable document")
}

impl<T: Scalar> From<WeightedMeasureSpec<T>> for LoadedSystem<T> {
    fn from(mu: WeightedMeasureSpec<T>) -> Self {
        match mu.base().clone() {
            MeasureBase::Carpet(spec) => Self::Carpet {
                spec,
                measure: Some(mu),
            },
            MeasureBase::Ifs(ifs) => Self::Ifs {
                ifs,
                measure: Some(mu),
            },
        }
    }
}
