//! Strategies and invariant checks shared by the property and acceptance suites.

#![allow(dead_code)]

use assouad_kit::closed_form::{
    carpet_dimensions, carpet_measure_dimensions, carpet_spectrum, kleinian_dimensions, lalley_gatzouras_family,
    percolation_theory, self_similar_measure_dimensions, sequence_dimensions, sequence_spectrum, spiral_report,
    spiral_spectrum, theta_grid, DimKind, DimensionReport, SpectrumCurve, SpectrumKind,
};
use assouad_kit::geometry::{mesh_count, product_set};
use assouad_kit::ifs::{CarpetSpec, WeightedMeasureSpec};
use assouad_kit::{DyadicScale, MeshIndex, PointSet};
use proptest::prelude::*;

pub const TOL: f64 = 1e-9;
pub const CASES: u32 = 200;

pub type Check = Result<(), String>;

pub fn carpet() -> impl Strategy<Value = CarpetSpec> {
    (2u32..6)
        .prop_flat_map(|m| (Just(m), m + 1..9))
        .prop_flat_map(|(m, n)| {
            let grid = (m * n) as usize;
            (Just(m), Just(n), proptest::sample::subsequence((0..grid).collect::<Vec<_>>(), 1..=grid))
        })
        .prop_map(|(m, n, idx)| {
            let cells = idx.into_iter().map(|c| (c as u32 % m, c as u32 / m)).collect();
            CarpetSpec::new(m, n, cells).unwrap()
        })
}

pub fn carpet_measure() -> impl Strategy<Value = WeightedMeasureSpec<f64>> {
    carpet()
        .prop_flat_map(|spec| {
            let n = spec.total();
            (Just(spec), proptest::collection::vec(0.05f64..1.0, n))
        })
        .prop_map(|(spec, w)| {
            let s: f64 = w.iter().sum();
            WeightedMeasureSpec::carpet(spec, w.into_iter().map(|x| x / s).collect()).unwrap()
        })
}

/// Closed-form reports across the families, with the ambient dimension for
/// sets. Measures can have Assouad dimension above the ambient one.
pub fn any_report() -> impl Strategy<Value = (DimensionReport<f64>, Option<usize>)> {
    prop_oneof![
        carpet().prop_map(|c| (carpet_dimensions(&c), Some(2))),
        carpet_measure().prop_map(|m| (carpet_measure_dimensions(&m, true).unwrap(), None)),
        (0.01f64..1.0 / 3.0).prop_map(|l| (lalley_gatzouras_family(l).unwrap().report, Some(2))),
        (0.05f64..20.0).prop_map(|p| (sequence_dimensions(p).unwrap(), Some(1))),
        (0.05f64..20.0).prop_map(|p| (spiral_report(p).unwrap(), Some(2))),
        ((1u32..4), (2u32..5), 0.0f64..1.0).prop_map(|(d, m, t)| {
            let crit = f64::from(m).powi(-(d as i32));
            let p = crit + (1.0 - crit) * (0.001 + 0.998 * t);
            (percolation_theory(d, m, p).unwrap(), Some(d as usize))
        }),
        proptest::collection::vec((0.05f64..0.6, 0.05f64..1.0), 1..6).prop_map(|v| {
            let s: f64 = v.iter().map(|x| x.1).sum();
            let (c, p): (Vec<f64>, Vec<f64>) = v.into_iter().map(|(c, p)| (c, p / s)).unzip();
            (self_similar_measure_dimensions(&c, &p, true).unwrap(), None)
        }),
        ((2u32..5), 0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0).prop_map(|(d, a, b, t)| {
            let mut ks = [1 + (a * f64::from(d)) as u32 % d, 1 + (b * f64::from(d)) as u32 % d];
            ks.sort();
            let lo = f64::from(ks[1]) / 2.0;
            let delta = lo + (f64::from(d) - lo) * (0.01 + 0.98 * t);
            (kleinian_dimensions(delta, ks[0], ks[1], d, true).unwrap().limit_set, Some(d as usize))
        }),
        ((2u32..5), 0.0f64..1.0).prop_map(|(d, t)| {
            let delta = f64::from(d) / 2.0 + 0.01 + (f64::from(d) / 2.0 - 0.02) * t;
            (kleinian_dimensions(delta, 1, d, d, true).unwrap().measure, None)
        }),
    ]
}

pub fn dyadic_set() -> impl Strategy<Value = PointSet<f64>> {
    proptest::collection::btree_set(0u32..4096, 1..50).prop_map(|s| {
        let coords: Vec<f64> = s.into_iter().map(|i| f64::from(i) / 4096.0).collect();
        PointSet::from_flat(1, coords, 0.0, "dyadic").unwrap()
    })
}

pub fn assouad_curve(f: impl Fn(f64) -> f64) -> SpectrumCurve<f64> {
    SpectrumCurve::sample(theta_grid(40), SpectrumKind::Assouad, "closed form", |t| Ok(f(t))).unwrap()
}

pub fn lattice(report: &DimensionReport<f64>, ambient: Option<usize>) -> Check {
    report
        .check_lattice(TOL)
        .map_err(|v| format!("{:?} = {} exceeds {:?} = {}", v.smaller, v.values.0, v.larger, v.values.1))?;
    match ambient {
        Some(d) if !report.within_ambient(d, TOL) => Err(format!("values outside [0, {d}]: {report:?}")),
        _ => Ok(()),
    }
}

pub fn sandwich(spec: &CarpetSpec, p: f64) -> Check {
    let r = carpet_dimensions::<f64>(spec);
    let (b, qa) = (r.box_dim().unwrap(), r.get(DimKind::QuasiAssouad).unwrap());
    assouad_curve(|t| carpet_spectrum(spec, t).unwrap().0).check_sandwich(b, qa, TOL)?;
    let lower = r.get(DimKind::Lower).unwrap();
    for t in theta_grid::<f64>(40) {
        let l = carpet_spectrum(spec, t).unwrap().1;
        if l < lower - TOL || l > b + TOL {
            return Err(format!("lower spectrum {l} outside [{lower}, {b}] at {t}"));
        }
    }
    assouad_curve(|t| sequence_spectrum(p, t).unwrap()).check_sandwich(1.0 / (1.0 + p), 1.0, TOL)?;
    let spiral = spiral_report(p).unwrap().box_dim().unwrap();
    assouad_curve(|t| spiral_spectrum(p, t).unwrap()).check_sandwich(spiral, 2.0, TOL)
}

pub fn two_point(spec: &CarpetSpec, p: f64, lambda: f64) -> Check {
    let lg = lalley_gatzouras_family(lambda).unwrap();
    assouad_curve(|t| carpet_spectrum(spec, t).unwrap().0).check_two_point(TOL)?;
    assouad_curve(|t| sequence_spectrum(p, t).unwrap()).check_two_point(TOL)?;
    assouad_curve(|t| spiral_spectrum(p, t).unwrap()).check_two_point(TOL)?;
    assouad_curve(|t| lg.spectrum(t).unwrap().0).check_two_point(TOL)
}

pub fn plateau(spec: &CarpetSpec, p: f64) -> Check {
    let qa = carpet_dimensions::<f64>(spec).get(DimKind::QuasiAssouad).unwrap();
    let c = assouad_curve(|t| carpet_spectrum(spec, t).unwrap().0);
    c.check_plateau(qa, TOL)?;
    c.check_continuity(qa, TOL)?;
    assouad_curve(|t| sequence_spectrum(p, t).unwrap()).check_plateau(1.0, TOL)?;
    assouad_curve(|t| spiral_spectrum(p, t).unwrap()).check_plateau(2.0, TOL)
}

/// `N_r(E x F) >= N_r(E) N_r(F)` globally and for sup-norm balls.
pub fn product_counts(a: &PointSet<f64>, b: &PointSet<f64>, k: u32, j: u32) -> Check {
    let prod = product_set(a, b).map_err(|e| e.to_string())?;
    let scale = DyadicScale::new(k);
    let count = |s: &PointSet<f64>| mesh_count(s, scale).map(|c| c.count).map_err(|e| e.to_string());
    let (na, nb, np) = (count(a)?, count(b)?, count(&prod)?);
    if np < na * nb {
        return Err(format!("product count {np} < {na} x {nb}"));
    }
    let big = DyadicScale::new(j.min(k)).value::<f64>();
    let (ia, ib, ip) = (MeshIndex::build(a, scale), MeshIndex::build(b, scale), MeshIndex::build(&prod, scale));
    let (x, y) = (a.point(0)[0], b.point(b.len() - 1)[0]);
    let local = ip.local_count(&[x, y], big);
    let split = ia.local_count(&[x], big) * ib.local_count(&[y], big);
    if local < split {
        return Err(format!("local product count {local} < {split}"));
    }
    Ok(())
}
