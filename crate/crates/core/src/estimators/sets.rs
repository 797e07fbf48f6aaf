use std::collections::BTreeMap;

use rayon::prelude::*;

use super::centers::{select_centers, CenterPolicy};
use super::fit::{fit_counts, fit_logs, FitReport};
use crate::closed_form::SpectrumKind;
use crate::error::{Error, Result};
use crate::geometry::{mesh_count, DyadicScale, MeshIndex, PointSet};
use crate::scalar::{from_usize, lit, Scalar};

fn valid_exponents<T: Scalar>(set: &PointSet<T>, k_min: u32, k_max: u32) -> Vec<u32> {
    (k_min..=k_max)
        .filter(|&k| set.scale_is_valid(DyadicScale::new(k)))
        .collect()
}

/// Least-squares slope of `log N(2^-k)` against `k log 2` over the gated
/// exponents in `[k_min, k_max]`.
pub fn fit_box_dimension<T: Scalar>(set: &PointSet<T>, k_min: u32, k_max: u32) -> Result<FitReport<T>> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let ln2 = lit::<T>(2.0).ln();
    let samples = valid_exponents(set, k_min, k_max)
        .into_par_iter()
        .map(|k| {
            let c = mesh_count(set, DyadicScale::new(k))?;
            Ok((k, from_usize::<T>(k as usize) * ln2, c.count))
        })
        .collect::<Result<Vec<_>>>()?;
    fit_counts("box-mesh-ols", &samples, 0)
}

/// Extreme local counts `S(k)` for every exponent in `ks` and every `theta`,
/// building one mesh index per scale. Indexed `[theta][k]`.
fn spectrum_counts<T: Scalar>(
    set: &PointSet<T>,
    centers: &[Vec<T>],
    ks: &[u32],
    thetas: &[T],
    kind: SpectrumKind,
) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(ks.len()); thetas.len()];
    for &k in ks {
        let scale = DyadicScale::new(k);
        let index = MeshIndex::build(set, scale);
        for (row, &theta) in out.iter_mut().zip(thetas) {
            let big = scale.value::<T>().powf(theta);
            let counts = centers.par_iter().map(|c| index.local_count(c, big));
            let s = match kind {
                SpectrumKind::Assouad => counts.max(),
                SpectrumKind::Lower => counts.min(),
            }
            .expect("at least one center");
            row.push(s);
        }
    }
    out
}

fn check_theta<T: Scalar>(theta: T) -> Result<()> {
    if theta > T::zero() && theta < T::one() {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("theta = {theta} must lie in (0, 1)")))
    }
}

fn spectrum_samples<T: Scalar>(ks: &[u32], theta: T, counts: &[usize]) -> Vec<(u32, T, usize)> {
    let ln2 = lit::<T>(2.0).ln();
    ks.iter()
        .zip(counts)
        .map(|(&k, &s)| (k, (T::one() - theta) * from_usize::<T>(k as usize) * ln2, s))
        .collect()
}

fn subsample_note<T: Scalar>(report: &mut FitReport<T>, set: &PointSet<T>, policy: &CenterPolicy) {
    if matches!(policy, CenterPolicy::Hashed { max_centers, .. } if *max_centers < set.len()) {
        report.notes.push(format!(
            "centers subsampled: {} of {} points",
            report.centers,
            set.len()
        ));
    }
}

/// Spectrum estimate at `theta`: for each gated `k >= 1`, the extreme over
/// centers of the mesh count at `r = 2^-k` inside `B(x, r^θ)`, fitted
/// against `(1 - θ) k log 2`.
pub fn estimate_spectrum<T: Scalar>(
    set: &PointSet<T>,
    theta: T,
    k_min: u32,
    k_max: u32,
    policy: &CenterPolicy,
    kind: SpectrumKind,
) -> Result<FitReport<T>> {
    check_theta(theta)?;
    let centers = select_centers(set, policy)?;
    let ks = valid_exponents(set, k_min.max(1), k_max);
    let counts = spectrum_counts(set, &centers, &ks, &[theta], kind);
    let method = match kind {
        SpectrumKind::Assouad => "assouad-spectrum-max-ols",
        SpectrumKind::Lower => "lower-spectrum-min-ols",
    };
    let mut report = fit_counts(method, &spectrum_samples(&ks, theta, &counts[0]), centers.len())?;
    subsample_note(&mut report, set, policy);
    Ok(report)
}

pub fn estimate_assouad_spectrum<T: Scalar>(
    set: &PointSet<T>,
    theta: T,
    k_min: u32,
    k_max: u32,
    policy: &CenterPolicy,
) -> Result<FitReport<T>> {
    estimate_spectrum(set, theta, k_min, k_max, policy, SpectrumKind::Assouad)
}

pub fn estimate_lower_spectrum<T: Scalar>(
    set: &PointSet<T>,
    theta: T,
    k_min: u32,
    k_max: u32,
    policy: &CenterPolicy,
) -> Result<FitReport<T>> {
    estimate_spectrum(set, theta, k_min, k_max, policy, SpectrumKind::Lower)
}

/// Spectrum exponents swept by [`estimate_assouad_dimension`]. Above 0.6
/// the reachable `R/r` is so small that boundary cells dominate the counts.
pub const THETA_SWEEP: [f64; 6] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6];

/// Sweep over scale pairs `R = 2^-j > r = 2^-k` with `R/r >= ratio_floor`.
///
/// For each gap `g = k - j`, `T(g)` is the largest local count over pairs
/// and centers, and the slope of `log T(g)` against `g log 2` is one
/// candidate. The pairs `(r^θ, r)` for `θ` in [`THETA_SWEEP`] give the
/// others, since the dimension dominates every spectrum value. The estimate
/// is the largest candidate slope; the largest raw ratio
/// `log N / log(R/r)` and its pair are kept in the report. Finite data
/// cannot certify the supremum, so this is biased low.
pub fn estimate_assouad_dimension<T: Scalar>(
    set: &PointSet<T>,
    ratio_floor: T,
    k_min: u32,
    k_max: u32,
    policy: &CenterPolicy,
) -> Result<FitReport<T>> {
    if !(ratio_floor >= lit::<T>(4.0)) {
        return Err(Error::OutOfRange(format!("ratio floor {ratio_floor} must be at least 4")));
    }
    let centers = select_centers(set, policy)?;
    let min_gap = ratio_floor.log2().ceil().to_u32().unwrap_or(u32::MAX);
    let ks = valid_exponents(set, k_min, k_max);
    // (k, j, count) for every admissible pair.
    let triples: Vec<(u32, u32, usize)> = ks
        .iter()
        .flat_map(|&k| {
            let js: Vec<u32> = (k_min..k).filter(|&j| k - j >= min_gap).collect();
            if js.is_empty() {
                return Vec::new();
            }
            let scale = DyadicScale::new(k);
            let index = MeshIndex::build(set, scale);
            js.into_iter()
                .map(|j| {
                    let big = DyadicScale::new(j).value::<T>();
                    let n = centers
                        .par_iter()
                        .map(|c| index.local_count(c, big))
                        .max()
                        .expect("at least one center");
                    (k, j, n)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    if triples.is_empty() {
        return Err(Error::NoValidPairs);
    }
    let ln2 = lit::<T>(2.0).ln();
    let mut by_gap: BTreeMap<u32, usize> = BTreeMap::new();
    let mut raw = (T::neg_infinity(), (0, 0));
    for &(k, j, n) in &triples {
        let g = k - j;
        let e = by_gap.entry(g).or_insert(0);
        *e = (*e).max(n);
        let ratio = from_usize::<T>(n).ln() / (from_usize::<T>(g as usize) * ln2);
        if ratio > raw.0 {
            raw = (ratio, (j, k));
        }
    }
    let xs: Vec<T> = by_gap.keys().map(|&g| from_usize::<T>(g as usize) * ln2).collect();
    let ys: Vec<T> = by_gap.values().map(|&n| from_usize::<T>(n).ln()).collect();
    let mut report = fit_logs(
        "assouad-pair-sweep-max",
        ks.iter().copied(),
        xs,
        ys,
        centers.len(),
    )?;
    report
        .notes
        .push(format!("gap sweep slope {}", report.estimate));
    let spectrum_ks = valid_exponents(set, k_min.max(1), k_max);
    let thetas: Vec<T> = THETA_SWEEP.iter().map(|&t| lit::<T>(t)).collect();
    let counts = spectrum_counts(set, &centers, &spectrum_ks, &thetas, SpectrumKind::Assouad);
    for (&theta, row) in thetas.iter().zip(&counts) {
        let Ok(fit) = fit_counts("", &spectrum_samples(&spectrum_ks, theta, row), centers.len()) else {
            continue;
        };
        if fit.estimate > report.estimate {
            report.notes.push(format!("spectrum slope {} at theta {theta}", fit.estimate));
            report.estimate = fit.estimate;
            report.intercept = fit.intercept;
            report.residual = fit.residual;
            report.samples = fit.samples;
        }
    }
    report.best_pair = Some(raw.1);
    report.raw_max = Some(raw.0);
    report
        .notes
        .push("lower-biased: finite scales cannot certify the supremum".into());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn segment(k: u32) -> PointSet<f64> {
        let n = 1usize << k;
        let pts: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        PointSet::from_flat(1, pts, 1.0 / n as f64, "segment").unwrap()
    }

    #[test]
    fn segment_box_and_spectra() {
        let s = segment(20);
        let f = fit_box_dimension(&s, 2, 12).unwrap();
        assert!((f.estimate - 1.0).abs() < 0.02, "{}", f.estimate);
        let policy = CenterPolicy::Hashed { max_centers: 256, seed: 1 };
        let ends = CenterPolicy::Explicit {
            points: vec![vec![0.0], vec![0.375], vec![0.5], vec![1.0]],
        };
        // At θ = 0.75 the ratio R/r only reaches 16 before the gate, and the
        // boundary cells of each ball (one extra for interior centers, the
        // endpoint for the minimum) pull the slope down to about 0.9 and 0.83.
        for (theta, tol) in [(0.25, 0.05), (0.5, 0.05), (0.75, 0.2)] {
            let a = estimate_assouad_spectrum(&s, theta, 4, 16, &policy).unwrap();
            assert!((a.estimate - 1.0).abs() < tol, "assouad θ={theta}: {}", a.estimate);
            let l = estimate_lower_spectrum(&s, theta, 4, 16, &ends).unwrap();
            assert!((l.estimate - 1.0).abs() < tol, "lower θ={theta}: {}", l.estimate);
        }
        // The θ = 0.1 sweep sees balls larger than the segment, so N_r(F)
        // is fitted against (R/r) with R > 1 and reads about 1.1.
        let d = estimate_assouad_dimension(&s, 4.0, 2, 12, &policy).unwrap();
        assert!((d.estimate - 1.0).abs() < 0.12, "{}", d.estimate);
    }

    #[test]
    fn isolated_point_flattens_lower_spectrum() {
        let mut pts: Vec<f64> = (0..=4096).map(|i| i as f64 / 8192.0).collect();
        pts.push(1.0);
        let s = PointSet::from_flat(1, pts, 1.0 / 8192.0, "segment and point").unwrap();
        let l = estimate_lower_spectrum(&s, 0.5, 3, 9, &CenterPolicy::All).unwrap();
        assert!(l.flat && l.estimate == 0.0);
    }

    #[test]
    fn gate_leaves_too_few_scales() {
        let s = segment(8);
        assert!(matches!(fit_box_dimension(&s, 2, 20), Err(Error::TooFewScales { .. }) | Ok(_)));
        assert!(matches!(fit_box_dimension(&s, 5, 20), Err(Error::TooFewScales { found: 0, .. })));
        assert!(estimate_assouad_spectrum(&s, 1.0, 1, 4, &CenterPolicy::All).is_err());
        assert!(estimate_assouad_dimension(&s, 2.0, 1, 4, &CenterPolicy::All).is_err());
    }

    #[test]
    fn determinism() {
        let s = segment(12);
        let p = CenterPolicy::default();
        let a = estimate_assouad_spectrum(&s, 0.4, 1, 8, &p).unwrap();
        let b = estimate_assouad_spectrum(&s, 0.4, 1, 8, &p).unwrap();
        assert_eq!(a, b);
    }
}
