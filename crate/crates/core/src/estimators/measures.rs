use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::centers::CenterPolicy;
use super::fit::{fit_logs, FitReport};
use crate::closed_form::SpectrumKind;
use crate::error::{Error, Result};
use crate::geometry::sup_distance;
use crate::ifs::{approx_square, approx_square_mass, level_for_scale, CarpetSpec, IfsSpec, WeightedMeasureSpec};
use crate::linalg::mat_mul;
use crate::scalar::{from_usize, lit, Scalar};

fn pick<T: Scalar>(kind: SpectrumKind, a: T, b: T) -> T {
    match kind {
        SpectrumKind::Assouad => a.max(b),
        SpectrumKind::Lower => a.min(b),
    }
}

fn extreme_init<T: Scalar>(kind: SpectrumKind) -> T {
    match kind {
        SpectrumKind::Assouad => T::neg_infinity(),
        SpectrumKind::Lower => T::infinity(),
    }
}

fn random_words(alphabet: usize, len: usize, count: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..len).map(|_| rng.random_range(0..alphabet)).collect())
        .collect()
}

/// Log of the carpet level weight: `log p_d` inside the row depth, `log P(col)`
/// between row and column depth, 0 beyond.
fn carpet_level_log<T: Scalar>(l: usize, l1: usize, l2: usize, p: T, col: T) -> T {
    if l < l2 {
        p.ln()
    } else if l < l1 {
        col.ln()
    } else {
        T::zero()
    }
}

/// Equal-ratio check for similarity systems; returns the common ratio.
fn common_ratio<T: Scalar>(ifs: &IfsSpec<T>) -> Option<T> {
    let r = ifs.similarity_ratios()?;
    let c = r[0];
    r.iter().all(|&x| (x - c).abs() <= lit::<T>(1e-12)).then_some(c)
}

/// Smallest `l` with `c^l <= s`.
fn cylinder_level<T: Scalar>(c: T, s: T) -> usize {
    let mut l = (s.ln() / c.ln()).ceil().max(T::zero()).to_usize().unwrap_or(0);
    while c.powi(l as i32) > s {
        l += 1;
    }
    while l > 0 && c.powi(l as i32 - 1) <= s {
        l -= 1;
    }
    l
}

/// Measure spectrum from ball surrogates at `r = 2^-k` and `R = r^θ`.
///
/// Carpets use approximate squares; similarity systems use cylinders of
/// diameter comparable to the scale. Scales run over every `k >= 1` whose
/// surrogate fits within words of length `depth`. Under [`CenterPolicy::All`]
/// the extremum is over every word: the mass ratio is a product of per-level
/// factors, so it is maximised (or minimised) level by level. Under
/// [`CenterPolicy::Hashed`] it is over `max_centers` uniformly random words.
pub fn estimate_measure_spectrum<T: Scalar>(
    measure: &WeightedMeasureSpec<T>,
    theta: T,
    depth: usize,
    policy: &CenterPolicy,
    kind: SpectrumKind,
) -> Result<FitReport<T>> {
    if !(theta > T::zero() && theta < T::one()) {
        return Err(Error::OutOfRange(format!("theta = {theta} must lie in (0, 1)")));
    }
    let words = match policy {
        CenterPolicy::All => None,
        CenterPolicy::Hashed { max_centers, seed } => {
            if *max_centers == 0 {
                return Err(Error::NoValidCenters);
            }
            Some(random_words(measure.alphabet_len(), depth, *max_centers, *seed))
        }
        CenterPolicy::Explicit { .. } => {
            return Err(Error::InvalidSpec("measure spectra take words, not explicit points".into()))
        }
    };
    let ln2 = lit::<T>(2.0).ln();
    let mut ks = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let weights = measure.weights();
    match measure.as_carpet() {
        Some(spec) => {
            let columns = measure.column_masses().expect("carpet base");
            let col_of: Vec<T> = spec.cells().iter().map(|&(i, _)| columns[i as usize]).collect();
            for k in 1u32.. {
                let r = 2f64.powi(-(k as i32));
                let big = r.powf(theta.to_f64().expect("finite theta"));
                let (l1r, l2r) = (level_for_scale(spec.m(), r), level_for_scale(spec.n(), r));
                if l1r > depth {
                    break;
                }
                let (l1b, l2b) = (level_for_scale(spec.m(), big), level_for_scale(spec.n(), big));
                let log_ratio = match &words {
                    None => (0..l1r)
                        .map(|l| {
                            (0..weights.len())
                                .map(|d| {
                                    carpet_level_log(l, l1b, l2b, weights[d], col_of[d])
                                        - carpet_level_log(l, l1r, l2r, weights[d], col_of[d])
                                })
                                .fold(extreme_init(kind), |a, b| pick(kind, a, b))
                        })
                        .sum::<T>(),
                    Some(ws) => ws
                        .par_iter()
                        .map(|w| -> Result<T> {
                            let qb = approx_square(spec, w, big)?;
                            let qr = approx_square(spec, w, r)?;
                            Ok(approx_square_mass(measure, &qb).ln() - approx_square_mass(measure, &qr).ln())
                        })
                        .collect::<Result<Vec<T>>>()?
                        .into_iter()
                        .fold(extreme_init(kind), |a, b| pick(kind, a, b)),
                };
                ks.push(k);
                xs.push((T::one() - theta) * from_usize::<T>(k as usize) * ln2);
                ys.push(log_ratio);
            }
        }
        None => {
            let ifs = measure.to_ifs();
            let ratios = ifs
                .similarity_ratios()
                .ok_or_else(|| Error::InvalidSpec("measure spectra need a carpet or a similarity system".into()))?;
            let c_max = ratios.iter().copied().fold(T::zero(), T::max);
            if words.is_none() && common_ratio(&ifs).is_none() {
                return Err(Error::InvalidSpec(
                    "exact search over all words needs equal ratios; use a hashed policy".into(),
                ));
            }
            for k in 1u32.. {
                let r = lit::<T>(2.0).powi(-(k as i32));
                let big = r.powf(theta);
                if cylinder_level(c_max, r) > depth {
                    break;
                }
                let log_ratio = match &words {
                    None => {
                        let c = common_ratio(&ifs).expect("checked above");
                        let levels = cylinder_level(c, r) - cylinder_level(c, big);
                        let per = weights
                            .iter()
                            .map(|&p| -p.ln())
                            .fold(extreme_init(kind), |a, b| pick(kind, a, b));
                        per * from_usize::<T>(levels)
                    }
                    Some(ws) => ws
                        .iter()
                        .map(|w| {
                            let (mut size, mut mass) = (T::one(), T::zero());
                            let mut at_big = None;
                            for &letter in w.iter() {
                                if at_big.is_none() && size <= big {
                                    at_big = Some(mass);
                                }
                                if size <= r {
                                    break;
                                }
                                size = size * ratios[letter];
                                mass = mass + weights[letter].ln();
                            }
                            at_big.unwrap_or(mass) - mass
                        })
                        .fold(extreme_init(kind), |a, b| pick(kind, a, b)),
                };
                ks.push(k);
                xs.push((T::one() - theta) * from_usize::<T>(k as usize) * ln2);
                ys.push(log_ratio);
            }
        }
    }
    let centers = words.as_ref().map_or(0, Vec::len);
    let method = match kind {
        SpectrumKind::Assouad => "measure-assouad-spectrum-ols",
        SpectrumKind::Lower => "measure-lower-spectrum-ols",
    };
    let mut report = fit_logs(method, ks.into_iter(), xs, ys, centers)?;
    if words.is_none() {
        report.notes.push("exact extremum over all words".into());
    }
    Ok(report)
}

/// Mass ratio of two approximate squares at scale `r` that share an edge.
pub fn adjacent_square_ratio<T: Scalar>(
    measure: &WeightedMeasureSpec<T>,
    word_a: &[usize],
    word_b: &[usize],
    r: f64,
) -> Result<T> {
    let spec = measure
        .as_carpet()
        .ok_or_else(|| Error::InvalidSpec("adjacent squares need a carpet measure".into()))?;
    let qa = approx_square(spec, word_a, r)?;
    let qb = approx_square(spec, word_b, r)?;
    let tol = 1e-9 * qa.width.min(qa.height);
    let same = |a: f64, b: f64| (a - b).abs() <= tol;
    let horizontal = same(qa.y0, qb.y0) && same((qa.x0 - qb.x0).abs(), qa.width);
    let vertical = same(qa.x0, qb.x0) && same((qa.y0 - qb.y0).abs(), qa.height);
    if !(horizontal || vertical) {
        return Err(Error::InvalidSpec("approximate squares are not adjacent".into()));
    }
    Ok(approx_square_mass(measure, &qa) / approx_square_mass(measure, &qb))
}

/// One row of a doubling profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoublingRow<T> {
    pub scale: T,
    pub max_ratio: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoublingProfile<T> {
    pub factor: T,
    pub rows: Vec<DoublingRow<T>>,
    pub method: String,
}

impl<T: Scalar> DoublingProfile<T> {
    /// True when the ratio grows by more than `slack` from the first row to the last.
    pub fn is_growing(&self, slack: T) -> bool {
        match (self.rows.first(), self.rows.last()) {
            (Some(a), Some(b)) => b.max_ratio > a.max_ratio * slack,
            _ => false,
        }
    }
}

/// `max μ(B(x, 2r)) / μ(B(x, r))` per scale. See [`mass_ratio_profile`].
pub fn doubling_profile<T: Scalar>(
    measure: &WeightedMeasureSpec<T>,
    scales: &[T],
    policy: &CenterPolicy,
) -> Result<DoublingProfile<T>> {
    mass_ratio_profile(measure, scales, lit(2.0), policy)
}

/// `max μ(B(x, factor·r)) / μ(B(x, r))` per scale.
///
/// Carpets: the surrogate for the enlarged ball is the approximate square
/// together with its edge neighbours, and the profile is the largest mass
/// ratio of an admissible neighbour to the square, over all squares at the
/// scale (exact, by carry-chain arithmetic on digits). Similarity systems:
/// ball masses from cylinder descent at the sampled centers.
pub fn mass_ratio_profile<T: Scalar>(
    measure: &WeightedMeasureSpec<T>,
    scales: &[T],
    factor: T,
    policy: &CenterPolicy,
) -> Result<DoublingProfile<T>> {
    if !(factor >= T::one()) {
        return Err(Error::OutOfRange("factor must be at least 1".into()));
    }
    if scales.iter().any(|&r| !(r > T::zero() && r <= T::one())) {
        return Err(Error::OutOfRange("scales must lie in (0, 1]".into()));
    }
    if let Some(spec) = measure.as_carpet() {
        let rows = scales
            .iter()
            .map(|&r| {
                let max_ratio = if factor == T::one() {
                    T::one()
                } else {
                    let rf = r.to_f64().expect("finite scale");
                    max_neighbour_ratio(spec, measure, level_for_scale(spec.m(), rf), level_for_scale(spec.n(), rf))
                        .max(T::one())
                };
                DoublingRow { scale: r, max_ratio }
            })
            .collect();
        return Ok(DoublingProfile {
            factor,
            rows,
            method: "carpet-neighbour-squares".into(),
        });
    }
    let ifs = measure.to_ifs();
    let centers: Vec<Vec<T>> = match policy {
        CenterPolicy::Hashed { max_centers, seed } => {
            let s = measure.chaos_game((*max_centers).max(1), *seed)?;
            s.points().map(|p| p.to_vec()).collect()
        }
        CenterPolicy::Explicit { points } => points
            .iter()
            .map(|p| p.iter().map(|&x| lit::<T>(x)).collect())
            .collect(),
        CenterPolicy::All => {
            return Err(Error::InvalidSpec("a measure has no finite list of all centers".into()))
        }
    };
    if centers.is_empty() {
        return Err(Error::NoValidCenters);
    }
    let rows = scales
        .iter()
        .map(|&r| {
            let max_ratio = centers
                .par_iter()
                .map(|x| {
                    let small = ball_mass(&ifs, measure.weights(), x, r, r);
                    let large = ball_mass(&ifs, measure.weights(), x, factor * r, r);
                    if small > T::zero() {
                        large / small
                    } else {
                        T::one()
                    }
                })
                .reduce(T::one, T::max);
            DoublingRow { scale: r, max_ratio }
        })
        .collect();
    Ok(DoublingProfile {
        factor,
        rows,
        method: "cylinder-descent".into(),
    })
}

/// Largest `μ(Q')/μ(Q)` over edge-adjacent admissible approximate squares
/// with column depth `l1` and row depth `l2`.
fn max_neighbour_ratio<T: Scalar>(spec: &CarpetSpec, measure: &WeightedMeasureSpec<T>, l1: usize, l2: usize) -> T {
    let p = measure.weights();
    let cols = measure.column_masses().expect("carpet base");
    let (m, n) = (spec.m(), spec.n());
    let cell = |i: u32, j: u32| spec.cell_index(i, j).map(|k| p[k]);
    // Log factor μ-level(to)/μ-level(from) when the column digit changes, best over rows.
    let col_step = |l: usize, from: u32, to: u32| -> Option<T> {
        if l < l2 {
            (0..n)
                .filter_map(|j| Some((cell(to, j)? / cell(from, j)?).ln()))
                .reduce(T::max)
        } else {
            let (a, b) = (cols[from as usize], cols[to as usize]);
            (a > T::zero() && b > T::zero()).then(|| (b / a).ln())
        }
    };
    let row_step = |from: u32, to: u32| -> Option<T> {
        (0..m)
            .filter_map(|i| Some((cell(i, to)? / cell(i, from)?).ln()))
            .reduce(T::max)
    };
    let mut best = T::neg_infinity();
    // Horizontal: a = u c (m-1)^j, b = u (c+1) 0^j, in either direction.
    for t in 0..l1 {
        for c in 0..m - 1 {
            for (lo, hi, tail_from, tail_to) in [(c, c + 1, m - 1, 0), (c + 1, c, 0, m - 1)] {
                let mut acc = match col_step(t, lo, hi) {
                    Some(v) => v,
                    None => continue,
                };
                let mut ok = true;
                for l in t + 1..l1 {
                    match col_step(l, tail_from, tail_to) {
                        Some(v) => acc = acc + v,
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    best = best.max(acc);
                }
            }
        }
    }
    // Vertical: row digits carry, columns shared.
    for t in 0..l2 {
        for c in 0..n - 1 {
            for (lo, hi, tail_from, tail_to) in [(c, c + 1, n - 1, 0), (c + 1, c, 0, n - 1)] {
                let mut acc = match row_step(lo, hi) {
                    Some(v) => v,
                    None => continue,
                };
                let mut ok = true;
                for _ in t + 1..l2 {
                    match row_step(tail_from, tail_to) {
                        Some(v) => acc = acc + v,
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    best = best.max(acc);
                }
            }
        }
    }
    best.exp()
}

/// Mass of the closed sup-ball `B(x, rho)` by descending through cylinders
/// until they are smaller than `r / 16`.
fn ball_mass<T: Scalar>(ifs: &IfsSpec<T>, weights: &[T], x: &[T], rho: T, r: T) -> T {
    const MAX_DEPTH: usize = 48;
    let d = ifs.dim();
    let (lo0, hi0) = ifs.invariant_box();
    let eps = r / lit(16.0);
    let half = lit::<T>(0.5);
    let mut identity = vec![T::zero(); d * d];
    for i in 0..d {
        identity[i * d + i] = T::one();
    }
    let mut stack = vec![(identity, vec![T::zero(); d], T::one(), 0usize)];
    let mut total = T::zero();
    while let Some((lin, tr, mass, depth)) = stack.pop() {
        let mut lo = vec![T::zero(); d];
        let mut hi = vec![T::zero(); d];
        for i in 0..d {
            let mut center = tr[i];
            let mut radius = T::zero();
            for j in 0..d {
                let a = lin[i * d + j];
                center = center + a * (lo0[j] + hi0[j]) * half;
                radius = radius + a.abs() * (hi0[j] - lo0[j]) * half;
            }
            lo[i] = center - radius;
            hi[i] = center + radius;
        }
        let disjoint = (0..d).any(|i| hi[i] < x[i] - rho || lo[i] > x[i] + rho);
        if disjoint {
            continue;
        }
        let inside = (0..d).all(|i| lo[i] >= x[i] - rho && hi[i] <= x[i] + rho);
        let size = (0..d).map(|i| hi[i] - lo[i]).fold(T::zero(), T::max);
        if inside {
            total = total + mass;
        } else if size <= eps || depth >= MAX_DEPTH {
            let mid: Vec<T> = (0..d).map(|i| (lo[i] + hi[i]) * half).collect();
            if sup_distance(&mid, x) <= rho {
                total = total + mass;
            }
        } else {
            for (map, &w) in ifs.maps().iter().zip(weights) {
                let lin2 = mat_mul(&lin, map.linear(), d);
                let mut tr2 = tr.clone();
                for i in 0..d {
                    for j in 0..d {
                        tr2[i] = tr2[i] + lin[i * d + j] * map.translation()[j];
                    }
                }
                stack.push((lin2, tr2, mass * w, depth + 1));
            }
        }
    }
    total
}
