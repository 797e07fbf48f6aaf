//! Point sets and the covering/packing counts every dimension reduces to.
//!
//! Balls are sup-norm balls (axis-aligned cubes) so that restricting to a
//! ball composes exactly with the dyadic mesh. The mesh is anchored at the
//! origin with half-open cells `[a, a + r)^d`; a point lying on the set's
//! upper bounding face, when that face is itself a lattice hyperplane, is
//! folded into the cell below.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{default_cap, Error, Result};
use crate::scalar::{lit, pow2, Scalar};

/// Counts at scale `r` are trusted only when `r >= GATE_FACTOR * resolution`.
pub const GATE_FACTOR: f64 = 10.0;

/// Finite sample of a set in `R^d`, dense to within `resolution`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet<T> {
    dim: usize,
    coords: Vec<T>,
    resolution: T,
    label: String,
}

impl<T: Scalar> PointSet<T> {
    /// Builds a point set, rejecting ragged input and duplicates.
    pub fn new(
        dim: usize,
        points: Vec<Vec<T>>,
        resolution: T,
        label: impl Into<String>,
    ) -> Result<Self> {
        let coords = flatten(dim, points)?;
        Self::from_flat(dim, coords, resolution, label)
    }

    /// Builds a point set from row-major coordinates, rejecting duplicates.
    pub fn from_flat(
        dim: usize,
        coords: Vec<T>,
        resolution: T,
        label: impl Into<String>,
    ) -> Result<Self> {
        validate_header(dim, &coords, resolution)?;
        let mut seen = HashSet::with_capacity(coords.len() / dim);
        for (i, p) in coords.chunks_exact(dim).enumerate() {
            if !seen.insert(key_bits(p)) {
                return Err(Error::DuplicatePoint(i));
            }
        }
        Ok(Self {
            dim,
            coords,
            resolution,
            label: label.into(),
        })
    }

    /// Builds a point set, silently keeping only the first copy of each point.
    pub fn dedup_from_flat(
        dim: usize,
        coords: Vec<T>,
        resolution: T,
        label: impl Into<String>,
    ) -> Result<Self> {
        validate_header(dim, &coords, resolution)?;
        let mut seen = HashSet::with_capacity(coords.len() / dim);
        let mut kept = Vec::with_capacity(coords.len());
        for p in coords.chunks_exact(dim) {
            if seen.insert(key_bits(p)) {
                kept.extend_from_slice(p);
            }
        }
        Ok(Self {
            dim,
            coords: kept,
            resolution,
            label: label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn resolution(&self) -> T {
        self.resolution
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Translates every point by `offset`.
    pub fn translated(&self, offset: &[T]) -> Result<Self> {
        if offset.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: offset.len(),
            });
        }
        let coords = self
            .coords
            .chunks_exact(self.dim)
            .flat_map(|p| p.iter().zip(offset).map(|(&a, &b)| a + b))
            .collect();
        Self::dedup_from_flat(self.dim, coords, self.resolution, self.label.clone())
    }

    /// Keeps the points for which `keep` returns true.
    pub fn filtered(&self, mut keep: impl FnMut(&[T]) -> bool) -> Self {
        let coords = self
            .points()
            .filter(|p| keep(p))
            .flat_map(|p| p.iter().copied())
            .collect();
        Self {
            dim: self.dim,
            coords,
            resolution: self.resolution,
            label: self.label.clone(),
        }
    }

    /// Per-axis maximum coordinate.
    pub fn axis_max(&self) -> Vec<T> {
        let mut max = vec![T::neg_infinity(); self.dim];
        for p in self.points() {
            for (m, &x) in max.iter_mut().zip(p) {
                if x > *m {
                    *m = x;
                }
            }
        }
        max
    }

    /// True when `r = 2^-k` passes the resolution gate.
    pub fn scale_is_valid(&self, scale: DyadicScale) -> bool {
        scale.value::<T>() >= lit::<T>(GATE_FACTOR) * self.resolution
    }

    /// Finest dyadic exponent passing the resolution gate.
    pub fn finest_valid_exponent(&self) -> Option<u32> {
        if self.resolution <= T::zero() {
            return None;
        }
        let bound = lit::<T>(GATE_FACTOR) * self.resolution;
        let k = (-bound.log2()).floor().to_i64()?;
        if k < 0 {
            return None;
        }
        let mut k = k as u32;
        // guard against log2 rounding
        while k > 0 && !self.scale_is_valid(DyadicScale::new(k)) {
            k -= 1;
        }
        while self.scale_is_valid(DyadicScale::new(k + 1)) {
            k += 1;
        }
        self.scale_is_valid(DyadicScale::new(k)).then_some(k)
    }

    fn check_scale(&self, scale: DyadicScale) -> Result<()> {
        if self.is_empty() {
            return Err(Error::EmptySet);
        }
        if !self.scale_is_valid(scale) {
            return Err(Error::ResolutionViolation {
                scale: scale.value::<f64>(),
                resolution: self.resolution.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }
}

fn validate_header<T: Scalar>(dim: usize, coords: &[T], resolution: T) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidSpec("ambient dimension must be positive".into()));
    }
    if !coords.len().is_multiple_of(dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: coords.len() % dim,
        });
    }
    if !(resolution >= T::zero()) || !resolution.is_finite() {
        return Err(Error::InvalidSpec("resolution must be finite and >= 0".into()));
    }
    if coords.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidSpec("non-finite coordinate".into()));
    }
    Ok(())
}

fn flatten<T: Scalar>(dim: usize, points: Vec<Vec<T>>) -> Result<Vec<T>> {
    let mut coords = Vec::with_capacity(points.len() * dim);
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.len(),
            });
        }
        coords.extend(p);
    }
    Ok(coords)
}

fn key_bits<T: Scalar>(p: &[T]) -> Vec<u64> {
    p.iter().map(|x| x.exact_bits()).collect()
}

/// Dyadic scale `r = 2^-exponent`. Larger exponents are finer scales.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DyadicScale {
    pub exponent: u32,
}

impl DyadicScale {
    pub fn new(exponent: u32) -> Self {
        Self { exponent }
    }

    /// The side length `2^-k`.
    pub fn value<T: Scalar>(self) -> T {
        pow2::<T>(-(self.exponent as i32))
    }

    /// The scale twice as fine.
    pub fn half(self) -> Self {
        Self::new(self.exponent + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMethod {
    Mesh,
    GreedyPacking,
}

/// A covering or packing number at one scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub scale: DyadicScale,
    pub count: usize,
    pub method: CountMethod,
    /// Resolution gate factor applied before counting.
    pub gate_factor: f64,
}

impl CountReport {
    fn new(scale: DyadicScale, count: usize, method: CountMethod) -> Self {
        Self {
            scale,
            count,
            method,
            gate_factor: GATE_FACTOR,
        }
    }
}

/// Mesh cell index of coordinate `x` along an axis whose maximum is `axis_max`.
#[inline]
pub(crate) fn cell_index<T: Scalar>(x: T, inv_side: T, axis_max: T) -> i64 {
    let scaled = x * inv_side;
    let fl = scaled.floor();
    let idx = fl.to_i64().expect("cell index fits in i64");
    if x == axis_max && scaled == fl {
        idx - 1
    } else {
        idx
    }
}

fn cell_keys<T: Scalar>(set: &PointSet<T>, scale: DyadicScale, fold_max: &[T]) -> Vec<i64> {
    let inv_side = pow2::<T>(scale.exponent as i32);
    let dim = set.dim();
    let mut keys = Vec::with_capacity(set.coords.len());
    for p in set.points() {
        for a in 0..dim {
            keys.push(cell_index(p[a], inv_side, fold_max[a]));
        }
    }
    keys
}

fn distinct_rows(keys: &[i64], dim: usize) -> usize {
    let n = keys.len() / dim;
    if dim == 1 {
        let mut v = keys.to_vec();
        v.sort_unstable();
        v.dedup();
        return v.len();
    }
    let mut order: Vec<u32> = (0..n as u32).collect();
    let row = |i: u32| &keys[i as usize * dim..(i as usize + 1) * dim];
    order.sort_unstable_by(|&a, &b| row(a).cmp(row(b)));
    let mut count = 0;
    let mut prev: Option<u32> = None;
    for &i in &order {
        if prev.is_none_or(|p| row(p) != row(i)) {
            count += 1;
        }
        prev = Some(i);
    }
    count
}

/// Number of origin-anchored mesh cells of side `2^-k` meeting the set.
pub fn mesh_count<T: Scalar>(set: &PointSet<T>, scale: DyadicScale) -> Result<CountReport> {
    set.check_scale(scale)?;
    let max = set.axis_max();
    let keys = cell_keys(set, scale, &max);
    Ok(CountReport::new(
        scale,
        distinct_rows(&keys, set.dim()),
        CountMethod::Mesh,
    ))
}

/// Size of a greedy maximal `r`-separated subset, first point wins.
///
/// Separation is strict in the sup norm: two points are compatible when
/// their sup distance exceeds `r`.
pub fn packing_count<T: Scalar>(set: &PointSet<T>, scale: DyadicScale) -> Result<CountReport> {
    set.check_scale(scale)?;
    let r = scale.value::<T>();
    let inv = pow2::<T>(scale.exponent as i32);
    let dim = set.dim();
    let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    let mut accepted = 0usize;
    let mut neighbour = vec![0i64; dim];
    for (i, p) in set.points().enumerate() {
        let cell: Vec<i64> = p
            .iter()
            .map(|&x| (x * inv).floor().to_i64().expect("cell index fits in i64"))
            .collect();
        let mut clash = false;
        let total = 3usize.pow(dim as u32);
        'outer: for code in 0..total {
            let mut c = code;
            for a in 0..dim {
                neighbour[a] = cell[a] + (c % 3) as i64 - 1;
                c /= 3;
            }
            if let Some(members) = grid.get(&neighbour) {
                for &j in members {
                    if sup_distance(p, set.point(j)) <= r {
                        clash = true;
                        break 'outer;
                    }
                }
            }
        }
        if !clash {
            grid.entry(cell).or_default().push(i);
            accepted += 1;
        }
    }
    Ok(CountReport::new(scale, accepted, CountMethod::GreedyPacking))
}

/// Mesh count of the part of the set inside the closed sup-ball `B(center, radius)`.
///
/// Cells are those of the parent set's mesh, folding included, so local
/// counts are consistent with [`mesh_count`] on the whole set.
pub fn local_cover_count<T: Scalar>(
    set: &PointSet<T>,
    center: &[T],
    radius: T,
    scale: DyadicScale,
) -> Result<CountReport> {
    set.check_scale(scale)?;
    if center.len() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            found: center.len(),
        });
    }
    if !(scale.value::<T>() < radius) {
        return Err(Error::OutOfRange("local count needs r < R".into()));
    }
    let tol = set.resolution();
    if !set.points().any(|p| sup_distance(p, center) <= tol) {
        return Err(Error::CenterOffSet);
    }
    let index = MeshIndex::build(set, scale);
    Ok(CountReport::new(
        scale,
        index.local_count(center, radius),
        CountMethod::Mesh,
    ))
}

/// Largest pairwise Euclidean distance.
pub fn diameter<T: Scalar>(set: &PointSet<T>) -> Result<T> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    if set.dim() == 1 {
        let (lo, hi) = set
            .coords
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &x| {
                (lo.min(x), hi.max(x))
            });
        return Ok(hi - lo);
    }
    let n = set.len();
    let mut best = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            let d = euclidean_distance(set.point(i), set.point(j));
            if d > best {
                best = d;
            }
        }
    }
    Ok(best)
}

/// Cartesian product `A x B` with the default cap.
pub fn product_set<T: Scalar>(a: &PointSet<T>, b: &PointSet<T>) -> Result<PointSet<T>> {
    product_set_with_cap(a, b, default_cap())
}

pub fn product_set_with_cap<T: Scalar>(
    a: &PointSet<T>,
    b: &PointSet<T>,
    cap: usize,
) -> Result<PointSet<T>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let total = a.len() as u128 * b.len() as u128;
    if total > cap as u128 {
        return Err(Error::ProductTooLarge { points: total, cap });
    }
    let dim = a.dim() + b.dim();
    let mut coords = Vec::with_capacity(total as usize * dim);
    for p in a.points() {
        for q in b.points() {
            coords.extend_from_slice(p);
            coords.extend_from_slice(q);
        }
    }
    Ok(PointSet {
        dim,
        coords,
        resolution: a.resolution().max(b.resolution()),
        label: format!("({}) x ({})", a.label(), b.label()),
    })
}

/// Set of pairwise Euclidean distances, `0` included, with the default cap.
pub fn distance_set<T: Scalar>(set: &PointSet<T>) -> Result<PointSet<T>> {
    distance_set_with_cap(set, default_cap())
}

pub fn distance_set_with_cap<T: Scalar>(set: &PointSet<T>, cap: usize) -> Result<PointSet<T>> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = set.len() as u128;
    if n * n > cap as u128 {
        return Err(Error::CapExceeded {
            requested: n * n,
            cap,
            suggestion: None,
        });
    }
    let mut dists = vec![T::zero()];
    for i in 0..set.len() {
        for j in i + 1..set.len() {
            dists.push(euclidean_distance(set.point(i), set.point(j)));
        }
    }
    dists.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
    dists.dedup();
    PointSet::from_flat(
        1,
        dists,
        lit::<T>(2.0) * set.resolution(),
        format!("D({})", set.label()),
    )
}

pub fn sup_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |m, (&x, &y)| m.max((x - y).abs()))
}

pub fn euclidean_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<T>()
        .sqrt()
}

/// Occupied mesh cells at one scale, with enough structure to answer
/// ball-restricted counts without touching every point.
#[derive(Debug, Clone)]
pub struct MeshIndex<T> {
    dim: usize,
    inv_side: T,
    fold_max: Vec<T>,
    /// Row-major cell keys, sorted lexicographically.
    keys: Vec<i64>,
    /// Point run `[start, end)` of each cell in `sorted`.
    runs: Vec<(u32, u32)>,
    /// Per-cell bounding box of its points: `[min_0..min_d, max_0..max_d]`.
    bbox: Vec<T>,
    /// Points reordered by (cell, first coordinate).
    sorted: Vec<T>,
    /// Distinct first-axis keys with their cell ranges.
    axis0: Vec<(i64, u32, u32)>,
}

impl<T: Scalar> MeshIndex<T> {
    pub fn build(set: &PointSet<T>, scale: DyadicScale) -> Self {
        let dim = set.dim();
        let fold_max = set.axis_max();
        let keys_all = cell_keys(set, scale, &fold_max);
        let n = set.len();
        let row = |i: u32| &keys_all[i as usize * dim..(i as usize + 1) * dim];
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_unstable_by(|&a, &b| {
            row(a).cmp(row(b)).then_with(|| {
                set.point(a as usize)[0]
                    .partial_cmp(&set.point(b as usize)[0])
                    .expect("finite coordinates")
            })
        });

        let mut keys = Vec::new();
        let mut runs = Vec::new();
        let mut bbox = Vec::new();
        let mut sorted = Vec::with_capacity(set.coords.len());
        let mut start = 0usize;
        while start < n {
            let key = row(order[start]);
            let mut end = start + 1;
            while end < n && row(order[end]) == key {
                end += 1;
            }
            keys.extend_from_slice(key);
            runs.push((start as u32, end as u32));
            let mut lo = vec![T::infinity(); dim];
            let mut hi = vec![T::neg_infinity(); dim];
            for &i in &order[start..end] {
                let p = set.point(i as usize);
                sorted.extend_from_slice(p);
                for a in 0..dim {
                    lo[a] = lo[a].min(p[a]);
                    hi[a] = hi[a].max(p[a]);
                }
            }
            bbox.extend(lo);
            bbox.extend(hi);
            start = end;
        }

        let mut axis0 = Vec::new();
        let ncells = runs.len();
        let mut c = 0usize;
        while c < ncells {
            let k0 = keys[c * dim];
            let mut e = c + 1;
            while e < ncells && keys[e * dim] == k0 {
                e += 1;
            }
            axis0.push((k0, c as u32, e as u32));
            c = e;
        }

        Self {
            dim,
            inv_side: pow2::<T>(scale.exponent as i32),
            fold_max,
            keys,
            runs,
            bbox,
            sorted,
            axis0,
        }
    }

    /// Number of occupied cells (the mesh count).
    pub fn cell_count(&self) -> usize {
        self.runs.len()
    }

    /// Occupied cells holding at least one point of the closed sup-ball.
    pub fn local_count(&self, center: &[T], radius: T) -> usize {
        let dim = self.dim;
        let lo: Vec<i64> = (0..dim)
            .map(|a| self.raw_index(center[a] - radius) - 1)
            .collect();
        let hi: Vec<i64> = (0..dim)
            .map(|a| self.raw_index(center[a] + radius))
            .collect();
        let first = self.axis0.partition_point(|e| e.0 < lo[0]);
        let mut count = 0;
        for &(k0, cs, ce) in &self.axis0[first..] {
            if k0 > hi[0] {
                break;
            }
            let (cs, ce) = (cs as usize, ce as usize);
            let (from, to) = if dim >= 2 {
                let axis1 = |c: usize| self.keys[c * dim + 1];
                (
                    partition_range(cs, ce, |c| axis1(c) < lo[1]),
                    partition_range(cs, ce, |c| axis1(c) <= hi[1]),
                )
            } else {
                (cs, ce)
            };
            for cell in from..to {
                if self.cell_meets_ball(cell, center, radius) {
                    count += 1;
                }
            }
        }
        count
    }

    fn raw_index(&self, x: T) -> i64 {
        let s = (x * self.inv_side).floor();
        s.to_i64().unwrap_or(if s > T::zero() { i64::MAX / 2 } else { i64::MIN / 2 })
    }

    fn cell_meets_ball(&self, cell: usize, center: &[T], radius: T) -> bool {
        let dim = self.dim;
        let b = &self.bbox[cell * 2 * dim..(cell + 1) * 2 * dim];
        let (lo, hi) = b.split_at(dim);
        let mut inside = true;
        for a in 0..dim {
            let (bl, bh) = (center[a] - radius, center[a] + radius);
            if hi[a] < bl || lo[a] > bh {
                return false;
            }
            if lo[a] < bl || hi[a] > bh {
                inside = false;
            }
        }
        if inside {
            return true;
        }
        let (s, e) = self.runs[cell];
        let pts = &self.sorted[s as usize * dim..e as usize * dim];
        let npts = (e - s) as usize;
        let lo0 = center[0] - radius;
        let hi0 = center[0] + radius;
        let mut i = partition_rows(pts, dim, npts, |p| p[0] < lo0);
        while i < npts {
            let p = &pts[i * dim..(i + 1) * dim];
            if p[0] > hi0 {
                break;
            }
            if sup_distance(p, center) <= radius {
                return true;
            }
            i += 1;
        }
        false
    }

    /// Fold maxima used for the cell assignment.
    pub fn fold_max(&self) -> &[T] {
        &self.fold_max
    }
}

fn partition_rows<T>(pts: &[T], dim: usize, n: usize, pred: impl Fn(&[T]) -> bool) -> usize {
    partition_range(0, n, |i| pred(&pts[i * dim..(i + 1) * dim]))
}

/// First index in `[lo, hi)` where `pred` turns false.
fn partition_range(mut lo: usize, mut hi: usize, pred: impl Fn(usize) -> bool) -> usize {
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}
