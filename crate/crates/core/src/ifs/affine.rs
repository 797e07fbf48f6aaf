use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{default_cap, Error, Result};
use crate::geometry::PointSet;
use crate::linalg;
use crate::scalar::{lit, Scalar};

/// Tolerance for the similarity check `A^T A = c^2 I`.
pub const SIMILARITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Similarity,
    Affine,
}

/// `x ↦ A x + t` on `R^d`, `A` stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap<T> {
    dim: usize,
    linear: Vec<T>,
    translation: Vec<T>,
    kind: MapKind,
    ratio: Option<T>,
}

impl<T: Scalar> AffineMap<T> {
    /// General affine map. Contraction is checked when the map joins an [`IfsSpec`].
    pub fn affine(dim: usize, linear: Vec<T>, translation: Vec<T>) -> Result<Self> {
        check_shape(dim, &linear, &translation)?;
        Ok(Self {
            dim,
            linear,
            translation,
            kind: MapKind::Affine,
            ratio: None,
        })
    }

    /// Similarity `x ↦ c O x + t` with `O` orthogonal.
    pub fn similarity(dim: usize, ratio: T, orthogonal: Vec<T>, translation: Vec<T>) -> Result<Self> {
        check_shape(dim, &orthogonal, &translation)?;
        let linear = orthogonal.into_iter().map(|x| x * ratio).collect();
        let map = Self {
            dim,
            linear,
            translation,
            kind: MapKind::Similarity,
            ratio: Some(ratio),
        };
        map.check_similarity()?;
        Ok(map)
    }

    /// `x ↦ c x + t` on the line.
    pub fn similarity_1d(ratio: T, translation: T) -> Result<Self> {
        Self::similarity(1, ratio, vec![T::one()], vec![translation])
    }

    /// Diagonal map `x ↦ diag(scales) x + t`.
    pub fn diagonal(scales: &[T], translation: Vec<T>) -> Result<Self> {
        let d = scales.len();
        let mut linear = vec![T::zero(); d * d];
        for (i, &s) in scales.iter().enumerate() {
            linear[i * d + i] = s;
        }
        let uniform = scales.iter().all(|s| s.abs() == scales[0].abs());
        if uniform {
            let c = scales[0].abs();
            let orth = linear.iter().map(|&x| x / c).collect();
            Self::similarity(d, c, orth, translation)
        } else {
            Self::affine(d, linear, translation)
        }
    }

    /// Rebuilds a map from stored parts, re-checking the declared kind.
    pub fn from_parts(
        dim: usize,
        linear: Vec<T>,
        translation: Vec<T>,
        kind: MapKind,
        ratio: Option<T>,
    ) -> Result<Self> {
        check_shape(dim, &linear, &translation)?;
        let ratio = match (kind, ratio) {
            (MapKind::Similarity, Some(c)) => Some(c),
            (MapKind::Similarity, None) => Some(linalg::operator_norm(&linear, dim)),
            (MapKind::Affine, _) => None,
        };
        let map = Self {
            dim,
            linear,
            translation,
            kind,
            ratio,
        };
        if kind == MapKind::Similarity {
            map.check_similarity()?;
        }
        Ok(map)
    }

    fn check_similarity(&self) -> Result<()> {
        let c = self.ratio.expect("similarity carries a ratio");
        if !(c > T::zero() && c < T::one()) {
            return Err(Error::InvalidSpec(format!("similarity ratio {c} outside (0, 1)")));
        }
        let d = self.dim;
        let tol = lit::<T>(SIMILARITY_TOL).max(T::epsilon() * lit(64.0));
        for i in 0..d {
            for j in 0..d {
                let g: T = (0..d).map(|k| self.linear[k * d + i] * self.linear[k * d + j]).sum();
                let want = if i == j { c * c } else { T::zero() };
                if (g - want).abs() > tol {
                    return Err(Error::InvalidSpec(
                        "linear part is not ratio times an orthogonal matrix".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn linear(&self) -> &[T] {
        &self.linear
    }

    pub fn translation(&self) -> &[T] {
        &self.translation
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    /// Declared similarity ratio.
    pub fn ratio(&self) -> Option<T> {
        self.ratio
    }

    /// Lipschitz constant: the operator norm of the linear part.
    pub fn lipschitz(&self) -> T {
        self.ratio
            .unwrap_or_else(|| linalg::operator_norm(&self.linear, self.dim))
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let mut out = self.translation.clone();
        self.apply_into(x, &mut out);
        out
    }

    fn apply_into(&self, x: &[T], out: &mut [T]) {
        let d = self.dim;
        for ((o, &t), row) in out.iter_mut().zip(&self.translation).zip(self.linear.chunks(d)) {
            *o = row.iter().zip(x).fold(t, |acc, (&a, &xj)| acc + a * xj);
        }
    }

    /// Unique fixed point, solving `(I - A) x = t`.
    pub fn fixed_point(&self) -> Vec<T> {
        let d = self.dim;
        let mut m = linalg::identity::<T>(d);
        for (a, b) in m.iter_mut().zip(&self.linear) {
            *a = *a - *b;
        }
        linalg::solve(&m, &self.translation, d).expect("contractions have a unique fixed point")
    }

    /// Image of the axis-aligned box `[lo, hi]`, as its bounding box.
    pub fn image_box(&self, lo: &[T], hi: &[T]) -> (Vec<T>, Vec<T>) {
        let d = self.dim;
        let half = lit::<T>(0.5);
        let mut out_lo = vec![T::zero(); d];
        let mut out_hi = vec![T::zero(); d];
        for i in 0..d {
            let mut center = self.translation[i];
            let mut radius = T::zero();
            for j in 0..d {
                let a = self.linear[i * d + j];
                center = center + a * (lo[j] + hi[j]) * half;
                radius = radius + a.abs() * (hi[j] - lo[j]) * half;
            }
            out_lo[i] = center - radius;
            out_hi[i] = center + radius;
        }
        (out_lo, out_hi)
    }
}

fn check_shape<T>(dim: usize, linear: &[T], translation: &[T]) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidSpec("dimension must be positive".into()));
    }
    if linear.len() != dim * dim {
        return Err(Error::DimensionMismatch {
            expected: dim * dim,
            found: linear.len(),
        });
    }
    if translation.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: translation.len(),
        });
    }
    Ok(())
}

/// Validated iterated function system.
#[derive(Debug, Clone, PartialEq)]
pub struct IfsSpec<T> {
    dim: usize,
    maps: Vec<AffineMap<T>>,
}

impl<T: Scalar> IfsSpec<T> {
    pub fn new(maps: Vec<AffineMap<T>>) -> Result<Self> {
        let first = maps
            .first()
            .ok_or_else(|| Error::InvalidSpec("an IFS needs at least one map".into()))?;
        let dim = first.dim();
        for m in &maps {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.dim(),
                });
            }
            if !(m.lipschitz() < T::one()) {
                return Err(Error::InvalidSpec(format!(
                    "map is not a contraction (operator norm {})",
                    m.lipschitz()
                )));
            }
        }
        Ok(Self { dim, maps })
    }

    /// Similarities `x ↦ c_i x + t_i` on the line.
    pub fn similarities_1d(ratios: &[T], translations: &[T]) -> Result<Self> {
        if ratios.len() != translations.len() {
            return Err(Error::DimensionMismatch {
                expected: ratios.len(),
                found: translations.len(),
            });
        }
        let maps = ratios
            .iter()
            .zip(translations)
            .map(|(&c, &t)| AffineMap::similarity_1d(c, t))
            .collect::<Result<Vec<_>>>()?;
        Self::new(maps)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn maps(&self) -> &[AffineMap<T>] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// Declared ratios when every map is a similarity.
    pub fn similarity_ratios(&self) -> Option<Vec<T>> {
        self.maps.iter().map(|m| m.ratio()).collect()
    }

    pub fn max_lipschitz(&self) -> T {
        self.maps
            .iter()
            .map(|m| m.lipschitz())
            .fold(T::zero(), T::max)
    }

    /// Composition `S_w = S_{w_1} ∘ ... ∘ S_{w_k}` applied to `x`.
    pub fn apply_word(&self, word: &[usize], x: &[T]) -> Result<Vec<T>> {
        let mut p = x.to_vec();
        for &i in word.iter().rev() {
            let m = self.maps.get(i).ok_or(Error::InvalidLetter {
                letter: i,
                alphabet: self.maps.len(),
            })?;
            p = m.apply(&p);
        }
        Ok(p)
    }

    /// Axis-aligned box containing the attractor.
    ///
    /// Starts from a ball around the first fixed point that every map sends
    /// into itself, then shrinks by intersecting with the hull of the images.
    pub fn invariant_box(&self) -> (Vec<T>, Vec<T>) {
        let x0 = self.maps[0].fixed_point();
        let c = self.max_lipschitz();
        let spread = self
            .maps
            .iter()
            .map(|m| crate::geometry::euclidean_distance(&m.apply(&x0), &x0))
            .fold(T::zero(), T::max);
        let radius = spread / (T::one() - c);
        let mut lo: Vec<T> = x0.iter().map(|&x| x - radius).collect();
        let mut hi: Vec<T> = x0.iter().map(|&x| x + radius).collect();
        for _ in 0..200 {
            let mut nlo = vec![T::infinity(); self.dim];
            let mut nhi = vec![T::neg_infinity(); self.dim];
            for m in &self.maps {
                let (a, b) = m.image_box(&lo, &hi);
                for i in 0..self.dim {
                    nlo[i] = nlo[i].min(a[i]);
                    nhi[i] = nhi[i].max(b[i]);
                }
            }
            let mut change = T::zero();
            for i in 0..self.dim {
                let (l, h) = (lo[i].max(nlo[i]), hi[i].min(nhi[i]));
                change = change.max((l - lo[i]).abs()).max((h - hi[i]).abs());
                lo[i] = l;
                hi[i] = h;
            }
            if change == T::zero() {
                break;
            }
        }
        (lo, hi)
    }

    /// Euclidean diameter of [`Self::invariant_box`].
    pub fn diameter_bound(&self) -> T {
        let (lo, hi) = self.invariant_box();
        crate::geometry::euclidean_distance(&lo, &hi)
    }
}

/// Where the cylinder representatives start.
#[derive(Debug, Clone, PartialEq)]
pub enum SeedChoice<T> {
    /// Fixed point of the first map.
    FirstFixedPoint,
    /// Fixed point of each word's last map.
    LastLetterFixedPoint,
    /// An explicit point, assumed to lie on the attractor.
    Point(Vec<T>),
}

/// Largest depth with `alphabet^depth <= cap`.
pub fn max_depth_under_cap(alphabet: usize, cap: usize) -> usize {
    if alphabet <= 1 {
        return usize::MAX;
    }
    let mut depth = 0;
    let mut total = 1u128;
    while total * alphabet as u128 <= cap as u128 {
        total *= alphabet as u128;
        depth += 1;
    }
    depth
}

pub(crate) fn check_depth_cap(alphabet: usize, depth: usize, cap: usize) -> Result<()> {
    let requested = (alphabet as u128).checked_pow(depth as u32).unwrap_or(u128::MAX);
    if requested > cap as u128 {
        return Err(Error::CapExceeded {
            requested,
            cap,
            suggestion: Some(max_depth_under_cap(alphabet, cap)),
        });
    }
    Ok(())
}

/// One representative per depth-`k` word, seeded at the first map's fixed point.
pub fn attractor_by_depth<T: Scalar>(ifs: &IfsSpec<T>, depth: usize) -> Result<PointSet<T>> {
    attractor_by_depth_with(ifs, depth, &SeedChoice::FirstFixedPoint, default_cap())
}

/// Representative points `S_w(seed)` over all words of length `depth`.
///
/// Resolution is `(max_i ‖A_i‖)^depth` times the diameter of the invariant box.
pub fn attractor_by_depth_with<T: Scalar>(
    ifs: &IfsSpec<T>,
    depth: usize,
    seed: &SeedChoice<T>,
    cap: usize,
) -> Result<PointSet<T>> {
    check_depth_cap(ifs.len(), depth, cap)?;
    let resolution = ifs.max_lipschitz().powi(depth as i32) * ifs.diameter_bound();
    let label = format!("IFS attractor, {} maps, depth {depth}", ifs.len());
    let coords = word_images(ifs, depth, seed)?;
    PointSet::dedup_from_flat(ifs.dim(), coords, resolution, label)
}

/// Flat coordinates of `S_w(seed)` for all words of length `depth`, ordered by first letter.
pub(crate) fn word_images<T: Scalar>(
    ifs: &IfsSpec<T>,
    depth: usize,
    seed: &SeedChoice<T>,
) -> Result<Vec<T>> {
    let d = ifs.dim();
    let (mut level, start) = match seed {
        SeedChoice::FirstFixedPoint => (ifs.maps[0].fixed_point(), 0),
        SeedChoice::Point(p) => {
            if p.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: p.len(),
                });
            }
            (p.clone(), 0)
        }
        SeedChoice::LastLetterFixedPoint => {
            if depth == 0 {
                return Err(Error::OutOfRange("depth must be positive".into()));
            }
            (ifs.maps.iter().flat_map(|m| m.fixed_point()).collect(), 1)
        }
    };
    let mut buf = vec![T::zero(); d];
    for _ in start..depth {
        let mut next = Vec::with_capacity(level.len() * ifs.len());
        for m in &ifs.maps {
            for p in level.chunks_exact(d) {
                m.apply_into(p, &mut buf);
                next.extend_from_slice(&buf);
            }
        }
        level = next;
    }
    Ok(level)
}

/// Burn-in iterations discarded by [`chaos_game`].
pub const BURN_IN: usize = 100;

/// Random-iteration sample of the invariant measure.
///
/// Deterministic in `seed` (ChaCha8 stream). Resolution is the cylinder
/// diameter at depth `log n / log(1 / c_max)`.
pub fn chaos_game<T: Scalar>(
    ifs: &IfsSpec<T>,
    weights: &[T],
    n_points: usize,
    seed: u64,
) -> Result<PointSet<T>> {
    if weights.len() != ifs.len() {
        return Err(Error::DimensionMismatch {
            expected: ifs.len(),
            found: weights.len(),
        });
    }
    if n_points == 0 {
        return Err(Error::EmptyOutput);
    }
    let w: Vec<f64> = weights.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect();
    let dist = WeightedIndex::new(&w).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = ifs.dim();
    let mut x = ifs.maps[0].fixed_point();
    let mut buf = vec![T::zero(); d];
    for _ in 0..BURN_IN {
        ifs.maps[dist.sample(&mut rng)].apply_into(&x, &mut buf);
        std::mem::swap(&mut x, &mut buf);
    }
    let mut coords = Vec::with_capacity(n_points * d);
    for _ in 0..n_points {
        ifs.maps[dist.sample(&mut rng)].apply_into(&x, &mut buf);
        std::mem::swap(&mut x, &mut buf);
        coords.extend_from_slice(&x);
    }
    let c = ifs.max_lipschitz();
    let depth = ((n_points as f64).ln() / (-c.to_f64().unwrap_or(0.5).ln())).floor();
    let resolution = c.powi(depth.max(0.0) as i32) * ifs.diameter_bound();
    PointSet::dedup_from_flat(
        d,
        coords,
        resolution,
        format!("chaos game, {n_points} points, seed {seed}"),
    )
}

/// Outcome of the bounding-box separation test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    /// True when the first-level pieces have pairwise disjoint box covers.
    pub separated: bool,
    /// First pair of map indices whose box covers meet.
    pub witness: Option<(usize, usize)>,
    /// A negative answer may come from coarse boxes rather than a genuine overlap.
    pub inconclusive: bool,
    pub depth: usize,
}

/// Bounding-box semi-decision for strong separation.
///
/// Each first-level piece `S_i(F)` is covered by the boxes of its cylinders
/// of length `depth` (closed boxes, so touching counts as meeting).
pub fn check_strong_separation<T: Scalar>(ifs: &IfsSpec<T>, depth: usize) -> SeparationReport {
    let depth = depth.clamp(1, max_depth_under_cap(ifs.len(), 1 << 14).max(1));
    let (lo, hi) = ifs.invariant_box();
    let d = ifs.dim();
    let mut covers: Vec<Vec<(Vec<T>, Vec<T>)>> = Vec::with_capacity(ifs.len());
    for i in 0..ifs.len() {
        let mut boxes = vec![(lo.clone(), hi.clone())];
        for _ in 1..depth {
            boxes = ifs
                .maps
                .iter()
                .flat_map(|m| boxes.iter().map(move |(a, b)| m.image_box(a, b)))
                .collect();
        }
        covers.push(boxes.iter().map(|(a, b)| ifs.maps[i].image_box(a, b)).collect());
    }
    let meets = |a: &(Vec<T>, Vec<T>), b: &(Vec<T>, Vec<T>)| {
        (0..d).all(|k| a.0[k] <= b.1[k] && b.0[k] <= a.1[k])
    };
    for i in 0..ifs.len() {
        for j in i + 1..ifs.len() {
            if covers[i].iter().any(|a| covers[j].iter().any(|b| meets(a, b))) {
                return SeparationReport {
                    separated: false,
                    witness: Some((i, j)),
                    inconclusive: true,
                    depth,
                };
            }
        }
    }
    SeparationReport {
        separated: true,
        witness: None,
        inconclusive: false,
        depth,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cantor() -> IfsSpec<f64> {
        IfsSpec::similarities_1d(&[1.0 / 3.0, 1.0 / 3.0], &[0.0, 2.0 / 3.0]).unwrap()
    }

    #[test]
    fn cantor_depth_two() {
        let s = attractor_by_depth(&cantor(), 2).unwrap();
        let mut v = s.coords().to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let want = [0.0, 2.0 / 9.0, 2.0 / 3.0, 8.0 / 9.0];
        for (a, b) in v.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((s.resolution() - 1.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn depth_one_fixed_points() {
        let s = attractor_by_depth_with(&cantor(), 1, &SeedChoice::LastLetterFixedPoint, 1 << 10)
            .unwrap();
        let v = s.coords();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0], 0.0);
        assert!((v[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cap_suggests_depth() {
        let err = attractor_by_depth_with(&cantor(), 30, &SeedChoice::FirstFixedPoint, 1 << 10)
            .unwrap_err();
        assert_eq!(
            err,
            Error::CapExceeded {
                requested: 1 << 30,
                cap: 1 << 10,
                suggestion: Some(10)
            }
        );
    }

    #[test]
    fn rejects_non_contractions_and_fake_similarities() {
        assert!(AffineMap::similarity_1d(1.0, 0.0).is_err());
        let stretch = AffineMap::affine(1, vec![1.5], vec![0.0]).unwrap();
        assert!(IfsSpec::new(vec![stretch]).is_err());
        assert!(AffineMap::similarity(2, 0.5, vec![1.0, 0.0, 0.0, 0.5], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn invariant_box_of_cantor_is_unit_interval() {
        let (lo, hi) = cantor().invariant_box();
        assert!(lo[0].abs() < 1e-12 && (hi[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invariant_box_contains_rotating_attractor() {
        let rot = AffineMap::similarity(2, 0.7, vec![0.6, -0.8, 0.8, 0.6], vec![0.3, 0.1]).unwrap();
        let half = AffineMap::diagonal(&[0.5, 0.5], vec![-0.2, 0.4]).unwrap();
        let ifs = IfsSpec::new(vec![rot, half]).unwrap();
        let (lo, hi) = ifs.invariant_box();
        let pts = attractor_by_depth(&ifs, 12).unwrap();
        for p in pts.points() {
            for a in 0..2 {
                assert!(p[a] >= lo[a] - 1e-12 && p[a] <= hi[a] + 1e-12);
            }
        }
    }

    #[test]
    fn chaos_game_contract() {
        let ifs = cantor();
        assert_eq!(
            chaos_game(&ifs, &[0.5, 0.5], 0, 1).unwrap_err(),
            Error::EmptyOutput
        );
        let a = chaos_game(&ifs, &[0.5, 0.5], 1000, 7).unwrap();
        let b = chaos_game(&ifs, &[0.5, 0.5], 1000, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn chaos_game_cantor_mass() {
        let s = chaos_game(&cantor(), &[0.5, 0.5], 100_000, 42).unwrap();
        // Duplicates are removed, so count distinct visits on each side.
        let left = s.points().filter(|p| p[0] <= 1.0 / 3.0 + 1e-12).count();
        let frac = left as f64 / s.len() as f64;
        assert!((frac - 0.5).abs() < 0.01, "left fraction {frac}");
    }

    #[test]
    fn separation_examples() {
        assert!(check_strong_separation(&cantor(), 3).separated);
        let halves = IfsSpec::similarities_1d(&[0.5, 0.5], &[0.0, 0.5]).unwrap();
        let r = check_strong_separation(&halves, 4);
        assert!(!r.separated);
        assert_eq!(r.witness, Some((0, 1)));
        let hm = IfsSpec::similarities_1d(&[1.0 / 3.0, 0.5, 0.125], &[0.0, 0.0, 0.875]).unwrap();
        assert!(!check_strong_separation(&hm, 4).separated);
    }
}
