//! Mandelbrot percolation with path-keyed retention.
//!
//! Every cell's fate is a pure function of `(seed, level, coordinates)`, so a
//! tree can be rebuilt cell by cell in any order and expanded in parallel.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{default_cap, Error, Result};
use crate::estimators::splitmix64;
use crate::geometry::PointSet;
use crate::scalar::{lit, Scalar};

/// Name of the retention hash, stored with every tree.
pub const RETENTION_HASH: &str =
    "splitmix64 fold: h = mix(seed ^ level * 0x9e3779b97f4a7c15), h = mix(h ^ c_i) per coordinate; keep iff (h >> 11) * 2^-53 < p";

const LEVEL_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// Parameters of one percolation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercolationConfig {
    pub d: u32,
    pub m: u32,
    pub p: f64,
    pub depth: u32,
    pub seed: u64,
}

impl PercolationConfig {
    pub fn new(d: u32, m: u32, p: f64, depth: u32, seed: u64) -> Result<Self> {
        let c = Self { d, m, p, depth, seed };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.m < 2 {
            return Err(Error::OutOfRange(format!("need d >= 1 and m >= 2, got d = {}, m = {}", self.d, self.m)));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::OutOfRange(format!("p = {} must lie in (0, 1)", self.p)));
        }
        let bits = f64::from(self.d) * f64::from(self.depth) * f64::from(self.m).log2();
        if bits >= 64.0 {
            return Err(Error::InvalidSpec(format!(
                "m^(d K) = {}^({} x {}) does not fit a 64-bit cell index",
                self.m, self.d, self.depth
            )));
        }
        Ok(())
    }

    /// `m^{-d}`: retention at or below this dies out almost surely.
    pub fn critical_p(&self) -> f64 {
        f64::from(self.m).powi(-(self.d as i32))
    }

    pub fn is_supercritical(&self) -> bool {
        self.p > self.critical_p()
    }

    /// `d + log p / log m`.
    pub fn dimension(&self) -> f64 {
        f64::from(self.d) + self.p.ln() / f64::from(self.m).ln()
    }

    /// Expected number of cells over levels `0..=depth`.
    pub fn expected_cells(&self) -> f64 {
        let g = self.p * f64::from(self.m).powi(self.d as i32);
        (0..=self.depth).map(|k| g.powi(k as i32)).sum()
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn with_depth(mut self, depth: u32) -> Self {
        self.depth = depth;
        self
    }
}

/// Hash of a cell at `level` with integer coordinates `coords`.
pub fn cell_hash(seed: u64, level: u32, coords: &[u64]) -> u64 {
    coords
        .iter()
        .fold(splitmix64(seed ^ u64::from(level).wrapping_mul(LEVEL_SALT)), |h, &c| {
            splitmix64(h ^ c)
        })
}

/// Retention decision for a cell below the root.
pub fn is_retained(seed: u64, p: f64, level: u32, coords: &[u64]) -> bool {
    let u = (cell_hash(seed, level, coords) >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    u < p
}

/// Kept cells of every level, each packed as `sum_i c_i side^i` with
/// `side = m^level`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercolationTree {
    pub config: PercolationConfig,
    pub hash: String,
    levels: Vec<Vec<u64>>,
}

impl PercolationTree {
    pub fn depth(&self) -> u32 {
        self.config.depth
    }

    pub fn level(&self, k: u32) -> &[u64] {
        &self.levels[k as usize]
    }

    /// Side length of the level-`k` grid, `m^k`.
    pub fn side(&self, k: u32) -> u64 {
        u64::from(self.config.m).pow(k)
    }

    pub fn decode(&self, k: u32, packed: u64) -> Vec<u64> {
        decode(packed, self.side(k), self.config.d)
    }

    pub fn cells(&self, k: u32) -> impl Iterator<Item = Vec<u64>> + '_ {
        let side = self.side(k);
        self.levels[k as usize]
            .iter()
            .map(move |&c| decode(c, side, self.config.d))
    }

    pub fn survived(&self) -> bool {
        self.levels.last().is_some_and(|l| !l.is_empty())
    }
}

fn decode(mut packed: u64, side: u64, d: u32) -> Vec<u64> {
    (0..d)
        .map(|_| {
            let c = packed % side;
            packed /= side;
            c
        })
        .collect()
}

fn encode(coords: &[u64], side: u64) -> u64 {
    coords.iter().rev().fold(0, |acc, &c| acc * side + c)
}

/// Kept children of a kept cell, in lexicographic order of the offset.
fn kept_children(config: &PercolationConfig, level: u32, parent: &[u64]) -> Vec<Vec<u64>> {
    let m = u64::from(config.m);
    let d = config.d as usize;
    let n_children = m.pow(config.d);
    let mut out = Vec::new();
    let mut child = vec![0u64; d];
    for offset in 0..n_children {
        let mut o = offset;
        for i in 0..d {
            child[i] = parent[i] * m + o % m;
            o /= m;
        }
        if is_retained(config.seed, config.p, level + 1, &child) {
            out.push(child.clone());
        }
    }
    out
}

/// Simulates under the default cap.
pub fn simulate(config: &PercolationConfig) -> Result<PercolationTree> {
    simulate_with_cap(config, default_cap())
}

/// Simulates levels `0..=depth`. The cap bounds both the expected cell
/// count and the realised size of every level.
pub fn simulate_with_cap(config: &PercolationConfig, cap: usize) -> Result<PercolationTree> {
    config.validate()?;
    let expected = config.expected_cells();
    if expected > cap as f64 {
        let mut k = 0;
        while k < config.depth && config.with_depth(k + 1).expected_cells() <= cap as f64 {
            k += 1;
        }
        return Err(Error::CapExceeded {
            requested: expected.min(u128::MAX as f64) as u128,
            cap,
            suggestion: Some(k as usize),
        });
    }
    let d = config.d;
    let mut levels = vec![vec![0u64]];
    for k in 0..config.depth {
        let side = u64::from(config.m).pow(k);
        let child_side = side * u64::from(config.m);
        let next: Vec<u64> = levels[k as usize]
            .par_iter()
            .flat_map_iter(|&packed| {
                kept_children(config, k, &decode(packed, side, d))
                    .into_iter()
                    .map(move |c| encode(&c, child_side))
            })
            .collect();
        if next.len() > cap {
            return Err(Error::CapExceeded {
                requested: next.len() as u128,
                cap,
                suggestion: Some(k as usize),
            });
        }
        levels.push(next);
    }
    Ok(PercolationTree {
        config: *config,
        hash: RETENTION_HASH.to_string(),
        levels,
    })
}

/// `Z_k` for `k = 0..=depth`.
pub fn occupancy_counts(tree: &PercolationTree) -> Vec<usize> {
    tree.levels.iter().map(Vec::len).collect()
}

/// A kept cell whose whole depth-`i` subtree is kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullSubgrid {
    pub level: u32,
    pub cell: Vec<u64>,
    pub i: u32,
}

fn subtree_full(config: &PercolationConfig, level: u32, cell: &[u64], i: u32) -> bool {
    if i == 0 {
        return true;
    }
    let m = u64::from(config.m);
    let d = config.d as usize;
    let mut child = vec![0u64; d];
    for offset in 0..m.pow(config.d) {
        let mut o = offset;
        for j in 0..d {
            child[j] = cell[j] * m + o % m;
            o /= m;
        }
        if !is_retained(config.seed, config.p, level + 1, &child) || !subtree_full(config, level + 1, &child, i - 1) {
            return false;
        }
    }
    true
}

/// First kept cell, scanning levels `0..=K-i` in order, all of whose
/// `m^{d i}` descendants `i` levels down are kept.
pub fn largest_full_subgrid(tree: &PercolationTree, i: u32) -> Option<FullSubgrid> {
    if i > tree.depth() {
        return None;
    }
    (0..=tree.depth() - i).find_map(|k| {
        tree.cells(k)
            .collect::<Vec<_>>()
            .into_par_iter()
            .find_first(|c| subtree_full(&tree.config, k, c, i))
            .map(|cell| FullSubgrid { level: k, cell, i })
    })
}

/// Largest `i >= 1` with a full subgrid, or 0 if none.
pub fn full_subgrid_max_i(tree: &PercolationTree) -> u32 {
    let mut best = 0;
    while best < tree.depth() && largest_full_subgrid(tree, best + 1).is_some() {
        best += 1;
    }
    best
}

/// Centers of the level-`K` cells; resolution `m^{-K} sqrt(d)`.
pub fn tree_to_pointset<T: Scalar>(tree: &PercolationTree) -> Result<PointSet<T>> {
    let k = tree.depth();
    let side = tree.side(k);
    let inv = T::one() / lit::<T>(side as f64);
    let half = lit::<T>(0.5);
    let coords: Vec<T> = tree
        .cells(k)
        .flat_map(|c| c.into_iter().map(|x| (lit::<T>(x as f64) + half) * inv).collect::<Vec<_>>())
        .collect();
    let resolution = inv * lit::<T>(f64::from(tree.config.d)).sqrt();
    PointSet::from_flat(
        tree.config.d as usize,
        coords,
        resolution,
        format!(
            "percolation d={} m={} p={} K={} seed={}",
            tree.config.d, tree.config.m, tree.config.p, k, tree.config.seed
        ),
    )
}

/// Summary emitted by `percolate --emit stats`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercolationStats {
    #[serde(rename = "Z_k")]
    pub z_k: Vec<usize>,
    pub full_subgrid_max_i: u32,
    pub survived: bool,
    pub config: PercolationConfig,
    pub hash: String,
}

pub fn stats(tree: &PercolationTree) -> PercolationStats {
    PercolationStats {
        z_k: occupancy_counts(tree),
        full_subgrid_max_i: full_subgrid_max_i(tree),
        survived: tree.survived(),
        config: tree.config,
        hash: tree.hash.clone(),
    }
}

/// Runs `f` on `n_runs` surviving trees, taking seeds `seed, seed + 1, ...`
/// and discarding extinct ones. Gives up after `max_attempts` seeds.
///
/// Trees are handed to `f` one at a time so deep runs need not coexist in
/// memory. Rejection biases small-`K` statistics toward large trees.
pub fn for_surviving_runs<R>(
    config: &PercolationConfig,
    n_runs: usize,
    max_attempts: usize,
    cap: usize,
    mut f: impl FnMut(&PercolationTree) -> R,
) -> Result<Vec<R>> {
    let mut out = Vec::with_capacity(n_runs);
    let mut attempts = 0;
    while out.len() < n_runs {
        if attempts == max_attempts {
            return Err(Error::NoSurvivingRuns { attempts });
        }
        let tree = simulate_with_cap(&config.with_seed(config.seed.wrapping_add(attempts as u64)), cap)?;
        attempts += 1;
        if tree.survived() {
            out.push(f(&tree));
        }
    }
    Ok(out)
}

/// Per-level tally of `Z_k > m^{s k (1 + ε)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationRow {
    pub level: u32,
    pub threshold: f64,
    pub violations: usize,
    pub fraction: f64,
    /// Markov bound `E Z_k / threshold = m^{-s k ε}`.
    pub markov_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub epsilon: f64,
    pub s: f64,
    pub runs: usize,
    pub violations: usize,
    pub rows: Vec<DeviationRow>,
}

/// Counts `(k, seed)` pairs with `Z_k > m^{s k (1 + ε)}` over `n_seeds`
/// surviving runs.
pub fn large_deviation_check(config: &PercolationConfig, n_seeds: usize, epsilon: f64) -> Result<DeviationReport> {
    config.validate()?;
    if !config.is_supercritical() {
        return Err(Error::Subcritical {
            p: config.p,
            critical: config.critical_p(),
        });
    }
    if !(epsilon > 0.0) {
        return Err(Error::OutOfRange(format!("epsilon = {epsilon} must be positive")));
    }
    let s = config.dimension();
    let m = f64::from(config.m);
    let counts = for_surviving_runs(config, n_seeds, n_seeds.saturating_mul(100).max(100), default_cap(), occupancy_counts)?;
    let rows: Vec<DeviationRow> = (1..=config.depth)
        .map(|k| {
            let kf = f64::from(k);
            let threshold = m.powf(s * kf * (1.0 + epsilon));
            let violations = counts.iter().filter(|z| z[k as usize] as f64 > threshold).count();
            DeviationRow {
                level: k,
                threshold,
                violations,
                fraction: violations as f64 / counts.len() as f64,
                markov_bound: m.powf(-s * kf * epsilon),
            }
        })
        .collect();
    Ok(DeviationReport {
        epsilon,
        s,
        runs: counts.len(),
        violations: rows.iter().map(|r| r.violations).sum(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn near_zero_retention_dies_at_level_one() {
        let c = PercolationConfig::new(2, 2, 1e-9, 3, 0).unwrap();
        let t = simulate(&c).unwrap();
        assert_eq!(occupancy_counts(&t), vec![1, 0, 0, 0]);
        assert!(!t.survived());
        assert_eq!(largest_full_subgrid(&t, 1), None);
    }

    #[test]
    fn near_one_retention_keeps_everything() {
        let c = PercolationConfig::new(2, 3, 1.0 - 1e-12, 4, 5).unwrap();
        let t = simulate(&c).unwrap();
        let z = occupancy_counts(&t);
        for (k, &n) in z.iter().enumerate() {
            assert_eq!(n, 9usize.pow(k as u32));
        }
        let w = largest_full_subgrid(&t, 4).unwrap();
        assert_eq!((w.level, w.cell.clone()), (0, vec![0, 0]));
        let pts = tree_to_pointset::<f64>(&t).unwrap();
        assert_eq!(pts.len(), 81 * 81);
    }

    #[test]
    fn parentage_and_determinism() {
        let c = PercolationConfig::new(2, 2, 0.7, 8, 42).unwrap();
        let a = simulate(&c).unwrap();
        assert_eq!(a, simulate(&c).unwrap());
        let z = occupancy_counts(&a);
        assert_eq!(z[0], 1);
        for k in 1..=8u32 {
            assert!(z[k as usize] <= 4 * z[k as usize - 1]);
            let parents: std::collections::HashSet<Vec<u64>> = a.cells(k - 1).collect();
            for c in a.cells(k) {
                let p: Vec<u64> = c.iter().map(|x| x / 2).collect();
                assert!(parents.contains(&p));
                assert!(is_retained(42, 0.7, k, &c));
            }
        }
    }

    #[test]
    fn root_only_tree() {
        let c = PercolationConfig::new(3, 2, 0.5, 0, 1).unwrap();
        let t = simulate(&c).unwrap();
        let pts = tree_to_pointset::<f64>(&t).unwrap();
        assert_eq!(pts.point(0), &[0.5, 0.5, 0.5]);
    }

    #[test]
    fn cap_suggests_depth() {
        let c = PercolationConfig::new(2, 2, 0.9, 14, 0).unwrap();
        match simulate_with_cap(&c, 1000) {
            Err(Error::CapExceeded { suggestion: Some(k), .. }) => assert_eq!(k, 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn huge_slack_has_no_violations() {
        let c = PercolationConfig::new(2, 2, 0.8, 8, 0).unwrap();
        let r = large_deviation_check(&c, 20, 1.0).unwrap();
        assert_eq!(r.runs, 20);
        assert_eq!(r.violations, 0);
        let sub = PercolationConfig::new(2, 2, 0.2, 8, 0).unwrap();
        assert!(matches!(large_deviation_check(&sub, 5, 1.0), Err(Error::Subcritical { .. })));
    }
}
