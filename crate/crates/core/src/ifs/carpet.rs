use serde::{Deserialize, Serialize};

use super::affine::{check_depth_cap, AffineMap, IfsSpec};
use crate::error::{default_cap, Error, Result};
use crate::geometry::PointSet;
use crate::scalar::{lit, Scalar};

/// Grid carpet: the unit square cut into `m` columns and `n` rows, keeping `cells`.
///
/// Cell `(i, j)` is column `i`, row `j`, and carries the map
/// `(x, y) ↦ (x/m + i/m, y/n + j/n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CarpetSpec {
    m: u32,
    n: u32,
    cells: Vec<(u32, u32)>,
}

impl CarpetSpec {
    pub fn new(m: u32, n: u32, cells: Vec<(u32, u32)>) -> Result<Self> {
        if !(n > m && m > 1) {
            return Err(Error::InvalidSpec(format!("need n > m > 1, got m={m}, n={n}")));
        }
        if cells.is_empty() {
            return Err(Error::InvalidSpec("a carpet needs at least one cell".into()));
        }
        for (k, &(i, j)) in cells.iter().enumerate() {
            if i >= m || j >= n {
                return Err(Error::InvalidSpec(format!("cell ({i}, {j}) outside the {m} x {n} grid")));
            }
            if cells[..k].contains(&(i, j)) {
                return Err(Error::InvalidSpec(format!("cell ({i}, {j}) listed twice")));
            }
        }
        Ok(Self { m, n, cells })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn cells(&self) -> &[(u32, u32)] {
        &self.cells
    }

    /// Letter index of cell `(i, j)`.
    pub fn cell_index(&self, i: u32, j: u32) -> Option<usize> {
        self.cells.iter().position(|&c| c == (i, j))
    }

    /// `N`, the number of chosen cells.
    pub fn total(&self) -> usize {
        self.cells.len()
    }

    /// `N_i` for every column `i < m` (zero for empty columns).
    pub fn column_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.m as usize];
        for &(i, _) in &self.cells {
            counts[i as usize] += 1;
        }
        counts
    }

    /// `N_0`, the number of non-empty columns.
    pub fn nonempty_columns(&self) -> usize {
        self.column_counts().iter().filter(|&&c| c > 0).count()
    }

    pub fn max_column(&self) -> usize {
        self.column_counts().into_iter().max().unwrap_or(0)
    }

    /// Smallest count over non-empty columns.
    pub fn min_column(&self) -> usize {
        self.column_counts()
            .into_iter()
            .filter(|&c| c > 0)
            .min()
            .unwrap_or(0)
    }

    /// `log m / log n`.
    pub fn rho(&self) -> f64 {
        (self.m as f64).ln() / (self.n as f64).ln()
    }

    /// The carpet as a general IFS, one map per cell in listed order.
    pub fn to_ifs<T: Scalar>(&self) -> IfsSpec<T> {
        let (m, n) = (lit::<T>(self.m as f64), lit::<T>(self.n as f64));
        let maps = self
            .cells
            .iter()
            .map(|&(i, j)| {
                AffineMap::diagonal(
                    &[m.recip(), n.recip()],
                    vec![lit::<T>(i as f64) / m, lit::<T>(j as f64) / n],
                )
                .expect("carpet maps are well formed")
            })
            .collect();
        IfsSpec::new(maps).expect("carpet maps are contractions")
    }

    /// Lower-left corner of the cylinder rectangle of `word`.
    pub fn word_corner<T: Scalar>(&self, word: &[usize]) -> Result<(T, T)> {
        let (m, n) = (lit::<T>(self.m as f64), lit::<T>(self.n as f64));
        let (mut x, mut y) = (T::zero(), T::zero());
        for &letter in word.iter().rev() {
            let &(i, j) = self.cells.get(letter).ok_or(Error::InvalidLetter {
                letter,
                alphabet: self.cells.len(),
            })?;
            x = (x + lit::<T>(i as f64)) / m;
            y = (y + lit::<T>(j as f64)) / n;
        }
        Ok((x, y))
    }
}

/// Lower-left corners of all depth-`k` cylinders.
pub fn carpet_attractor<T: Scalar>(spec: &CarpetSpec, depth: usize) -> Result<PointSet<T>> {
    carpet_attractor_with_cap(spec, depth, default_cap())
}

/// As [`carpet_attractor`] with an explicit point cap. Resolution is `m^-depth`.
pub fn carpet_attractor_with_cap<T: Scalar>(
    spec: &CarpetSpec,
    depth: usize,
    cap: usize,
) -> Result<PointSet<T>> {
    check_depth_cap(spec.total(), depth, cap)?;
    let (m, n) = (lit::<T>(spec.m as f64), lit::<T>(spec.n as f64));
    let mut level: Vec<T> = vec![T::zero(), T::zero()];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(level.len() * spec.total());
        for &(i, j) in &spec.cells {
            let (ti, tj) = (lit::<T>(i as f64), lit::<T>(j as f64));
            for p in level.chunks_exact(2) {
                next.push((p[0] + ti) / m);
                next.push((p[1] + tj) / n);
            }
        }
        level = next;
    }
    let resolution = m.powi(-(depth as i32));
    PointSet::dedup_from_flat(
        2,
        level,
        resolution,
        format!("carpet m={}, n={}, {} cells, depth {depth}", spec.m, spec.n, spec.total()),
    )
}

/// `l(r)`: the integer with `b^-l <= r < b^-(l-1)`.
pub fn level_for_scale(base: u32, r: f64) -> usize {
    assert!(r > 0.0 && r <= 1.0, "scale must lie in (0, 1]");
    let b = base as f64;
    let side = |l: usize| b.powi(l as i32).recip();
    let mut l = (-r.ln() / b.ln()).ceil().max(0.0) as usize;
    while side(l) > r {
        l += 1;
    }
    while l > 0 && side(l - 1) <= r {
        l -= 1;
    }
    l
}

/// Approximate square `Q(d, r)`: column digits to depth `l_1(r)`, row digits
/// to depth `l_2(r)`, and the rectangle they pin down.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxSquare {
    pub scale: f64,
    pub l1: usize,
    pub l2: usize,
    /// Column digits `i_1 .. i_{l_1}`.
    pub columns: Vec<u32>,
    /// Row digits `j_1 .. j_{l_2}`.
    pub rows: Vec<u32>,
    pub x0: f64,
    pub y0: f64,
    pub width: f64,
    pub height: f64,
}

impl ApproxSquare {
    /// Square from digit strings; lengths set `l_1` and `l_2`.
    pub fn from_digits(spec: &CarpetSpec, scale: f64, columns: Vec<u32>, rows: Vec<u32>) -> Result<Self> {
        if rows.len() > columns.len() {
            return Err(Error::OutOfRange("row depth exceeds column depth".into()));
        }
        if columns.iter().any(|&i| i >= spec.m) || rows.iter().any(|&j| j >= spec.n) {
            return Err(Error::OutOfRange("digit outside the grid".into()));
        }
        let (m, n) = (spec.m as f64, spec.n as f64);
        let x0 = columns.iter().rev().fold(0.0, |acc, &i| (acc + i as f64) / m);
        let y0 = rows.iter().rev().fold(0.0, |acc, &j| (acc + j as f64) / n);
        Ok(Self {
            scale,
            l1: columns.len(),
            l2: rows.len(),
            x0,
            y0,
            width: m.powi(columns.len() as i32).recip(),
            height: n.powi(rows.len() as i32).recip(),
            columns,
            rows,
        })
    }

    /// True when the defining digits can occur in the carpet.
    pub fn is_admissible(&self, spec: &CarpetSpec) -> bool {
        let counts = spec.column_counts();
        (0..self.l2).all(|l| spec.cell_index(self.columns[l], self.rows[l]).is_some())
            && (self.l2..self.l1).all(|l| counts[self.columns[l] as usize] > 0)
    }
}

/// The approximate square of side about `r` containing the point coded by `word`.
pub fn approx_square(spec: &CarpetSpec, word: &[usize], r: f64) -> Result<ApproxSquare> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::OutOfRange(format!("scale {r} outside (0, 1]")));
    }
    let l1 = level_for_scale(spec.m, r);
    let l2 = level_for_scale(spec.n, r);
    if word.len() < l1 {
        return Err(Error::WordTooShort {
            len: word.len(),
            required: l1,
        });
    }
    let mut cols = Vec::with_capacity(l1);
    let mut rows = Vec::with_capacity(l2);
    for (l, &letter) in word[..l1].iter().enumerate() {
        let &(i, j) = spec.cells.get(letter).ok_or(Error::InvalidLetter {
            letter,
            alphabet: spec.total(),
        })?;
        cols.push(i);
        if l < l2 {
            rows.push(j);
        }
    }
    ApproxSquare::from_digits(spec, r, cols, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{mesh_count, DyadicScale};

    fn two_three() -> CarpetSpec {
        CarpetSpec::new(2, 3, vec![(0, 0), (0, 2), (1, 1)]).unwrap()
    }

    #[test]
    fn derived_counts() {
        let c = two_three();
        assert_eq!(c.total(), 3);
        assert_eq!(c.column_counts(), vec![2, 1]);
        assert_eq!((c.nonempty_columns(), c.max_column(), c.min_column()), (2, 2, 1));
    }

    #[test]
    fn validation() {
        assert!(CarpetSpec::new(3, 3, vec![(0, 0)]).is_err());
        assert!(CarpetSpec::new(2, 3, vec![]).is_err());
        assert!(CarpetSpec::new(2, 3, vec![(2, 0)]).is_err());
        assert!(CarpetSpec::new(2, 3, vec![(0, 0), (0, 0)]).is_err());
    }

    #[test]
    fn single_cell_carpet_is_origin() {
        let c = CarpetSpec::new(2, 3, vec![(0, 0)]).unwrap();
        let s: PointSet<f64> = carpet_attractor(&c, 3).unwrap();
        assert_eq!(s.coords(), &[0.0, 0.0]);
    }

    #[test]
    fn depth_one_corners() {
        let s: PointSet<f64> = carpet_attractor(&two_three(), 1).unwrap();
        assert_eq!(s.coords(), &[0.0, 0.0, 0.0, 2.0 / 3.0, 0.5, 1.0 / 3.0]);
    }

    #[test]
    fn worked_carpet_depth_six_mesh_matches_cell_enumeration() {
        let spec = CarpetSpec::new(3, 5, vec![(0, 2), (2, 0), (2, 2), (2, 4)]).unwrap();
        let s: PointSet<f64> = carpet_attractor(&spec, 6).unwrap();
        // Independent enumeration over digit strings, rational corners in exact
        // integer arithmetic (x = a / 3^6, y = b / 5^6), then dyadic cells.
        let mut cells = std::collections::BTreeSet::new();
        let mut max = (0u64, 0u64);
        let mut corners = Vec::new();
        for code in 0..4u64.pow(6) {
            let (mut a, mut b, mut c) = (0u64, 0u64, code);
            for _ in 0..6 {
                let (i, j) = spec.cells()[(c % 4) as usize];
                a = a * 3 + i as u64;
                b = b * 5 + j as u64;
                c /= 4;
            }
            max = (max.0.max(a), max.1.max(b));
            corners.push((a, b));
        }
        for (a, b) in corners {
            let fx = a * 64 / 729;
            let fy = b * 64 / 15625;
            // fold only applies to lattice-aligned maxima
            let fx = if a == max.0 && a * 64 % 729 == 0 { fx - 1 } else { fx };
            let fy = if b == max.1 && b * 64 % 15625 == 0 { fy - 1 } else { fy };
            cells.insert((fx, fy));
        }
        let got = mesh_count(&s, DyadicScale::new(6)).unwrap().count;
        assert_eq!(got, cells.len());
    }

    #[test]
    fn scale_levels() {
        assert_eq!(level_for_scale(2, 0.125), 3);
        assert_eq!(level_for_scale(3, 1.0 / 27.0), 3);
        assert_eq!(level_for_scale(2, 0.2), 3);
        assert_eq!(level_for_scale(3, 0.2), 2);
        assert_eq!(level_for_scale(2, 1.0), 0);
    }

    #[test]
    fn approx_square_basics() {
        let c = two_three();
        let q = approx_square(&c, &[0, 1, 2, 0], 0.2).unwrap();
        assert_eq!((q.l1, q.l2), (3, 2));
        assert_eq!(q.columns, vec![0, 0, 1]);
        assert_eq!(q.rows, vec![0, 2]);
        assert!(q.is_admissible(&c));
        assert_eq!(
            approx_square(&c, &[0, 1], 0.2).unwrap_err(),
            Error::WordTooShort { len: 2, required: 3 }
        );
    }
}
