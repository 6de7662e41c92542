//! Exact rational linear algebra: small dense matrices, incremental rank,
//! and vertex enumeration for polytopes cut out by sparse equality systems
//! and nonnegativity. Everything is over BigRational; nothing here is
//! approximate.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exec;
use crate::ratio::Rat;

// ---------------------------------------------------------------------
// dense matrices

#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Rat::one();
        }
        m
    }

    pub fn at(&self, r: usize, c: usize) -> &Rat {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Rat {
        &mut self.data[r * self.cols + c]
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        RatMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        RatMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, k: &Rat) -> Self {
        let data = self.data.iter().map(|a| a * k).collect();
        RatMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.at(i, j) + a * other.at(k, j);
                    *out.at_mut(i, j) = v;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        out
    }

    pub fn trace(&self) -> Rat {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self.at(i, i).clone()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.is_zero())
    }

    pub fn flatten(&self) -> Vec<Rat> {
        self.data.clone()
    }
}

impl std::fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Small integer matrices for the zero-one representation fast paths.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn at(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn add(&self, other: &Self) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        IntMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        IntMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.at(k, j);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.at(i, j));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&a| a == 0)
    }

    pub fn to_rational(&self) -> RatMatrix {
        let mut out = RatMatrix::zeros(self.rows, self.cols);
        for (i, &v) in self.data.iter().enumerate() {
            out.data[i] = Rat::from_integer(v.into());
        }
        out
    }
}

// ---------------------------------------------------------------------
// incremental row basis (rank with early exit)

pub struct RowBasis {
    cols: usize,
    /// reduced rows keyed by pivot column
    pivots: BTreeMap<usize, Vec<Rat>>,
}

impl RowBasis {
    pub fn new(cols: usize) -> Self {
        RowBasis { cols, pivots: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Insert a row; returns true when it enlarges the span.
    pub fn insert(&mut self, mut row: Vec<Rat>) -> bool {
        assert_eq!(row.len(), self.cols);
        for (&p, prow) in &self.pivots {
            if !row[p].is_zero() {
                let f = row[p].clone();
                for j in p..self.cols {
                    let v = &row[j] - &f * &prow[j];
                    row[j] = v;
                }
            }
        }
        let Some(p) = row.iter().position(|v| !v.is_zero()) else {
            return false;
        };
        let lead = row[p].clone();
        for v in row.iter_mut() {
            *v = &*v / &lead;
        }
        self.pivots.insert(p, row);
        true
    }
}

pub fn rank_of(rows: impl IntoIterator<Item = Vec<Rat>>, cols: usize) -> usize {
    let mut basis = RowBasis::new(cols);
    for r in rows {
        basis.insert(r);
    }
    basis.rank()
}

/// Affine dimension of a point set: rank of differences to the first point.
pub fn affine_dimension(points: &[Vec<Rat>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let base = &points[0];
    rank_of(
        points[1..].iter().map(|p| {
            p.iter().zip(base).map(|(a, b)| a - b).collect::<Vec<Rat>>()
        }),
        base.len(),
    )
}

// ---------------------------------------------------------------------
// sparse equality systems and vertex enumeration

/// A system of linear equalities `Σ coeff · x = rhs` over `n_vars`
/// nonnegative variables.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub n_vars: usize,
    pub rows: Vec<(Vec<(usize, Rat)>, Rat)>,
}

struct Rref {
    n_vars: usize,
    /// pivot col -> (row over free cols, rhs): x_p = rhs - Σ coeff · x_f
    pivot_rows: BTreeMap<usize, (BTreeMap<usize, Rat>, Rat)>,
    infeasible: bool,
}

fn subtract_scaled(row: &mut BTreeMap<usize, Rat>, f: &Rat, prow: &BTreeMap<usize, Rat>) {
    for (pc, pv) in prow {
        let delta = f * pv;
        let mut now_zero = false;
        match row.get_mut(pc) {
            Some(e) => {
                *e -= delta;
                now_zero = e.is_zero();
            }
            None => {
                row.insert(*pc, -delta);
            }
        }
        if now_zero {
            row.remove(pc);
        }
    }
}

fn reduce_system(sys: &LinearSystem) -> Rref {
    let mut pivots: BTreeMap<usize, (BTreeMap<usize, Rat>, Rat)> = BTreeMap::new();
    let mut infeasible = false;
    for (cols, rhs0) in &sys.rows {
        let mut row: BTreeMap<usize, Rat> = BTreeMap::new();
        for (c, v) in cols {
            if !v.is_zero() {
                let e = row.entry(*c).or_insert_with(Rat::zero);
                *e += v;
                if e.is_zero() {
                    row.remove(c);
                }
            }
        }
        let mut rhs = rhs0.clone();
        // eliminate every pivot column mentioned by the row
        loop {
            let hit = row.keys().copied().find(|c| pivots.contains_key(c));
            let Some(c) = hit else { break };
            let f = row.remove(&c).unwrap();
            let (prow, prhs) = &pivots[&c];
            let prow = prow.clone();
            rhs -= &f * prhs;
            subtract_scaled(&mut row, &f, &prow);
        }
        if row.is_empty() {
            if !rhs.is_zero() {
                infeasible = true;
            }
            continue;
        }
        let (&p, _) = row.iter().next().unwrap();
        let lead = row.remove(&p).unwrap();
        let prow: BTreeMap<usize, Rat> = row.into_iter().map(|(c, v)| (c, v / &lead)).collect();
        let prhs = rhs / &lead;
        // back-substitute the new pivot into older pivot rows
        let keys: Vec<usize> = pivots.keys().copied().collect();
        for k in keys {
            let (krow, krhs) = pivots.get_mut(&k).unwrap();
            if let Some(f) = krow.remove(&p) {
                *krhs -= &f * &prhs;
                subtract_scaled(krow, &f, &prow);
            }
        }
        pivots.insert(p, (prow, prhs));
    }
    Rref { n_vars: sys.n_vars, pivot_rows: pivots, infeasible }
}

/// Vertices of `{x ≥ 0 : sys}` by exhaustive basic-solution enumeration:
/// every subset of free-dimension-many variables is pinned to zero and the
/// resulting square system solved exactly. `budget` bounds the number of
/// candidate subsets.
pub fn polytope_vertices(sys: &LinearSystem, budget: usize) -> Result<Vec<Vec<Rat>>> {
    let red = reduce_system(sys);
    if red.infeasible {
        return Ok(Vec::new());
    }
    let n = red.n_vars;
    let pivot_cols: Vec<usize> = red.pivot_rows.keys().copied().collect();
    let free_cols: Vec<usize> = (0..n).filter(|c| !red.pivot_rows.contains_key(c)).collect();
    let d = free_cols.len();

    if d == 0 {
        let mut x = vec![Rat::zero(); n];
        for (&p, (_, rhs)) in &red.pivot_rows {
            x[p] = rhs.clone();
        }
        if x.iter().all(|v| !v.is_negative()) {
            return Ok(vec![x]);
        }
        return Ok(Vec::new());
    }

    let n_subsets = binomial(n, d);
    if n_subsets > budget as u128 {
        return Err(Error::SizeLimit { cap: budget });
    }

    let free_pos: BTreeMap<usize, usize> =
        free_cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();

    let subsets: Vec<Vec<usize>> = combinations(n, d);
    let found: Vec<Option<Vec<Rat>>> = exec::map_collect(&subsets, |zset| {
        // solve for the free variables under x_z = 0 for z in zset
        let mut a = RatMatrix::zeros(d, d);
        let mut b = vec![Rat::zero(); d];
        for (ri, &z) in zset.iter().enumerate() {
            if let Some(&fp) = free_pos.get(&z) {
                *a.at_mut(ri, fp) = Rat::one();
            } else {
                let (row, rhs) = &red.pivot_rows[&z];
                // x_z = rhs - Σ coeff x_f = 0
                for (c, v) in row {
                    *a.at_mut(ri, free_pos[c]) = v.clone();
                }
                b[ri] = rhs.clone();
            }
        }
        let xf = solve_square(&a, &b)?;
        let mut x = vec![Rat::zero(); n];
        for (i, &c) in free_cols.iter().enumerate() {
            x[c] = xf[i].clone();
        }
        for &p in &pivot_cols {
            let (row, rhs) = &red.pivot_rows[&p];
            let mut v = rhs.clone();
            for (c, coeff) in row {
                v -= coeff * &x[*c];
            }
            x[p] = v;
        }
        if x.iter().all(|v| !v.is_negative()) {
            Some(x)
        } else {
            None
        }
    });

    let mut vertices: Vec<Vec<Rat>> = found.into_iter().flatten().collect();
    vertices.sort();
    vertices.dedup();
    Ok(vertices)
}

/// Unique solution of a square system, if the matrix is invertible.
pub fn solve_square(a: &RatMatrix, b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.rows;
    assert_eq!(a.cols, n);
    assert_eq!(b.len(), n);
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m.at(perm[r], col).is_zero())?;
        perm.swap(col, piv);
        let lead = m.at(perm[col], col).clone();
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m.at(perm[r], col) / &lead;
            if f.is_zero() {
                continue;
            }
            for c in col..n {
                let v = m.at(perm[r], c) - &f * m.at(perm[col], c);
                *m.at_mut(perm[r], c) = v;
            }
            let v = &rhs[perm[r]] - &f * &rhs[perm[col]];
            rhs[perm[r]] = v;
        }
    }
    let mut x = vec![Rat::zero(); n];
    for col in 0..n {
        x[col] = &rhs[perm[col]] / m.at(perm[col], col);
    }
    Some(x)
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut out: u128 = 1;
    for i in 0..k {
        out = out.saturating_mul((n - i) as u128) / (i as u128 + 1);
        if out > u128::MAX / 2 {
            return u128::MAX;
        }
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
        }
        if cur[i] == i + n - k {
            return out;
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{rat, rat_int};

    #[test]
    fn matrix_ops() {
        let mut a = RatMatrix::zeros(2, 2);
        *a.at_mut(0, 1) = rat_int(1);
        *a.at_mut(1, 0) = rat_int(1);
        let i = RatMatrix::identity(2);
        assert_eq!(a.mul(&a), i);
        assert_eq!(a.transpose(), a);
        assert_eq!(a.trace(), rat_int(0));
        assert_eq!(i.trace(), rat_int(2));
    }

    #[test]
    fn rank_and_affine_dim() {
        let rows = vec![
            vec![rat_int(1), rat_int(0), rat_int(1)],
            vec![rat_int(0), rat_int(1), rat_int(1)],
            vec![rat_int(1), rat_int(1), rat_int(2)],
        ];
        assert_eq!(rank_of(rows, 3), 2);
        let pts = vec![
            vec![rat_int(1), rat_int(0), rat_int(0)],
            vec![rat_int(0), rat_int(1), rat_int(0)],
            vec![rat_int(0), rat_int(0), rat_int(1)],
        ];
        assert_eq!(affine_dimension(&pts), 2);
        assert_eq!(affine_dimension(&pts[..1]), 0);
    }

    #[test]
    fn simplex_vertices() {
        // {w >= 0, w0+w1+w2 = 1}: vertices are the unit coordinates
        let sys = LinearSystem {
            n_vars: 3,
            rows: vec![(
                vec![(0, rat_int(1)), (1, rat_int(1)), (2, rat_int(1))],
                rat_int(1),
            )],
        };
        let v = polytope_vertices(&sys, 1_000_000).unwrap();
        assert_eq!(v.len(), 3);
        for x in &v {
            assert_eq!(x.iter().filter(|t| !t.is_zero()).count(), 1);
        }
    }

    #[test]
    fn equalities_cut_to_point() {
        // w0 = w1 = w2, sum = 1 -> unique vertex (1/3,1/3,1/3)
        let sys = LinearSystem {
            n_vars: 3,
            rows: vec![
                (vec![(0, rat_int(1)), (1, rat_int(-1))], rat_int(0)),
                (vec![(1, rat_int(1)), (2, rat_int(-1))], rat_int(0)),
                (
                    vec![(0, rat_int(1)), (1, rat_int(1)), (2, rat_int(1))],
                    rat_int(1),
                ),
            ],
        };
        let v = polytope_vertices(&sys, 1_000_000).unwrap();
        assert_eq!(v, vec![vec![rat(1, 3), rat(1, 3), rat(1, 3)]]);
    }

    #[test]
    fn infeasible_system_is_empty() {
        let sys = LinearSystem {
            n_vars: 2,
            rows: vec![
                (vec![(0, rat_int(1)), (1, rat_int(1))], rat_int(1)),
                (vec![(0, rat_int(1)), (1, rat_int(1))], rat_int(2)),
            ],
        };
        assert!(polytope_vertices(&sys, 1000).unwrap().is_empty());
    }

    #[test]
    fn segment_has_two_vertices() {
        // w0 + 2 w1 = 1, w >= 0: vertices (1,0) and (0,1/2)
        let sys = LinearSystem {
            n_vars: 2,
            rows: vec![(vec![(0, rat_int(1)), (1, rat_int(2))], rat_int(1))],
        };
        let v = polytope_vertices(&sys, 1000).unwrap();
        assert_eq!(
            v,
            vec![
                vec![rat_int(0), rat(1, 2)],
                vec![rat_int(1), rat_int(0)],
            ]
        );
    }

    #[test]
    fn solve_square_works() {
        let mut a = RatMatrix::zeros(2, 2);
        *a.at_mut(0, 0) = rat_int(2);
        *a.at_mut(0, 1) = rat_int(1);
        *a.at_mut(1, 0) = rat_int(1);
        *a.at_mut(1, 1) = rat_int(3);
        let x = solve_square(&a, &[rat_int(5), rat_int(10)]).unwrap();
        assert_eq!(x, vec![rat_int(1), rat_int(3)]);
        let sing = RatMatrix::zeros(2, 2);
        assert!(solve_square(&sing, &[rat_int(0), rat_int(0)]).is_none());
    }
}
