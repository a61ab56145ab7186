//! Exact sparse linear algebra over the rationals.
//!
//! Everything downstream (cohomology dimensions, centralizer kernels,
//! image-membership witnesses) reduces to exact rank/kernel/solve here.
//! The working routine is a sparse rational Gauss-Jordan with a
//! fewest-nonzeros pivot heuristic; a dense fraction-free (Bareiss)
//! elimination over the integers is kept alongside as an independent rank
//! route and is cross-checked against the sparse path in the test suite.

use crate::rat::{is_zero, Rat};
use num::bigint::BigInt;
use num::traits::{One, Zero};
use std::collections::BTreeMap;

/// Sparse matrix; absent entries are zero, stored entries never are.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMat {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Rat>,
}

/// Result of `rank_and_kernel`.
#[derive(Debug, Clone)]
pub struct RankKernel {
    pub rank: usize,
    /// Basis of the right kernel; each vector has `cols` entries.
    pub kernel: Vec<Vec<Rat>>,
}

impl SparseMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMat {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SparseMat::zero(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rat) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        if is_zero(&v) {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: Rat) {
        let cur = self.get(r, c);
        self.set(r, c, cur + v);
    }

    pub fn get(&self, r: usize, c: usize) -> Rat {
        self.entries
            .get(&(r, c))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Rat)> {
        self.entries.iter()
    }

    pub fn num_entries(&self) -> usize {
        self.entries.len()
    }

    pub fn transpose(&self) -> SparseMat {
        let mut t = SparseMat::zero(self.cols, self.rows);
        for (&(r, c), v) in &self.entries {
            t.set(c, r, v.clone());
        }
        t
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![Rat::zero(); self.rows];
        for (&(r, c), a) in &self.entries {
            if !is_zero(&v[c]) {
                let prod = a.clone() * v[c].clone();
                out[r] += prod;
            }
        }
        out
    }

    fn to_rows(&self) -> Vec<BTreeMap<usize, Rat>> {
        let mut rows: Vec<BTreeMap<usize, Rat>> = vec![BTreeMap::new(); self.rows];
        for (&(r, c), v) in &self.entries {
            rows[r].insert(c, v.clone());
        }
        rows
    }
}

/// Row echelon data produced by `reduce`: fully reduced rows (each pivot
/// column is eliminated from every other row) plus the pivot columns.
struct Reduced {
    rows: Vec<BTreeMap<usize, Rat>>,
    pivot_cols: Vec<usize>,
}

/// Sparse exact Gauss-Jordan. Pivot choice: among remaining rows, take the
/// one with the fewest nonzeros and pick its smallest column; this keeps
/// fill-in tolerable on the block matrices the complexes produce.
fn reduce(mat: &SparseMat) -> Reduced {
    let mut work: Vec<BTreeMap<usize, Rat>> = mat
        .to_rows()
        .into_iter()
        .filter(|r| !r.is_empty())
        .collect();
    let mut done: Vec<BTreeMap<usize, Rat>> = Vec::new();
    let mut pivot_cols: Vec<usize> = Vec::new();

    while !work.is_empty() {
        // fewest-nonzeros row first
        let best = work
            .iter()
            .enumerate()
            .min_by_key(|(_, r)| r.len())
            .map(|(i, _)| i)
            .unwrap();
        let row = work.swap_remove(best);
        let (&pc, pv) = row.iter().next().unwrap();
        let pv = pv.clone();
        // normalize pivot row
        let row: BTreeMap<usize, Rat> = row
            .into_iter()
            .map(|(c, v)| (c, v / pv.clone()))
            .collect();
        // eliminate from all other rows
        let eliminate = |target: &mut BTreeMap<usize, Rat>| {
            if let Some(f) = target.get(&pc).cloned() {
                for (c, v) in &row {
                    let delta = f.clone() * v.clone();
                    match target.get_mut(c) {
                        Some(t) => {
                            *t -= delta;
                            if is_zero(t) {
                                target.remove(c);
                            }
                        }
                        None => {
                            if !is_zero(&delta) {
                                target.insert(*c, -delta);
                            }
                        }
                    }
                }
            }
        };
        for r in work.iter_mut() {
            eliminate(r);
        }
        work.retain(|r| !r.is_empty());
        for r in done.iter_mut() {
            eliminate(r);
        }
        pivot_cols.push(pc);
        done.push(row);
    }

    // sort by pivot column for determinism
    let mut paired: Vec<(usize, BTreeMap<usize, Rat>)> =
        pivot_cols.into_iter().zip(done).collect();
    paired.sort_by_key(|(c, _)| *c);
    let (pivot_cols, rows) = paired.into_iter().unzip();
    Reduced { rows, pivot_cols }
}

/// Exact rank and a basis of the right kernel. Kernel vectors are the
/// standard free-column completions of the reduced echelon form, so the
/// basis is canonical for a given matrix.
pub fn rank_and_kernel(mat: &SparseMat) -> RankKernel {
    let red = reduce(mat);
    let rank = red.pivot_cols.len();
    let pivot_of_col: BTreeMap<usize, usize> = red
        .pivot_cols
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, i))
        .collect();
    let mut kernel = Vec::new();
    for free in 0..mat.cols {
        if pivot_of_col.contains_key(&free) {
            continue;
        }
        let mut v = vec![Rat::zero(); mat.cols];
        v[free] = Rat::one();
        for (i, &pc) in red.pivot_cols.iter().enumerate() {
            let coeff = red.rows[i].get(&free).cloned().unwrap_or_else(Rat::zero);
            if !is_zero(&coeff) {
                v[pc] = -coeff;
            }
        }
        kernel.push(v);
    }
    RankKernel { rank, kernel }
}

pub fn rank(mat: &SparseMat) -> usize {
    reduce(mat).pivot_cols.len()
}

/// Solve `mat * x = b` exactly; `None` when inconsistent.
pub fn solve(mat: &SparseMat, b: &[Rat]) -> Option<Vec<Rat>> {
    assert_eq!(b.len(), mat.rows);
    // augment with b as an extra column
    let mut aug = SparseMat::zero(mat.rows, mat.cols + 1);
    for (&(r, c), v) in &mat.entries {
        aug.set(r, c, v.clone());
    }
    for (r, v) in b.iter().enumerate() {
        if !is_zero(v) {
            aug.set(r, mat.cols, v.clone());
        }
    }
    let red = reduce(&aug);
    if red.pivot_cols.contains(&mat.cols) {
        return None; // pivot in the augmented column: inconsistent
    }
    let mut x = vec![Rat::zero(); mat.cols];
    for (i, &pc) in red.pivot_cols.iter().enumerate() {
        if let Some(v) = red.rows[i].get(&mat.cols) {
            x[pc] = v.clone();
        }
    }
    Some(x)
}

/// Fraction-free Bareiss elimination (dense, over the integers after
/// clearing row denominators). Rank only; independent of `reduce`.
pub fn rank_bareiss(mat: &SparseMat) -> usize {
    let n = mat.rows;
    let m = mat.cols;
    if n == 0 || m == 0 {
        return 0;
    }
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for r in 0..n {
        let mut lcm = BigInt::one();
        for c in 0..m {
            let v = mat.get(r, c);
            if !is_zero(&v) {
                lcm = num::integer::lcm(lcm, v.denom().clone());
            }
        }
        let row: Vec<BigInt> = (0..m)
            .map(|c| {
                let v = mat.get(r, c);
                v.numer() * (&lcm / v.denom())
            })
            .collect();
        a.push(row);
    }
    let mut prev = BigInt::one();
    let mut rank = 0usize;
    let mut row = 0usize;
    for col in 0..m {
        if row >= n {
            break;
        }
        // find pivot
        let piv = (row..n).find(|&r| !a[r][col].is_zero());
        let piv = match piv {
            Some(p) => p,
            None => continue,
        };
        a.swap(row, piv);
        for r in row + 1..n {
            for c in col + 1..m {
                let num = &a[row][col] * &a[r][c] - &a[r][col] * &a[row][c];
                a[r][c] = num / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[row][col].clone();
        row += 1;
        rank += 1;
    }
    rank
}
