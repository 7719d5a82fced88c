//! The sparse linear program for L node-disjoint paths.
//!
//! Variables are one per admissible pair (column `p` of every matrix is pair
//! `p` of the [`PairSet`]). The reduced program is
//!
//! ```text
//! min c.x   s.t.   [A_in; A_out; -I] x <= [1; 1; 0]
//!                  [A_bal; a_count]  x  = [0; L]
//! ```
//!
//! * `A_in` has a row per node of frames `1..K`; it sums the connections
//!   entering that node.
//! * `A_out` has a row per node of frames `0..K-1`; it sums the connections
//!   leaving that node.
//! * `A_bal` has a row per node of frames `1..K-1`: entering minus leaving.
//! * `a_count` sums the connections leaving frame `K-2`.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::sparse::SparseMatrix;
use crate::analysis::Lattice;
use crate::error::{invalid, Error, Result};
use crate::lattice::PairSet;

/// Rounding tolerance when checking a solution for integrality.
pub const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemDims {
    pub frame_sizes: Vec<usize>,
    pub n_pairs: usize,
    pub n_paths: usize,
}

impl ProblemDims {
    pub fn n_frames(&self) -> usize {
        self.frame_sizes.len()
    }

    fn sum(&self, frames: Range<usize>) -> usize {
        self.frame_sizes[frames].iter().sum()
    }

    /// Rows of the incoming-connection block: nodes of frames `1..K`.
    pub fn r_in(&self) -> usize {
        self.sum(1..self.n_frames())
    }

    /// Rows of the outgoing-connection block: nodes of frames `0..K-1`.
    pub fn r_out(&self) -> usize {
        self.sum(0..self.n_frames() - 1)
    }

    /// Rows of the balance block: nodes of frames `1..K-1`.
    pub fn r_bal(&self) -> usize {
        self.sum(1..self.n_frames() - 1)
    }

    /// Global index of the first node of frame `k`.
    pub fn frame_start(&self, k: usize) -> usize {
        self.sum(0..k)
    }

    pub fn frame_of(&self, node: usize) -> usize {
        let mut acc = 0;
        for (k, n) in self.frame_sizes.iter().enumerate() {
            acc += n;
            if node < acc {
                return k;
            }
        }
        panic!("node {node} beyond lattice");
    }
}

/// How the rows of the path-count block are assembled in the unreduced
/// program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountRows {
    /// Row `r` sums the connections leaving frame `r`.
    Outgoing,
    /// Row `r` sums rows `a..b` of `A_out` with `a = N_0 + .. + N_r` and
    /// `b = a + N_{r+1}`, i.e. the connections leaving frame `r + 1`. The
    /// last row then falls outside `A_out` and comes out empty.
    ShiftedByOne,
}

/// Which constraint system a [`TrackingProblem`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// Redundant rows removed.
    Reduced,
    /// Every bound and every path-count row kept.
    Full(CountRows),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackingProblem {
    pub c: Vec<f64>,
    pub g: SparseMatrix,
    pub h: Vec<f64>,
    pub a: SparseMatrix,
    pub b: Vec<f64>,
    pub dims: ProblemDims,
    /// `(from, to)` global node indices of each column.
    pub pairs: Vec<(usize, usize)>,
    pub form: Form,
}

/// Nonzero counts of each stored array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NnzBreakdown {
    pub c: usize,
    pub a_in: usize,
    pub a_out: usize,
    pub neg_identity: usize,
    pub h: usize,
    pub a_bal: usize,
    pub a_count: usize,
    pub b: usize,
}

impl NnzBreakdown {
    pub fn total(&self) -> usize {
        self.c + self.a_in + self.a_out + self.neg_identity + self.h + self.a_bal + self.a_count + self.b
    }
}

/// Closed-form nonzero count for a lattice of `n` nodes in each of `k`
/// frames with `p` pairs, counting the path-count row as `n` entries:
/// `2 n^2 (k - 2) + 4 p + 2 n (k - 1) + n + 1`.
pub fn closed_form_nnz(n: usize, k: usize, p: usize) -> usize {
    2 * n * n * (k - 2) + 4 * p + 2 * n * (k - 1) + n + 1
}

/// Nonzero count actually stored for a complete constant-`n` lattice. The
/// path-count row touches every connection out of frame `k - 2`, which is
/// `n^2` entries rather than `n`.
pub fn full_lattice_nnz(n: usize, k: usize) -> usize {
    let p = (k - 1) * n * n;
    2 * n * n * (k - 2) + 4 * p + 2 * n * (k - 1) + n * n + 1
}

struct Blocks {
    a_in: SparseMatrix,
    a_out: SparseMatrix,
    a_bal: SparseMatrix,
}

fn check_inputs(ps: &PairSet, lat: &Lattice, n_paths: usize) -> Result<ProblemDims> {
    if lat.n_frames() < 2 {
        return invalid(format!("need at least 2 frames, lattice has {}", lat.n_frames()));
    }
    if n_paths == 0 {
        return invalid("number of paths must be at least 1");
    }
    ps.validate(lat)?;
    Ok(ProblemDims {
        frame_sizes: lat.sizes(),
        n_pairs: ps.len(),
        n_paths,
    })
}

fn blocks(ps: &PairSet, dims: &ProblemDims) -> Blocks {
    let n0 = dims.frame_sizes[0];
    let last = dims.n_frames() - 1;
    let p = ps.len();
    let mut a_in = SparseMatrix::new(dims.r_in(), p);
    let mut a_out = SparseMatrix::new(dims.r_out(), p);
    let mut a_bal = SparseMatrix::new(dims.r_bal(), p);
    for (col, &(i, j)) in ps.pairs.iter().enumerate() {
        a_in.push(j - n0, col, 1.0);
        a_out.push(i, col, 1.0);
        if dims.frame_of(j) < last {
            a_bal.push(j - n0, col, 1.0);
        }
        if dims.frame_of(i) > 0 {
            a_bal.push(i - n0, col, -1.0);
        }
    }
    Blocks { a_in, a_out, a_bal }
}

/// Row of `A_out`-sums for the connections leaving nodes `nodes`.
fn count_row(ps: &PairSet, nodes: Range<usize>) -> SparseMatrix {
    let mut row = SparseMatrix::new(1, ps.len());
    for (col, &(i, _)) in ps.pairs.iter().enumerate() {
        if nodes.contains(&i) {
            row.push(0, col, 1.0);
        }
    }
    row
}

/// Builds the reduced program.
pub fn build_problem(ps: &PairSet, lat: &Lattice, n_paths: usize) -> Result<TrackingProblem> {
    let dims = check_inputs(ps, lat, n_paths)?;
    let Blocks { a_in, a_out, a_bal } = blocks(ps, &dims);
    let k = dims.n_frames();
    let a_count = count_row(ps, lat.frame_range(k - 2));
    let p = ps.len();

    let g = SparseMatrix::vstack(&[&a_in, &a_out, &SparseMatrix::identity(p).scaled(-1.0)]);
    let mut h = vec![1.0; a_in.n_rows + a_out.n_rows];
    h.resize(g.n_rows, 0.0);
    let a = SparseMatrix::vstack(&[&a_bal, &a_count]);
    let mut b = vec![0.0; a_bal.n_rows];
    b.push(n_paths as f64);

    Ok(TrackingProblem {
        c: ps.costs.clone(),
        g,
        h,
        a,
        b,
        dims,
        pairs: ps.pairs.clone(),
        form: Form::Reduced,
    })
}

/// Builds the unreduced program: both-sided bounds on the degree rows,
/// `0 <= x <= 1`, and one path-count row per frame transition.
pub fn build_full_problem(ps: &PairSet, lat: &Lattice, n_paths: usize, count: CountRows) -> Result<TrackingProblem> {
    let dims = check_inputs(ps, lat, n_paths)?;
    let Blocks { a_in, a_out, a_bal } = blocks(ps, &dims);
    let k = dims.n_frames();
    let p = ps.len();
    let eye = SparseMatrix::identity(p);

    let g = SparseMatrix::vstack(&[
        &a_in,
        &a_in.scaled(-1.0),
        &a_out,
        &a_out.scaled(-1.0),
        &eye,
        &eye.scaled(-1.0),
    ]);
    let mut h = Vec::with_capacity(g.n_rows);
    for (n, v) in [
        (a_in.n_rows, 1.0),
        (a_in.n_rows, 0.0),
        (a_out.n_rows, 1.0),
        (a_out.n_rows, 0.0),
        (p, 1.0),
        (p, 0.0),
    ] {
        h.extend(std::iter::repeat_n(v, n));
    }

    let r_out = dims.r_out();
    let count_rows: Vec<SparseMatrix> = (0..k - 1)
        .map(|r| match count {
            CountRows::Outgoing => count_row(ps, lat.frame_range(r)),
            CountRows::ShiftedByOne => {
                let a = dims.sum(0..r + 1).min(r_out);
                let b = dims.sum(0..r + 2).min(r_out);
                count_row(ps, a..b)
            }
        })
        .collect();
    let mut stack: Vec<&SparseMatrix> = vec![&a_bal];
    stack.extend(count_rows.iter());
    let a = SparseMatrix::vstack(&stack);
    let mut b = vec![0.0; a_bal.n_rows];
    b.extend(std::iter::repeat_n(n_paths as f64, k - 1));

    Ok(TrackingProblem {
        c: ps.costs.clone(),
        g,
        h,
        a,
        b,
        dims,
        pairs: ps.pairs.clone(),
        form: Form::Full(count),
    })
}

impl TrackingProblem {
    pub fn n_vars(&self) -> usize {
        self.c.len()
    }

    /// Row ranges of `A_in`, `A_out` and `-I` inside `g` (reduced form only).
    pub fn g_blocks(&self) -> Option<[Range<usize>; 3]> {
        (self.form == Form::Reduced).then(|| {
            let ri = self.dims.r_in();
            let ro = self.dims.r_out();
            [0..ri, ri..ri + ro, ri + ro..self.g.n_rows]
        })
    }

    /// Nonzeros of every stored array (reduced form only).
    pub fn nnz_breakdown(&self) -> Option<NnzBreakdown> {
        let [gi, go, gn] = self.g_blocks()?;
        let rb = self.dims.r_bal();
        let nz = |v: &[f64]| v.iter().filter(|x| **x != 0.0).count();
        Some(NnzBreakdown {
            c: nz(&self.c),
            a_in: self.g.rows(gi).nnz(),
            a_out: self.g.rows(go).nnz(),
            neg_identity: self.g.rows(gn).nnz(),
            h: nz(&self.h),
            a_bal: self.a.rows(0..rb).nnz(),
            a_count: self.a.rows(rb..rb + 1).nnz(),
            b: nz(&self.b),
        })
    }

    /// Total stored nonzeros, including `c`, `h` and `b`.
    pub fn nnz(&self) -> usize {
        let nz = |v: &[f64]| v.iter().filter(|x| **x != 0.0).count();
        nz(&self.c) + self.g.nnz() + nz(&self.h) + self.a.nnz() + nz(&self.b)
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.c.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    /// Rounds `x` to 0/1 and checks every constraint in integer arithmetic.
    pub fn check_integral(&self, x: &[f64]) -> Result<Vec<u8>> {
        if x.len() != self.n_vars() {
            return Err(Error::Internal(format!(
                "solution has {} entries, problem {}",
                x.len(),
                self.n_vars()
            )));
        }
        let mut xi = Vec::with_capacity(x.len());
        for (p, &v) in x.iter().enumerate() {
            let r = v.round();
            if (v - r).abs() > INTEGRALITY_TOL || !(r == 0.0 || r == 1.0) {
                return Err(Error::Internal(format!("x[{p}] = {v} is not 0/1")));
            }
            xi.push(r as i64);
        }
        let int = |v: &[f64]| v.iter().map(|x| x.round() as i64).collect::<Vec<_>>();
        let gx = self.g.mul_int(&xi).expect("integral constraint matrix");
        for (r, (lhs, rhs)) in gx.iter().zip(int(&self.h)).enumerate() {
            if *lhs > rhs {
                return Err(Error::Internal(format!("inequality row {r}: {lhs} > {rhs}")));
            }
        }
        let ax = self.a.mul_int(&xi).expect("integral constraint matrix");
        for (r, (lhs, rhs)) in ax.iter().zip(int(&self.b)).enumerate() {
            if *lhs != rhs {
                return Err(Error::Internal(format!("equality row {r}: {lhs} != {rhs}")));
            }
        }
        Ok(xi.into_iter().map(|v| v as u8).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_pairs, CostFn};

    fn full(n: usize, k: usize) -> (Lattice, PairSet) {
        let lat = Lattice::placeholder(&vec![n; k]);
        let costs = (0..k - 1)
            .map(|t| {
                (0..n)
                    .map(|i| (0..n).map(|j| 0.1 + (t * n * n + i * n + j) as f64 * 0.01).collect())
                    .collect()
            })
            .collect();
        let ps = build_pairs(&lat, &CostFn::Custom { costs }, f64::INFINITY);
        (lat, ps)
    }

    #[test]
    fn three_frame_counts() {
        let (lat, ps) = full(2, 3);
        assert_eq!(ps.len(), 8);
        let p = build_problem(&ps, &lat, 2).unwrap();
        let nnz = p.nnz_breakdown().unwrap();
        assert_eq!(nnz.a_in, 8);
        assert_eq!(nnz.a_out, 8);
        assert_eq!(nnz.neg_identity, 8);
        assert_eq!(nnz.c, 8);
        assert_eq!(nnz.a_bal, 8);
        assert_eq!(nnz.h, 8);
        assert_eq!(nnz.b, 1);
        // four connections leave the middle frame
        assert_eq!(nnz.a_count, 4);
        assert_eq!(nnz.total(), p.nnz());
        assert_eq!(p.nnz(), full_lattice_nnz(2, 3));
        assert_eq!(closed_form_nnz(2, 3, 8), 51);
    }

    #[test]
    fn smallest_lattice() {
        let (lat, ps) = full(1, 2);
        let p = build_problem(&ps, &lat, 1).unwrap();
        assert_eq!(p.dims.r_bal(), 0);
        assert_eq!(p.a.n_rows, 1);
        assert_eq!(p.a.entries, vec![(0, 0, 1.0)]);
        assert_eq!(p.b, vec![1.0]);
    }

    #[test]
    fn balance_rows_are_in_minus_out() {
        let (lat, ps) = full(2, 4);
        let p = build_problem(&ps, &lat, 1).unwrap();
        let dense = p.a.to_dense();
        for (r, row) in dense.iter().take(p.dims.r_bal()).enumerate() {
            let node = r + 2;
            for (col, &(i, j)) in ps.pairs.iter().enumerate() {
                let expect = (j == node) as i32 as f64 - (i == node) as i32 as f64;
                assert_eq!(row[col], expect);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let (lat, ps) = full(2, 3);
        assert!(build_problem(&ps, &lat, 0).is_err());
        let one = Lattice::placeholder(&[3]);
        let empty = PairSet::new(vec![], vec![], 1.0).unwrap();
        assert!(build_problem(&empty, &one, 1).is_err());
        let skip = PairSet::new(vec![(0, 4)], vec![0.1], 1.0).unwrap();
        assert!(build_problem(&skip, &lat, 1).is_err());
    }

    #[test]
    fn shifted_count_rows_leave_last_row_empty() {
        let (lat, ps) = full(2, 4);
        let p = build_full_problem(&ps, &lat, 1, CountRows::ShiftedByOne).unwrap();
        let rb = p.dims.r_bal();
        let rows = p.a.rows(rb..p.a.n_rows);
        assert_eq!(rows.n_rows, 3);
        let outgoing = build_full_problem(&ps, &lat, 1, CountRows::Outgoing).unwrap();
        let out_rows = outgoing.a.rows(rb..outgoing.a.n_rows).to_dense();
        let dense = rows.to_dense();
        // shifted row r equals outgoing row r + 1; the last one is empty
        assert_eq!(dense[0], out_rows[1]);
        assert_eq!(dense[1], out_rows[2]);
        assert!(dense[2].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn integrality_check_catches_violations() {
        let (lat, ps) = full(2, 3);
        let p = build_problem(&ps, &lat, 1).unwrap();
        // 0 -> 2 -> 4 is a valid single path
        let mut x = vec![0.0; ps.len()];
        let pos = |a, b| ps.pairs.iter().position(|&q| q == (a, b)).unwrap();
        x[pos(0, 2)] = 1.0;
        x[pos(2, 4)] = 1.0 - 1e-8;
        assert!(p.check_integral(&x).is_ok());
        x[pos(2, 4)] = 0.5;
        assert!(p.check_integral(&x).is_err());
        x[pos(2, 4)] = 0.0;
        assert!(p.check_integral(&x).is_err());
    }
}
