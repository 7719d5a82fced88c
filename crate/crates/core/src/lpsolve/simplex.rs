//! Dense two-phase primal simplex with Bland's rule.
//!
//! Used as an independent route to the optimum of small programs (and for
//! the unreduced system, which the flow solver never looks at). Variables
//! are implicitly non-negative.

use super::flow::Solution;
use super::problem::TrackingProblem;
use crate::error::{Error, Result};

const EPS: f64 = 1e-9;
const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseLp {
    pub c: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub kinds: Vec<RowKind>,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpStatus {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
    PivotLimit,
}

struct Tableau {
    t: Vec<Vec<f64>>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, e: usize) {
        let pv = self.t[r][e];
        for v in self.t[r].iter_mut() {
            *v /= pv;
        }
        let row = self.t[r].clone();
        for (i, other) in self.t.iter_mut().enumerate() {
            if i != r && other[e] != 0.0 {
                let f = other[e];
                for (o, p) in other.iter_mut().zip(&row) {
                    *o -= f * p;
                }
            }
        }
        let f = self.obj[e];
        if f != 0.0 {
            for (o, p) in self.obj.iter_mut().zip(&row) {
                *o -= f * p;
            }
        }
        self.basis[r] = e;
    }

    /// Runs Bland-rule pivots; columns `>= allowed` never enter.
    fn optimize(&mut self, allowed: usize) -> std::result::Result<(), LpStatus> {
        for _ in 0..MAX_PIVOTS {
            let Some(e) = (0..allowed).find(|&j| self.obj[j] < -EPS) else {
                return Ok(());
            };
            let mut leave: Option<(f64, usize, usize)> = None;
            for (i, row) in self.t.iter().enumerate() {
                if row[e] > EPS {
                    let ratio = row[self.width] / row[e];
                    let better = match leave {
                        None => true,
                        Some((best, _, b)) => ratio < best - EPS || (ratio <= best + EPS && self.basis[i] < b),
                    };
                    if better {
                        leave = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            let Some((_, r, _)) = leave else {
                return Err(LpStatus::Unbounded);
            };
            self.pivot(r, e);
        }
        Err(LpStatus::PivotLimit)
    }
}

/// Minimizes `c.x` subject to the rows and `x >= 0`.
pub fn solve_dense(lp: &DenseLp) -> LpStatus {
    let n = lp.c.len();
    let m = lp.rows.len();
    // normalise to non-negative right-hand sides
    let mut rows = lp.rows.clone();
    let mut kinds = lp.kinds.clone();
    let mut rhs = lp.rhs.clone();
    for i in 0..m {
        if rhs[i] < 0.0 {
            rhs[i] = -rhs[i];
            rows[i].iter_mut().for_each(|v| *v = -*v);
            kinds[i] = match kinds[i] {
                RowKind::Le => RowKind::Ge,
                RowKind::Ge => RowKind::Le,
                RowKind::Eq => RowKind::Eq,
            };
        }
    }
    let n_slack = kinds.iter().filter(|k| **k != RowKind::Eq).count();
    let n_art = kinds.iter().filter(|k| **k != RowKind::Le).count();
    let art0 = n + n_slack;
    let width = art0 + n_art;

    let mut t = vec![vec![0.0; width + 1]; m];
    let mut basis = vec![0; m];
    let (mut s, mut a) = (n, art0);
    for i in 0..m {
        t[i][..n].copy_from_slice(&rows[i]);
        t[i][width] = rhs[i];
        match kinds[i] {
            RowKind::Le => {
                t[i][s] = 1.0;
                basis[i] = s;
                s += 1;
            }
            RowKind::Ge => {
                t[i][s] = -1.0;
                s += 1;
                t[i][a] = 1.0;
                basis[i] = a;
                a += 1;
            }
            RowKind::Eq => {
                t[i][a] = 1.0;
                basis[i] = a;
                a += 1;
            }
        }
    }

    let mut obj = vec![0.0; width + 1];
    obj[art0..width].iter_mut().for_each(|v| *v = 1.0);
    for i in 0..m {
        if basis[i] >= art0 {
            for (o, v) in obj.iter_mut().zip(&t[i]) {
                *o -= v;
            }
        }
    }
    let mut tab = Tableau { t, obj, basis, width };
    if let Err(s) = tab.optimize(width) {
        return s;
    }
    if -tab.obj[width] > 1e-7 {
        return LpStatus::Infeasible;
    }
    // drive zero-level artificials out where possible
    for r in 0..m {
        if tab.basis[r] >= art0 {
            if let Some(j) = (0..art0).find(|&j| tab.t[r][j].abs() > EPS) {
                tab.pivot(r, j);
            }
        }
    }

    let mut obj = vec![0.0; width + 1];
    obj[..n].copy_from_slice(&lp.c);
    for r in 0..m {
        let cb = if tab.basis[r] < n { lp.c[tab.basis[r]] } else { 0.0 };
        if cb != 0.0 {
            for (o, v) in obj.iter_mut().zip(&tab.t[r]) {
                *o -= cb * v;
            }
        }
    }
    tab.obj = obj;
    if let Err(s) = tab.optimize(art0) {
        return s;
    }
    let mut x = vec![0.0; n];
    for r in 0..m {
        if tab.basis[r] < n {
            x[tab.basis[r]] = tab.t[r][width];
        }
    }
    let objective = lp.c.iter().zip(&x).map(|(c, x)| c * x).sum();
    LpStatus::Optimal { x, objective }
}

impl TrackingProblem {
    pub fn to_dense_lp(&self) -> DenseLp {
        let mut rows = self.g.to_dense();
        let mut kinds = vec![RowKind::Le; rows.len()];
        let mut rhs = self.h.clone();
        rows.extend(self.a.to_dense());
        kinds.extend(std::iter::repeat_n(RowKind::Eq, self.a.n_rows));
        rhs.extend(&self.b);
        DenseLp {
            c: self.c.clone(),
            rows,
            kinds,
            rhs,
        }
    }
}

/// Solves with the dense simplex; only sensible for small programs.
pub fn solve_simplex(p: &TrackingProblem) -> Result<Solution> {
    match solve_dense(&p.to_dense_lp()) {
        LpStatus::Optimal { x, objective } => Ok(Solution { x, objective }),
        LpStatus::Infeasible => Err(super::flow::solve(p).err().unwrap_or_else(|| {
            Error::Internal("simplex reports infeasible, flow solver disagrees".into())
        })),
        other => Err(Error::Internal(format!("simplex failed: {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y  s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  -> (2, 6), 36
        let lp = DenseLp {
            c: vec![-3.0, -5.0],
            rows: vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]],
            kinds: vec![RowKind::Le; 3],
            rhs: vec![4.0, 12.0, 18.0],
        };
        let LpStatus::Optimal { x, objective } = solve_dense(&lp) else {
            panic!()
        };
        assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 6.0).abs() < 1e-9);
        assert!((objective + 36.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_ge_rows() {
        // min x + y  s.t. x + y >= 2, x - y = 0
        let lp = DenseLp {
            c: vec![1.0, 1.0],
            rows: vec![vec![1.0, 1.0], vec![1.0, -1.0]],
            kinds: vec![RowKind::Ge, RowKind::Eq],
            rhs: vec![2.0, 0.0],
        };
        let LpStatus::Optimal { x, .. } = solve_dense(&lp) else {
            panic!()
        };
        assert!((x[0] - 1.0).abs() < 1e-9 && (x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let infeasible = DenseLp {
            c: vec![1.0],
            rows: vec![vec![1.0], vec![1.0]],
            kinds: vec![RowKind::Le, RowKind::Ge],
            rhs: vec![1.0, 2.0],
        };
        assert_eq!(solve_dense(&infeasible), LpStatus::Infeasible);
        let unbounded = DenseLp {
            c: vec![-1.0],
            rows: vec![vec![-1.0]],
            kinds: vec![RowKind::Le],
            rhs: vec![1.0],
        };
        assert_eq!(solve_dense(&unbounded), LpStatus::Unbounded);
    }
}
