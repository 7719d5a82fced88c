use super::problem::TrackingProblem;
use crate::analysis::Lattice;
use crate::error::{Error, Result};
use crate::lattice::PairSet;
use crate::paths::{PathSet, TrackMethod};

fn broken(msg: String) -> Error {
    Error::Internal(msg)
}

/// Follows the unit connections of `x` from frame 0 to the last frame.
///
/// Any degree or continuity violation is reported as an internal failure:
/// it means the solver returned something outside the feasible set.
pub fn extract_paths(x: &[f64], p: &TrackingProblem, ps: &PairSet, lat: &Lattice) -> Result<PathSet> {
    if ps.pairs != p.pairs {
        return Err(broken("pair set does not match the problem".into()));
    }
    let xi = p.check_integral(x)?;
    let m = lat.n_nodes();
    let k = lat.n_frames();
    let mut next: Vec<Option<(usize, usize)>> = vec![None; m];
    let mut has_pred = vec![false; m];
    for (col, (&(i, j), &on)) in ps.pairs.iter().zip(&xi).enumerate() {
        if on == 0 {
            continue;
        }
        if next[i].replace((j, col)).is_some() {
            return Err(broken(format!("node {i} has two outgoing connections")));
        }
        if std::mem::replace(&mut has_pred[j], true) {
            return Err(broken(format!("node {j} has two incoming connections")));
        }
    }

    let mut paths = Vec::new();
    let mut costs = Vec::new();
    for start in lat.frame_range(0) {
        if next[start].is_none() {
            continue;
        }
        let mut path = vec![start];
        let mut cost = 0.0;
        let mut v = start;
        while let Some((w, col)) = next[v] {
            path.push(w);
            cost += ps.costs[col];
            v = w;
        }
        if path.len() != k {
            return Err(broken(format!("path from node {start} stops after {} frames", path.len())));
        }
        paths.push(path);
        costs.push(cost);
    }
    if paths.len() != p.dims.n_paths {
        return Err(broken(format!(
            "{} paths recovered, {} required",
            paths.len(),
            p.dims.n_paths
        )));
    }
    let used: usize = paths.iter().map(|p| p.len() - 1).sum();
    let ones = xi.iter().filter(|v| **v == 1).count();
    if used != ones {
        return Err(broken(format!("{ones} active connections, only {used} on paths")));
    }
    Ok(PathSet {
        paths,
        costs,
        method: TrackMethod::Lp,
    })
}
