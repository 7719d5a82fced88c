//! Explains why fewer than `L` disjoint paths exist.

use super::problem::TrackingProblem;
use crate::error::Error;

/// Maximum matching between frames `k` and `k + 1` using only admissible
/// pairs (Kuhn's augmenting paths).
pub fn transition_matching(p: &TrackingProblem, k: usize) -> usize {
    let dims = &p.dims;
    let left0 = dims.frame_start(k);
    let right0 = dims.frame_start(k + 1);
    let n_left = dims.frame_sizes[k];
    let n_right = dims.frame_sizes[k + 1];
    let mut adj = vec![Vec::new(); n_left];
    for &(i, j) in &p.pairs {
        if (left0..left0 + n_left).contains(&i) {
            adj[i - left0].push(j - right0);
        }
    }
    let mut owner = vec![usize::MAX; n_right];
    let mut size = 0;
    for u in 0..n_left {
        let mut seen = vec![false; n_right];
        if augment(u, &adj, &mut owner, &mut seen) {
            size += 1;
        }
    }
    size
}

fn augment(u: usize, adj: &[Vec<usize>], owner: &mut [usize], seen: &mut [bool]) -> bool {
    for &v in &adj[u] {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        if owner[v] == usize::MAX || augment(owner[v], adj, owner, seen) {
            owner[v] = u;
            return true;
        }
    }
    false
}

/// Builds the infeasibility error after `routed` paths were found.
pub(crate) fn infeasible(p: &TrackingProblem, routed: usize) -> Error {
    let n_paths = p.dims.n_paths;
    let transition = (0..p.dims.n_frames() - 1).find(|&k| transition_matching(p, k) < n_paths);
    Error::Infeasible {
        requested: n_paths,
        achievable: routed,
        transition,
    }
}
