#![allow(dead_code)]

use ptrack::lattice::CostFn;
use ptrack::Lattice;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random table instance: frame sizes, costs in [0, 1), path count.
pub struct Instance {
    pub lat: Lattice,
    pub costs: Vec<Vec<Vec<f64>>>,
    pub n_paths: usize,
}

impl Instance {
    pub fn cost_fn(&self) -> CostFn {
        CostFn::Custom { costs: self.costs.clone() }
    }
}

/// `count` instances with K in 2..=4, N_k in 1..=4 and L in 1..=2.
pub fn random_instances(count: usize, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let k = rng.gen_range(2..=4);
            let sizes: Vec<usize> = (0..k).map(|_| rng.gen_range(1..=4)).collect();
            let costs = sizes
                .windows(2)
                .map(|w| (0..w[0]).map(|_| (0..w[1]).map(|_| rng.gen::<f64>()).collect()).collect())
                .collect();
            Instance {
                lat: Lattice::placeholder(&sizes),
                costs,
                n_paths: rng.gen_range(1..=2),
            }
        })
        .collect()
}

/// Every full path as (global nodes, cost).
fn all_paths(lat: &Lattice, costs: &[Vec<Vec<f64>>]) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::new();
    let mut stack = vec![(Vec::new(), 0.0)];
    while let Some((prefix, cost)) = stack.pop() {
        let k = prefix.len();
        if k == lat.n_frames() {
            let nodes = prefix.iter().enumerate().map(|(k, &i)| lat.global(k, i)).collect();
            out.push((nodes, cost));
            continue;
        }
        for i in 0..lat.frame_len(k) {
            let step = if k == 0 { 0.0 } else { costs[k - 1][prefix[k - 1]][i] };
            let mut p = prefix.clone();
            p.push(i);
            stack.push((p, cost + step));
        }
    }
    out
}

/// Cheapest total cost of `l` node-disjoint full paths, by enumeration.
/// `None` when no such set exists.
pub fn brute_force_best(lat: &Lattice, costs: &[Vec<Vec<f64>>], l: usize) -> Option<f64> {
    let paths = all_paths(lat, costs);
    fn go(paths: &[(Vec<usize>, f64)], from: usize, left: usize, used: &mut Vec<usize>, acc: f64, best: &mut Option<f64>) {
        if left == 0 {
            if best.is_none_or(|b| acc < b) {
                *best = Some(acc);
            }
            return;
        }
        for p in from..paths.len() {
            let (nodes, c) = &paths[p];
            if nodes.iter().any(|n| used.contains(n)) {
                continue;
            }
            let mark = used.len();
            used.extend(nodes);
            go(paths, p + 1, left - 1, used, acc + c, best);
            used.truncate(mark);
        }
    }
    let mut best = None;
    go(&paths, 0, l, &mut Vec::new(), 0.0, &mut best);
    best
}

/// The two-by-two instance where picking the single cheapest connection
/// first forces the expensive one.
pub fn pathological() -> (Lattice, CostFn) {
    (
        Lattice::placeholder(&[2, 2]),
        CostFn::Custom {
            costs: vec![vec![vec![1.0, 2.0], vec![3.0, 100.0]]],
        },
    )
}

/// Greedy by enumeration: repeatedly take the cheapest full path avoiding
/// nodes already used. Returns the summed cost of the `l` picks.
pub fn brute_force_greedy(lat: &Lattice, costs: &[Vec<Vec<f64>>], l: usize) -> Option<f64> {
    let paths = all_paths(lat, costs);
    let mut used: Vec<usize> = Vec::new();
    let mut total = 0.0;
    for _ in 0..l {
        let (nodes, c) = paths
            .iter()
            .filter(|(nodes, _)| nodes.iter().all(|n| !used.contains(n)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)))?;
        used.extend(nodes);
        total += c;
    }
    Some(total)
}
