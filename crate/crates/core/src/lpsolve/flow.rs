//! Exact solver through the min-cost-flow structure of the program.
//!
//! Each lattice node is split into an entry and an exit joined by a unit
//! capacity arc, which realises "at most one path per node". A super source
//! feeds frame 0 and the last frame drains into a super sink; `L` units are
//! pushed by successive shortest paths with Johnson potentials. The
//! constraint matrix is totally unimodular, so the resulting 0/1 flow is an
//! optimal vertex of the linear program.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::problem::TrackingProblem;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// One entry per pair, 0.0 or 1.0.
    pub x: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: i32,
    cost: f64,
}

struct Network {
    adj: Vec<Vec<usize>>,
    arcs: Vec<Arc>,
}

impl Network {
    fn new(n: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n],
            arcs: Vec::new(),
        }
    }

    /// Adds `u -> v` and its residual twin; returns the forward arc id.
    fn link(&mut self, u: usize, v: usize, cost: f64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to: v, cap: 1, cost });
        self.arcs.push(Arc {
            to: u,
            cap: 0,
            cost: -cost,
        });
        self.adj[u].push(id);
        self.adj[v].push(id + 1);
        id
    }
}

#[derive(PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const SOURCE: usize = 0;
const SINK: usize = 1;

fn entry(v: usize) -> usize {
    2 + 2 * v
}

fn exit(v: usize) -> usize {
    3 + 2 * v
}

/// Solves the program exactly. Works for both the reduced and the full form
/// since they share one feasible set.
pub fn solve(p: &TrackingProblem) -> Result<Solution> {
    let dims = &p.dims;
    let k = dims.n_frames();
    let m: usize = dims.frame_sizes.iter().sum();
    let n_paths = dims.n_paths;

    let mut net = Network::new(2 + 2 * m);
    for v in 0..m {
        net.link(entry(v), exit(v), 0.0);
    }
    let first = 0..dims.frame_sizes[0];
    let last = dims.frame_start(k - 1)..m;
    for v in first {
        net.link(SOURCE, entry(v), 0.0);
    }
    for v in last {
        net.link(exit(v), SINK, 0.0);
    }
    let pair_arcs: Vec<usize> = p
        .pairs
        .iter()
        .zip(&p.c)
        .map(|(&(i, j), &c)| net.link(exit(i), entry(j), c))
        .collect();

    let mut potential = dag_potentials(&net, dims.frame_sizes.as_slice());
    let mut routed = 0;
    while routed < n_paths {
        let Some(parent) = dijkstra(&net, &mut potential) else {
            break;
        };
        let mut v = SINK;
        while v != SOURCE {
            let a = parent[v];
            net.arcs[a].cap -= 1;
            net.arcs[a ^ 1].cap += 1;
            v = net.arcs[a ^ 1].to;
        }
        routed += 1;
    }
    if routed < n_paths {
        return Err(super::certificate::infeasible(p, routed));
    }

    let x: Vec<f64> = pair_arcs
        .iter()
        .map(|&a| if net.arcs[a].cap == 0 { 1.0 } else { 0.0 })
        .collect();
    let objective = p.objective(&x);
    if !objective.is_finite() {
        return Err(Error::Internal("non-finite objective".into()));
    }
    Ok(Solution { x, objective })
}

/// Shortest distances from the source over the initial (acyclic) network,
/// relaxing nodes in frame order.
fn dag_potentials(net: &Network, frame_sizes: &[usize]) -> Vec<f64> {
    let n = net.adj.len();
    let mut dist = vec![f64::INFINITY; n];
    dist[SOURCE] = 0.0;
    let relax = |dist: &mut Vec<f64>, u: usize| {
        if !dist[u].is_finite() {
            return;
        }
        for &a in &net.adj[u] {
            let arc = &net.arcs[a];
            if arc.cap > 0 && dist[u] + arc.cost < dist[arc.to] {
                dist[arc.to] = dist[u] + arc.cost;
            }
        }
    };
    relax(&mut dist, SOURCE);
    let m: usize = frame_sizes.iter().sum();
    for v in 0..m {
        relax(&mut dist, entry(v));
        relax(&mut dist, exit(v));
    }
    // unreachable nodes stay unreachable in every residual network
    dist.iter().map(|d| if d.is_finite() { *d } else { 0.0 }).collect()
}

/// Dijkstra on reduced costs. Updates potentials and returns the arc used to
/// reach each node, or `None` when the sink is unreachable.
fn dijkstra(net: &Network, potential: &mut [f64]) -> Option<Vec<usize>> {
    let n = net.adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[SOURCE] = 0.0;
    heap.push(Item(0.0, SOURCE));
    while let Some(Item(d, u)) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for &a in &net.adj[u] {
            let arc = &net.arcs[a];
            if arc.cap <= 0 || done[arc.to] {
                continue;
            }
            // reduced costs are non-negative up to rounding
            let reduced = (arc.cost + potential[u] - potential[arc.to]).max(0.0);
            let nd = d + reduced;
            if nd < dist[arc.to] {
                dist[arc.to] = nd;
                parent[arc.to] = a;
                heap.push(Item(nd, arc.to));
            }
        }
    }
    if !dist[SINK].is_finite() {
        return None;
    }
    for (p, d) in potential.iter_mut().zip(&dist) {
        if d.is_finite() {
            *p += d;
        }
    }
    Some(parent)
}
