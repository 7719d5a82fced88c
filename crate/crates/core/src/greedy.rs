//! Generalized McAulay-Quatieri peak matching.
//!
//! Over a span of `K` frames, repeatedly pick the cheapest remaining K-tuple
//! (one node per frame, cost = sum of its adjacent connection costs), retire
//! its nodes, and stop after `L` tuples or as soon as the winning tuple
//! contains a connection above the threshold. Short spans can then be chained
//! into longer paths through their shared frames.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::analysis::Lattice;
use crate::error::{invalid, Result};
use crate::lattice::{transition_costs, Distance};
use crate::par;
use crate::paths::{PathSet, TrackMethod};

/// How the per-step argmin is found. Both give the same tuples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    /// Branch and bound, valid tuples first.
    #[default]
    Pruned,
    /// Scores every remaining tuple; `candidates` then counts them exactly.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TupleSelection {
    pub k_start: usize,
    /// Global node indices, one per frame of the span.
    pub tuples: Vec<Vec<usize>>,
    pub total_costs: Vec<f64>,
    /// Full tuples scored at each step.
    pub candidates: Vec<u64>,
    /// The argmin of the last step had a connection above the threshold.
    pub stopped_early: bool,
}

impl TupleSelection {
    fn empty(k_start: usize) -> Self {
        Self {
            k_start,
            tuples: Vec::new(),
            total_costs: Vec::new(),
            candidates: Vec::new(),
            stopped_early: false,
        }
    }

    pub fn total_cost(&self) -> f64 {
        self.total_costs.iter().sum()
    }
}

/// Best tuple in local indices, with its cost.
#[derive(Debug, Clone)]
struct Best {
    cost: f64,
    tuple: Vec<usize>,
}

struct Span<'a> {
    costs: &'a [Vec<Vec<f64>>],
    free: &'a [Vec<bool>],
    delta: f64,
}

impl Span<'_> {
    fn len(&self) -> usize {
        self.free.len()
    }

    /// Depth-first search in lexicographic order from a fixed first node.
    ///
    /// `valid_only` restricts to connections within the threshold; otherwise
    /// only tuples holding at least one connection above it are accepted.
    /// A result must also beat `bound` when one is given.
    fn search(&self, first: usize, valid_only: bool, bound: Option<&Best>, count: &mut u64) -> Option<Best> {
        let mut best: Option<Best> = None;
        let mut tuple = vec![first];
        self.dfs(&mut tuple, 0.0, false, valid_only, bound, &mut best, count);
        best
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        tuple: &mut Vec<usize>,
        partial: f64,
        has_invalid: bool,
        valid_only: bool,
        bound: Option<&Best>,
        best: &mut Option<Best>,
        count: &mut u64,
    ) {
        let depth = tuple.len();
        if depth == self.len() {
            *count += 1;
            if !valid_only && !has_invalid {
                return;
            }
            if beats(partial, tuple, best.as_ref()) && beats(partial, tuple, bound) {
                *best = Some(Best {
                    cost: partial,
                    tuple: tuple.clone(),
                });
            }
            return;
        }
        let prev = tuple[depth - 1];
        for j in 0..self.free[depth].len() {
            if !self.free[depth][j] {
                continue;
            }
            let c = self.costs[depth - 1][prev][j];
            let bad = !(c <= self.delta);
            if valid_only && bad {
                continue;
            }
            let next = partial + c;
            // costs are non-negative, so a partial already above the
            // incumbent cannot recover
            if [best.as_ref(), bound].into_iter().flatten().any(|b| next > b.cost) {
                continue;
            }
            tuple.push(j);
            self.dfs(tuple, next, has_invalid || bad, valid_only, bound, best, count);
            tuple.pop();
        }
    }

    /// Every remaining tuple scored, nothing pruned.
    fn exhaustive(&self, first: usize, count: &mut u64) -> Option<Best> {
        let mut best: Option<Best> = None;
        let mut tuple = vec![first];
        self.enumerate(&mut tuple, 0.0, &mut best, count);
        best
    }

    fn enumerate(&self, tuple: &mut Vec<usize>, partial: f64, best: &mut Option<Best>, count: &mut u64) {
        let depth = tuple.len();
        if depth == self.len() {
            *count += 1;
            if beats(partial, tuple, best.as_ref()) {
                *best = Some(Best {
                    cost: partial,
                    tuple: tuple.clone(),
                });
            }
            return;
        }
        let prev = tuple[depth - 1];
        for j in 0..self.free[depth].len() {
            if self.free[depth][j] {
                tuple.push(j);
                self.enumerate(tuple, partial + self.costs[depth - 1][prev][j], best, count);
                tuple.pop();
            }
        }
    }

    fn is_valid(&self, tuple: &[usize]) -> bool {
        tuple
            .windows(2)
            .enumerate()
            .all(|(t, w)| self.costs[t][w[0]][w[1]] <= self.delta)
    }
}

/// Strictly cheaper, or equally cheap and lexicographically earlier.
fn beats(cost: f64, tuple: &[usize], other: Option<&Best>) -> bool {
    match other {
        None => true,
        Some(b) => cost < b.cost || (cost == b.cost && tuple < b.tuple.as_slice()),
    }
}

/// Reduces per-first-node results in order, keeping the earliest minimum.
fn reduce(results: Vec<(Option<Best>, u64)>) -> (Option<Best>, u64) {
    let mut count = 0;
    let mut best: Option<Best> = None;
    for (b, c) in results {
        count += c;
        if let Some(b) = b {
            if beats(b.cost, &b.tuple, best.as_ref()) {
                best = Some(b);
            }
        }
    }
    (best, count)
}

fn firsts(free: &[bool]) -> Vec<usize> {
    (0..free.len()).filter(|&i| free[i]).collect()
}

/// One step of the greedy search: the argmin tuple and how many full tuples
/// were scored.
fn argmin(span: &Span, mode: SearchMode) -> (Option<Best>, u64) {
    let starts = firsts(&span.free[0]);
    match mode {
        SearchMode::Exhaustive => reduce(par::map_slice(&starts, |&i| {
            let mut n = 0;
            (span.exhaustive(i, &mut n), n)
        })),
        SearchMode::Pruned => {
            let (valid, n_valid) = reduce(par::map_slice(&starts, |&i| {
                let mut n = 0;
                (span.search(i, true, None, &mut n), n)
            }));
            let Some(valid) = valid else {
                // every remaining tuple (if any) crosses the threshold
                let (any, n_any) = reduce(par::map_slice(&starts, |&i| {
                    let mut n = 0;
                    (span.search(i, false, None, &mut n), n)
                }));
                return (any, n_valid + n_any);
            };
            let (invalid, n_invalid) = reduce(par::map_slice(&starts, |&i| {
                let mut n = 0;
                (span.search(i, false, Some(&valid), &mut n), n)
            }));
            (Some(invalid.unwrap_or(valid)), n_valid + n_invalid)
        }
    }
}

/// Greedy tuple selection over frames `k_start .. k_start + k_span`.
pub fn greedy_tuples<D: Distance + ?Sized>(
    lat: &Lattice,
    d: &D,
    n_paths: usize,
    delta_mq: f64,
    k_start: usize,
    k_span: usize,
) -> Result<TupleSelection> {
    greedy_tuples_with(lat, d, n_paths, delta_mq, k_start, k_span, SearchMode::Pruned)
}

pub fn greedy_tuples_with<D: Distance + ?Sized>(
    lat: &Lattice,
    d: &D,
    n_paths: usize,
    delta_mq: f64,
    k_start: usize,
    k_span: usize,
    mode: SearchMode,
) -> Result<TupleSelection> {
    if k_span < 2 {
        return invalid(format!("tuple span must cover at least 2 frames, got {k_span}"));
    }
    if k_start + k_span > lat.n_frames() {
        return invalid(format!(
            "frames {k_start}..{} exceed lattice of {} frames",
            k_start + k_span,
            lat.n_frames()
        ));
    }
    let mut sel = TupleSelection::empty(k_start);
    let frames = k_start..k_start + k_span;
    if frames.clone().any(|k| lat.frame_len(k) == 0) {
        return Ok(sel);
    }
    let costs: Vec<Vec<Vec<f64>>> = frames
        .clone()
        .take(k_span - 1)
        .map(|k| transition_costs(lat, d, k))
        .collect();
    let mut free: Vec<Vec<bool>> = frames.clone().map(|k| vec![true; lat.frame_len(k)]).collect();

    for _ in 0..n_paths {
        let span = Span {
            costs: &costs,
            free: &free,
            delta: delta_mq,
        };
        let (best, count) = argmin(&span, mode);
        sel.candidates.push(count);
        let Some(best) = best else { break };
        if !span.is_valid(&best.tuple) {
            sel.stopped_early = true;
            break;
        }
        for (f, &i) in free.iter_mut().zip(&best.tuple) {
            f[i] = false;
        }
        sel.tuples.push(
            best.tuple
                .iter()
                .enumerate()
                .map(|(t, &i)| lat.global(k_start + t, i))
                .collect(),
        );
        sel.total_costs.push(best.cost);
    }
    Ok(sel)
}

/// Start frames and lengths of the overlapping spans covering `n_frames`.
pub fn span_layout(n_frames: usize, k_mq: usize) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut start = 0;
    while start + 1 < n_frames {
        let len = k_mq.min(n_frames - start);
        spans.push((start, len));
        start += k_mq - 1;
    }
    spans
}

/// Greedy selection on every span of [`span_layout`].
pub fn greedy_spans<D: Distance + ?Sized>(
    lat: &Lattice,
    d: &D,
    n_paths: usize,
    delta_mq: f64,
    k_mq: usize,
) -> Result<Vec<TupleSelection>> {
    if k_mq < 2 {
        return invalid(format!("K_MQ must be at least 2, got {k_mq}"));
    }
    span_layout(lat.n_frames(), k_mq)
        .into_iter()
        .map(|(start, len)| greedy_tuples(lat, d, n_paths, delta_mq, start, len))
        .collect()
}

/// Joins tuples of consecutive spans that meet at the same node of the
/// shared frame. Unjoined tuples stay as shorter paths.
pub fn chain_spans(spans: &[TupleSelection]) -> PathSet {
    let mut paths: Vec<Vec<usize>> = Vec::new();
    let mut costs: Vec<f64> = Vec::new();
    // last node of each open chain -> chain index
    let mut open: HashMap<usize, usize> = HashMap::new();
    for sel in spans {
        let mut next_open = HashMap::new();
        for (tuple, &cost) in sel.tuples.iter().zip(&sel.total_costs) {
            let idx = match open.get(&tuple[0]) {
                Some(&c) => {
                    paths[c].extend_from_slice(&tuple[1..]);
                    costs[c] += cost;
                    c
                }
                None => {
                    paths.push(tuple.clone());
                    costs.push(cost);
                    paths.len() - 1
                }
            };
            next_open.insert(*tuple.last().unwrap(), idx);
        }
        open = next_open;
    }
    let mut order: Vec<usize> = (0..paths.len()).collect();
    order.sort_by_key(|&i| paths[i][0]);
    PathSet {
        paths: order.iter().map(|&i| paths[i].clone()).collect(),
        costs: order.iter().map(|&i| costs[i]).collect(),
        method: TrackMethod::Greedy,
    }
}

/// Greedy search over successive `k_mq`-frame spans sharing one frame,
/// chained into longer paths.
pub fn chain_short_paths<D: Distance + ?Sized>(
    lat: &Lattice,
    d: &D,
    n_paths: usize,
    delta_mq: f64,
    k_mq: usize,
) -> Result<PathSet> {
    Ok(chain_spans(&greedy_spans(lat, d, n_paths, delta_mq, k_mq)?))
}
