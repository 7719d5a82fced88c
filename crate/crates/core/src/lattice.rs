//! Connection costs and the admissible pair set between adjacent frames.

use serde::{Deserialize, Serialize};

use crate::analysis::{ChirpAtom, Lattice};
use crate::error::{invalid, Result};
use crate::par;

/// Connection cost between nodes of a lattice.
///
/// Costs must be non-negative. Only adjacent-frame connections are ever
/// requested by the trackers; everything else is `+inf`.
pub trait Distance: Sync {
    /// Cost from global node `from` (frame k) to `to` (frame k+1).
    fn adjacent_cost(&self, lat: &Lattice, from: usize, to: usize) -> f64;

    fn distance(&self, lat: &Lattice, from: usize, to: usize) -> f64 {
        if lat.frame_of(to) == lat.frame_of(from) + 1 {
            self.adjacent_cost(lat, from, to)
        } else {
            f64::INFINITY
        }
    }
}

/// Error in predicting `b`'s frequency from `a` one hop later:
/// `|a.omega + a.psi * hop - b.omega|`. Non-adjacent frames give `+inf`.
pub fn dist_prediction(a: &ChirpAtom, b: &ChirpAtom, hop: f64) -> f64 {
    if b.frame != a.frame + 1 {
        return f64::INFINITY;
    }
    (a.omega + a.psi * hop - b.omega).abs()
}

/// Dense per-transition cost tables: `costs[k][i][j]` connects node `i` of
/// frame `k` to node `j` of frame `k + 1`.
pub type TransitionCosts = Vec<Vec<Vec<f64>>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CostFn {
    /// Frequency prediction error across `hop` samples.
    PredictionError { hop: f64 },
    /// Explicit table, mostly for tests and small worked instances.
    Custom { costs: TransitionCosts },
}

impl Distance for CostFn {
    fn adjacent_cost(&self, lat: &Lattice, from: usize, to: usize) -> f64 {
        match self {
            CostFn::PredictionError { hop } => dist_prediction(lat.atom(from), lat.atom(to), *hop),
            CostFn::Custom { costs } => {
                let (k, i) = lat.locate(from);
                let (_, j) = lat.locate(to);
                costs
                    .get(k)
                    .and_then(|t| t.get(i))
                    .and_then(|r| r.get(j))
                    .copied()
                    .unwrap_or(f64::INFINITY)
            }
        }
    }
}

/// Cost matrix between frames `k` and `k + 1` in local indices.
pub fn transition_costs<D: Distance + ?Sized>(lat: &Lattice, d: &D, k: usize) -> Vec<Vec<f64>> {
    let next = lat.frame_range(k + 1);
    lat.frame_range(k)
        .map(|i| next.clone().map(|j| d.adjacent_cost(lat, i, j)).collect())
        .collect()
}

/// Admissible connections `(i, j)` with their costs.
///
/// Pairs are in ascending `(i, j)` order of global indices; the position of
/// a pair in the list is its index in the solution vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PairSetRepr", into = "PairSetRepr")]
pub struct PairSet {
    pub pairs: Vec<(usize, usize)>,
    pub costs: Vec<f64>,
    pub delta: f64,
}

impl PairSet {
    pub fn new(pairs: Vec<(usize, usize)>, costs: Vec<f64>, delta: f64) -> Result<Self> {
        if pairs.len() != costs.len() {
            return invalid(format!("{} pairs but {} costs", pairs.len(), costs.len()));
        }
        if let Some(c) = costs.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
            return invalid(format!("pair cost {c} is not a finite non-negative number"));
        }
        Ok(Self { pairs, costs, delta })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Same pairs reordered so that new position `p` holds old `order[p]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            pairs: order.iter().map(|&p| self.pairs[p]).collect(),
            costs: order.iter().map(|&p| self.costs[p]).collect(),
            delta: self.delta,
        }
    }

    /// Checks the pair set against a lattice: adjacency, threshold, no self loops.
    pub fn validate(&self, lat: &Lattice) -> Result<()> {
        let m = lat.n_nodes();
        for (&(i, j), &c) in self.pairs.iter().zip(&self.costs) {
            if i >= m || j >= m {
                return invalid(format!("pair ({i}, {j}) outside {m} nodes"));
            }
            if lat.frame_of(j) != lat.frame_of(i) + 1 {
                return invalid(format!("pair ({i}, {j}) does not join adjacent frames"));
            }
            if c > self.delta {
                return invalid(format!("pair ({i}, {j}) cost {c} above threshold {}", self.delta));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Wire form; an infinite threshold is written as `null`.
#[derive(Serialize, Deserialize)]
struct PairSetRepr {
    pairs: Vec<[usize; 2]>,
    costs: Vec<f64>,
    delta: Option<f64>,
}

impl From<PairSet> for PairSetRepr {
    fn from(p: PairSet) -> Self {
        Self {
            pairs: p.pairs.iter().map(|&(i, j)| [i, j]).collect(),
            costs: p.costs,
            delta: p.delta.is_finite().then_some(p.delta),
        }
    }
}

impl TryFrom<PairSetRepr> for PairSet {
    type Error = crate::Error;

    fn try_from(r: PairSetRepr) -> Result<Self> {
        PairSet::new(
            r.pairs.into_iter().map(|[i, j]| (i, j)).collect(),
            r.costs,
            r.delta.unwrap_or(f64::INFINITY),
        )
    }
}

/// All adjacent-frame pairs whose cost is at most `delta`.
pub fn build_pairs<D: Distance + ?Sized>(lat: &Lattice, d: &D, delta: f64) -> PairSet {
    let n_trans = lat.n_frames().saturating_sub(1);
    let per_frame = par::map_range(n_trans, |k| {
        let next = lat.frame_range(k + 1);
        let mut out = Vec::new();
        for i in lat.frame_range(k) {
            for j in next.clone() {
                let c = d.adjacent_cost(lat, i, j);
                if c.is_finite() && c <= delta {
                    out.push(((i, j), c));
                }
            }
        }
        out
    });
    let (pairs, costs) = per_frame.into_iter().flatten().unzip();
    PairSet { pairs, costs, delta }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn atom(frame: usize, omega: f64, psi: f64) -> ChirpAtom {
        ChirpAtom {
            frame,
            phi: 0.0,
            omega,
            psi,
            power: 1.0,
            bin: 0,
        }
    }

    #[test]
    fn prediction_error_examples() {
        assert_eq!(dist_prediction(&atom(0, 1.0, 0.001), &atom(1, 1.512, 0.0), 512.0), 0.0);
        let d = dist_prediction(&atom(0, 1.0, 0.0), &atom(1, 1.1, 0.0), 512.0);
        assert!((d - 0.1).abs() < 1e-12);
        assert_eq!(dist_prediction(&atom(0, 1.0, 0.0), &atom(2, 1.0, 0.0), 512.0), f64::INFINITY);
        assert_eq!(dist_prediction(&atom(3, 1.0, 0.0), &atom(3, 1.0, 0.0), 512.0), f64::INFINITY);
    }

    #[test]
    fn complete_bipartite_and_threshold() {
        let lat = Lattice::placeholder(&[2, 2]);
        let full = CostFn::Custom {
            costs: vec![vec![vec![0.05; 2]; 2]],
        };
        assert_eq!(build_pairs(&lat, &full, 0.1).len(), 4);
        let cut = CostFn::Custom {
            costs: vec![vec![vec![0.05, 0.05], vec![0.2, 0.05]]],
        };
        let ps = build_pairs(&lat, &cut, 0.1);
        assert_eq!(ps.pairs, vec![(0, 2), (0, 3), (1, 3)]);
        ps.validate(&lat).unwrap();
    }

    #[test]
    fn non_adjacent_distance_is_infinite() {
        let lat = Lattice::placeholder(&[1, 1, 1]);
        let d = CostFn::Custom {
            costs: vec![vec![vec![0.0]], vec![vec![0.0]]],
        };
        assert_eq!(d.distance(&lat, 0, 2), f64::INFINITY);
        assert_eq!(d.distance(&lat, 1, 0), f64::INFINITY);
        assert_eq!(d.distance(&lat, 0, 1), 0.0);
    }

    #[test]
    fn json_round_trip_with_infinite_delta() {
        let ps = PairSet::new(vec![(0, 2), (1, 2)], vec![0.25, 0.5], f64::INFINITY).unwrap();
        let s = ps.to_json().unwrap();
        assert!(s.contains("null"));
        assert_eq!(PairSet::from_json(&s).unwrap(), ps);
        assert!(PairSet::from_json(r#"{"pairs":[[0,1]],"costs":[],"delta":1.0}"#).is_err());
    }

    fn random_lattice() -> impl Strategy<Value = (Vec<usize>, Vec<f64>)> {
        prop::collection::vec(0usize..5, 2..6).prop_flat_map(|sizes| {
            let n: usize = sizes.iter().sum();
            (Just(sizes), prop::collection::vec(0.05f64..3.0, n))
        })
    }

    proptest! {
        #[test]
        fn pairs_respect_invariants((sizes, omegas) in random_lattice(), delta in 0.0f64..2.0, extra in 0.0f64..1.0) {
            let mut it = omegas.into_iter();
            let frames: Vec<Vec<ChirpAtom>> = sizes
                .iter()
                .map(|&n| (0..n).map(|_| atom(0, it.next().unwrap(), 1e-4)).collect())
                .collect();
            let lat = Lattice::from_frames(frames);
            let d = CostFn::PredictionError { hop: 512.0 };
            let ps = build_pairs(&lat, &d, delta);
            ps.validate(&lat).unwrap();
            prop_assert!(ps.len() <= (lat.n_frames() - 1) * lat.max_frame_len().pow(2));
            prop_assert!(ps.pairs.windows(2).all(|w| w[0] < w[1]));
            for (&(i, j), &c) in ps.pairs.iter().zip(&ps.costs) {
                prop_assert_eq!(c.to_bits(), d.distance(&lat, i, j).to_bits());
            }
            prop_assert_eq!(&build_pairs(&lat, &d, delta), &ps);
            let wider = build_pairs(&lat, &d, delta + extra);
            prop_assert!(ps.pairs.iter().all(|p| wider.pairs.contains(p)));
        }
    }
}
