//! Tracked paths shared by both trackers.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::Lattice;
use crate::error::{invalid, Result};
use crate::lattice::Distance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrackMethod {
    Greedy,
    Lp,
}

/// Node-disjoint paths through a lattice, each a run of global node indices
/// in consecutive frames, with one cost per path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSet {
    pub paths: Vec<Vec<usize>>,
    pub costs: Vec<f64>,
    pub method: TrackMethod,
}

impl PathSet {
    pub fn empty(method: TrackMethod) -> Self {
        Self {
            paths: Vec::new(),
            costs: Vec::new(),
            method,
        }
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn total_cost(&self) -> f64 {
        self.costs.iter().sum()
    }

    /// Checks disjointness, frame continuity and that each stored cost
    /// equals the recomputed sum of connection costs.
    pub fn validate<D: Distance + ?Sized>(&self, lat: &Lattice, d: &D) -> Result<()> {
        if self.paths.len() != self.costs.len() {
            return invalid("path and cost counts differ");
        }
        let mut seen = HashSet::new();
        for (path, &cost) in self.paths.iter().zip(&self.costs) {
            let mut sum = 0.0;
            for (n, &m) in path.iter().enumerate() {
                if m >= lat.n_nodes() {
                    return invalid(format!("node {m} out of range"));
                }
                if !seen.insert(m) {
                    return invalid(format!("node {m} used by two paths"));
                }
                if n > 0 {
                    let c = d.distance(lat, path[n - 1], m);
                    if !c.is_finite() {
                        return invalid(format!("nodes {} -> {m} are not connectable", path[n - 1]));
                    }
                    sum += c;
                }
            }
            if (sum - cost).abs() > 1e-9 * (1.0 + sum.abs()) {
                return invalid(format!("stored path cost {cost} != recomputed {sum}"));
            }
        }
        Ok(())
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_vec_pretty(self)?)?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&std::fs::read(path)?)?)
    }
}
