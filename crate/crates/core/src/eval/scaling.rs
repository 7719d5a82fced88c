use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::Lattice;
use crate::error::{invalid, Result};
use crate::greedy::{greedy_tuples_with, SearchMode};
use crate::lattice::CostFn;
use crate::lpsolve::track_lp;

/// Lattice with the given frame sizes and i.i.d. uniform [0, 1) costs.
pub fn random_table_instance(sizes: &[usize], seed: u64) -> (Lattice, CostFn) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let costs = sizes
        .windows(2)
        .map(|w| (0..w[0]).map(|_| (0..w[1]).map(|_| rng.gen::<f64>()).collect()).collect())
        .collect();
    (Lattice::placeholder(sizes), CostFn::Custom { costs })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScalingConfig {
    /// Frame sizes and spans for the greedy count check.
    pub greedy_n: Vec<usize>,
    pub greedy_k: Vec<usize>,
    /// Constant frame size and frame counts for LP timing.
    pub lp_n: usize,
    pub lp_k: Vec<usize>,
    pub lp_paths: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            greedy_n: (1..=5).collect(),
            greedy_k: (2..=4).collect(),
            lp_n: 12,
            lp_k: vec![16, 32, 64, 128, 256],
            lp_paths: 3,
            trials: 3,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyCountRow {
    pub n: usize,
    pub k: usize,
    /// Tuples already retired.
    pub l: usize,
    pub counted: u64,
    pub expected: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpTimingRow {
    pub n: usize,
    pub k: usize,
    pub p: usize,
    /// Median seconds per solve.
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingTable {
    pub greedy: Vec<GreedyCountRow>,
    pub lp: Vec<LpTimingRow>,
    /// Least-squares slope of log time against log P.
    pub lp_slope: Option<f64>,
    /// Largest time ratio between neighbouring rows, rescaled to a doubling of P.
    pub max_doubling_ratio: Option<f64>,
}

impl ScalingTable {
    pub fn greedy_counts_match(&self) -> bool {
        self.greedy.iter().all(|r| r.counted == r.expected)
    }

    pub fn polynomial(&self) -> bool {
        self.lp_slope.is_some_and(|s| s < 4.0) && self.max_doubling_ratio.is_some_and(|r| r < 16.0)
    }
}

/// Least-squares slope of `ln y` on `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn time_solve(lat: &Lattice, d: &CostFn, n_paths: usize) -> Result<f64> {
    // repeat fast solves so the clock resolution does not dominate
    let start = Instant::now();
    let mut runs = 0u32;
    while runs == 0 || start.elapsed() < Duration::from_millis(20) {
        track_lp(lat, d, f64::INFINITY, n_paths)?;
        runs += 1;
    }
    Ok(start.elapsed().as_secs_f64() / runs as f64)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

pub fn scaling_benchmark(cfg: &ScalingConfig) -> Result<ScalingTable> {
    if cfg.trials == 0 || cfg.lp_n < cfg.lp_paths || cfg.greedy_k.iter().any(|&k| k < 1) {
        return invalid("scaling config needs trials >= 1, lp_n >= lp_paths and spans >= 1");
    }
    let mut greedy = Vec::new();
    for &n in &cfg.greedy_n {
        for &k in &cfg.greedy_k {
            let (lat, d) = random_table_instance(&vec![n; k], cfg.seed ^ ((n * 31 + k) as u64));
            let sel = greedy_tuples_with(&lat, &d, n, f64::INFINITY, 0, k, SearchMode::Exhaustive)?;
            for (l, &counted) in sel.candidates.iter().enumerate() {
                greedy.push(GreedyCountRow { n, k, l, counted, expected: ((n - l) as u64).pow(k as u32) });
            }
        }
    }

    let mut lp = Vec::new();
    for &k in &cfg.lp_k {
        let sizes = vec![cfg.lp_n; k];
        let times = (0..cfg.trials)
            .map(|t| {
                let (lat, d) = random_table_instance(&sizes, cfg.seed.wrapping_add((k * 1000 + t) as u64));
                time_solve(&lat, &d, cfg.lp_paths)
            })
            .collect::<Result<Vec<_>>>()?;
        lp.push(LpTimingRow {
            n: cfg.lp_n,
            k,
            p: cfg.lp_n * cfg.lp_n * k.saturating_sub(1),
            seconds: median(times),
        });
    }
    let lp_slope = loglog_slope(&lp.iter().map(|r| (r.p as f64, r.seconds)).collect::<Vec<_>>());
    let max_doubling_ratio = lp
        .windows(2)
        .filter(|w| w[1].p > w[0].p && w[0].p > 0)
        .map(|w| (w[1].seconds / w[0].seconds).powf(2f64.ln() / (w[1].p as f64 / w[0].p as f64).ln()))
        .reduce(f64::max);
    Ok(ScalingTable { greedy, lp, lp_slope, max_doubling_ratio })
}
