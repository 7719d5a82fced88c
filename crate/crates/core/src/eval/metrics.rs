use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::analysis::{Lattice, StftConfig};
use crate::paths::PathSet;
use crate::signal::ChirpSpec;

/// Known chirp frequencies at every frame center.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    /// `freqs[q][k]` in Hz.
    pub freqs: Vec<Vec<f64>>,
}

impl GroundTruth {
    pub fn new(chirps: &[ChirpSpec], stft: &StftConfig, n_frames: usize) -> Self {
        let freqs = chirps
            .iter()
            .map(|c| {
                (0..n_frames)
                    .map(|k| c.omega_at(stft.frame_center(k)) * stft.fs / TAU)
                    .collect()
            })
            .collect();
        Self { freqs }
    }

    pub fn n_chirps(&self) -> usize {
        self.freqs.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathMetrics {
    pub chirp: usize,
    pub n_nodes: usize,
    pub mean_err_hz: f64,
    pub max_err_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodMetrics {
    pub paths: Vec<PathMetrics>,
    /// Fraction of frames where some path node lies within tolerance of each
    /// chirp. Two chirps closer than the tolerance can share one node.
    pub coverage: Vec<f64>,
    /// Mean absolute error over every node of every path; `None` when no
    /// paths were returned.
    pub mean_err_hz: Option<f64>,
    pub max_err_hz: Option<f64>,
    /// Paths spanning every frame.
    pub full_span_paths: usize,
    /// The tracker could not route the requested paths.
    pub infeasible: bool,
}

/// Node frequencies and frames of one path.
fn path_points(path: &[usize], lat: &Lattice, fs: f64) -> Vec<(usize, f64)> {
    path.iter()
        .map(|&m| {
            let a = lat.atom(m);
            (a.frame, a.freq_hz(fs))
        })
        .collect()
}

/// Chirp with the smallest mean absolute frequency distance to the path
/// (lowest index on ties).
pub fn associate(points: &[(usize, f64)], truth: &GroundTruth) -> usize {
    let mean_err = |q: usize| {
        points.iter().map(|&(k, f)| (f - truth.freqs[q][k]).abs()).sum::<f64>() / points.len() as f64
    };
    (0..truth.n_chirps())
        .min_by(|&a, &b| mean_err(a).total_cmp(&mean_err(b)))
        .unwrap_or(0)
}

pub fn method_metrics(paths: &PathSet, lat: &Lattice, truth: &GroundTruth, fs: f64, tolerance_hz: f64) -> MethodMetrics {
    let n_frames = lat.n_frames();
    let mut covered = vec![vec![false; n_frames]; truth.n_chirps()];
    let mut per_path = Vec::with_capacity(paths.len());
    let mut all_errs = Vec::new();
    for path in &paths.paths {
        let pts = path_points(path, lat, fs);
        if pts.is_empty() {
            continue;
        }
        let q = associate(&pts, truth);
        let errs: Vec<f64> = pts.iter().map(|&(k, f)| (f - truth.freqs[q][k]).abs()).collect();
        for &(k, f) in &pts {
            for (c, freqs) in covered.iter_mut().zip(&truth.freqs) {
                if (f - freqs[k]).abs() <= tolerance_hz {
                    c[k] = true;
                }
            }
        }
        per_path.push(PathMetrics {
            chirp: q,
            n_nodes: pts.len(),
            mean_err_hz: errs.iter().sum::<f64>() / errs.len() as f64,
            max_err_hz: errs.iter().cloned().fold(0.0, f64::max),
        });
        all_errs.extend(errs);
    }
    let coverage = covered
        .iter()
        .map(|c| {
            if n_frames == 0 {
                0.0
            } else {
                c.iter().filter(|x| **x).count() as f64 / n_frames as f64
            }
        })
        .collect();
    MethodMetrics {
        full_span_paths: paths.paths.iter().filter(|p| p.len() == n_frames && n_frames > 0).count(),
        paths: per_path,
        coverage,
        mean_err_hz: (!all_errs.is_empty()).then(|| all_errs.iter().sum::<f64>() / all_errs.len() as f64),
        max_err_hz: all_errs.iter().cloned().reduce(f64::max),
        infeasible: false,
    }
}
