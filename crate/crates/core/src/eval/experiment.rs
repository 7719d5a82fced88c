use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::metrics::{method_metrics, GroundTruth, MethodMetrics};
use crate::analysis::{analyze, AnalysisConfig, Lattice};
use crate::error::{invalid, Error, Result};
use crate::greedy::chain_short_paths;
use crate::lattice::CostFn;
use crate::lpsolve::track_lp;
use crate::par;
use crate::paths::{PathSet, TrackMethod};
use crate::signal::{add_noise, mix, n_samples_for, synth_chirp, ChirpSpec, SignalBuffer};

pub const METRICS_SCHEMA_VERSION: u32 = 1;

/// One linear chirp given by its start and end frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpTrack {
    pub nu0: f64,
    pub nu1: f64,
    #[serde(default)]
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    /// Test chirps. The defaults are illustrative, not reference values.
    pub chirps: Vec<ChirpTrack>,
    pub fs: f64,
    pub duration: f64,
    pub snr_list: Vec<f64>,
    pub analysis: AnalysisConfig,
    pub delta_mq: f64,
    pub delta_lp: f64,
    pub n_paths: usize,
    pub k_mq: usize,
    pub trials: usize,
    pub seed: u64,
    /// Match tolerance for coverage, Hz.
    pub tolerance_hz: f64,
    /// Wall-clock timings make the report non-reproducible, so they are opt-in.
    pub record_timings: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            chirps: vec![
                ChirpTrack { nu0: 400.0, nu1: 1200.0, phi: 0.0 },
                ChirpTrack { nu0: 1200.0, nu1: 400.0, phi: 0.0 },
                ChirpTrack { nu0: 800.0, nu1: 1800.0, phi: 0.0 },
            ],
            fs: 16000.0,
            duration: 1.0,
            snr_list: vec![0.0, -6.0, -12.0],
            analysis: AnalysisConfig::default(),
            delta_mq: 0.1,
            delta_lp: 0.1,
            n_paths: 3,
            k_mq: 3,
            trials: 5,
            seed: 1,
            tolerance_hz: 20.0,
            record_timings: false,
        }
    }
}

impl ExperimentConfig {
    pub fn n_samples(&self) -> usize {
        n_samples_for(self.duration, self.fs)
    }

    pub fn chirp_specs(&self) -> Vec<ChirpSpec> {
        let n = self.n_samples();
        self.chirps
            .iter()
            .map(|c| ChirpSpec::from_frequencies(c.phi, c.nu0, c.nu1, self.fs, n))
            .collect()
    }

    pub fn cost_fn(&self) -> CostFn {
        CostFn::PredictionError {
            hop: self.analysis.stft.hop as f64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.analysis.validate()?;
        if self.fs != self.analysis.stft.fs {
            return invalid(format!("fs {} differs from analysis fs {}", self.fs, self.analysis.stft.fs));
        }
        if self.chirps.is_empty() {
            return invalid("at least one chirp is required");
        }
        let (lo, hi) = (self.analysis.peaks.f_min, self.analysis.peaks.f_max);
        for c in &self.chirps {
            // linear sweeps: checking the end points covers every t
            if [c.nu0, c.nu1].iter().any(|f| *f < lo || *f > hi) {
                return invalid(format!("chirp {}->{} Hz leaves the search band [{lo}, {hi}]", c.nu0, c.nu1));
            }
        }
        for s in self.chirp_specs() {
            s.validate(self.n_samples())?;
        }
        if self.n_paths == 0 || self.k_mq < 2 || self.trials == 0 {
            return invalid("need n_paths >= 1, k_mq >= 2 and trials >= 1");
        }
        if self.snr_list.iter().any(|s| s.is_nan()) {
            return invalid("SNR values must be numbers");
        }
        Ok(())
    }

    /// Clean mixture of the configured chirps.
    pub fn clean_signal(&self) -> Result<SignalBuffer> {
        let n = self.n_samples();
        let parts = self
            .chirp_specs()
            .iter()
            .map(|s| synth_chirp(s, n, self.fs, true))
            .collect::<Result<Vec<_>>>()?;
        mix(&parts)
    }

    /// Seed for trial `trial` at SNR index `snr_index`.
    pub fn cell_seed(&self, snr_index: usize, trial: usize) -> u64 {
        self.seed
            .wrapping_mul(1_000_003)
            .wrapping_add((snr_index as u64) << 32)
            .wrapping_add(trial as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub analysis_s: f64,
    pub greedy_s: f64,
    pub lp_s: f64,
}

/// Everything produced for one (SNR, seed) run.
#[derive(Debug, Clone)]
pub struct CellResult {
    pub lattice: Lattice,
    pub lp: Option<PathSet>,
    pub greedy: PathSet,
    pub lp_metrics: MethodMetrics,
    pub greedy_metrics: MethodMetrics,
    pub timings: Timings,
}

/// Runs one realisation. `snr_db = None` means no noise.
pub fn run_cell(cfg: &ExperimentConfig, snr_db: Option<f64>, seed: u64) -> Result<CellResult> {
    let clean = cfg.clean_signal()?;
    let noisy = match snr_db {
        Some(s) => add_noise(&clean, s, seed)?,
        None => clean,
    };
    let t0 = Instant::now();
    let lattice = analyze(&noisy, &cfg.analysis)?;
    let t1 = Instant::now();
    let d = cfg.cost_fn();
    let greedy = chain_short_paths(&lattice, &d, cfg.n_paths, cfg.delta_mq, cfg.k_mq)?;
    let t2 = Instant::now();
    let lp = match track_lp(&lattice, &d, cfg.delta_lp, cfg.n_paths) {
        Ok(p) => Some(p),
        Err(Error::Infeasible { .. }) => None,
        Err(e) => return Err(e),
    };
    let t3 = Instant::now();

    let truth = GroundTruth::new(&cfg.chirp_specs(), &cfg.analysis.stft, lattice.n_frames());
    let score = |p: &PathSet| method_metrics(p, &lattice, &truth, cfg.fs, cfg.tolerance_hz);
    let lp_metrics = match &lp {
        Some(p) => score(p),
        None => MethodMetrics {
            infeasible: true,
            ..score(&PathSet::empty(TrackMethod::Lp))
        },
    };
    let greedy_metrics = score(&greedy);
    Ok(CellResult {
        timings: Timings {
            analysis_s: (t1 - t0).as_secs_f64(),
            greedy_s: (t2 - t1).as_secs_f64(),
            lp_s: (t3 - t2).as_secs_f64(),
        },
        lattice,
        lp,
        greedy,
        lp_metrics,
        greedy_metrics,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub seed: u64,
    pub n_nodes: usize,
    pub n_frames: usize,
    pub lp: MethodMetrics,
    pub greedy: MethodMetrics,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings: Option<Timings>,
}

/// Medians over trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub median_mean_err_hz: Option<f64>,
    pub median_coverage: Vec<f64>,
    /// Trials returning `n_paths` paths across every frame.
    pub full_span_trials: usize,
    pub infeasible_trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrReport {
    pub snr_db: f64,
    pub trials: Vec<TrialReport>,
    pub lp: MethodSummary,
    pub greedy: MethodSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub results: Vec<SnrReport>,
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

fn summarize(metrics: &[&MethodMetrics], n_chirps: usize, n_paths: usize) -> MethodSummary {
    MethodSummary {
        median_mean_err_hz: median(metrics.iter().filter_map(|m| m.mean_err_hz).collect()),
        median_coverage: (0..n_chirps)
            .map(|q| median(metrics.iter().map(|m| m.coverage[q]).collect()).unwrap_or(0.0))
            .collect(),
        full_span_trials: metrics.iter().filter(|m| m.full_span_paths >= n_paths).count(),
        infeasible_trials: metrics.iter().filter(|m| m.infeasible).count(),
    }
}

/// Runs every (SNR, trial) cell and summarises per SNR.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let cells: Vec<(usize, usize)> = (0..cfg.snr_list.len())
        .flat_map(|s| (0..cfg.trials).map(move |t| (s, t)))
        .collect();
    let outcomes = par::map_slice(&cells, |&(s, t)| {
        let seed = cfg.cell_seed(s, t);
        run_cell(cfg, Some(cfg.snr_list[s]), seed).map(|cell| TrialReport {
            seed,
            n_nodes: cell.lattice.n_nodes(),
            n_frames: cell.lattice.n_frames(),
            lp: cell.lp_metrics,
            greedy: cell.greedy_metrics,
            timings: cfg.record_timings.then_some(cell.timings),
        })
    });
    let mut trials = outcomes.into_iter().collect::<Result<Vec<_>>>()?.into_iter();
    let n_chirps = cfg.chirps.len();
    let results = cfg
        .snr_list
        .iter()
        .map(|&snr_db| {
            let trials: Vec<TrialReport> = trials.by_ref().take(cfg.trials).collect();
            let lp: Vec<&MethodMetrics> = trials.iter().map(|t| &t.lp).collect();
            let greedy: Vec<&MethodMetrics> = trials.iter().map(|t| &t.greedy).collect();
            SnrReport {
                snr_db,
                lp: summarize(&lp, n_chirps, cfg.n_paths),
                greedy: summarize(&greedy, n_chirps, cfg.n_paths),
                trials,
            }
        })
        .collect();
    Ok(ExperimentReport {
        schema_version: METRICS_SCHEMA_VERSION,
        config: cfg.clone(),
        results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn out_of_band_chirp_is_rejected() {
        let mut cfg = ExperimentConfig::default();
        cfg.chirps[0].nu1 = 2500.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn medians() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(vec![]), None);
    }

    #[test]
    fn seeds_differ_across_cells() {
        let cfg = ExperimentConfig::default();
        let mut seeds: Vec<u64> = (0..3).flat_map(|s| (0..5).map(move |t| (s, t))).map(|(s, t)| cfg.cell_seed(s, t)).collect();
        seeds.sort();
        seeds.dedup();
        assert_eq!(seeds.len(), 15);
    }
}
