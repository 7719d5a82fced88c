use std::path::Path;

use clap::{Args, ValueEnum};
use ptrack::eval::{ExperimentConfig, ScalingConfig};
use ptrack::signal::WavFormat;
use ptrack::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Greedy,
    Lp,
    Both,
}

impl Method {
    pub fn greedy(self) -> bool {
        matches!(self, Method::Greedy | Method::Both)
    }

    pub fn lp(self) -> bool {
        matches!(self, Method::Lp | Method::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SampleFormat {
    Pcm16,
    Float32,
}

impl From<SampleFormat> for WavFormat {
    fn from(f: SampleFormat) -> Self {
        match f {
            SampleFormat::Pcm16 => WavFormat::Pcm16,
            SampleFormat::Float32 => WavFormat::Float32,
        }
    }
}

/// Everything a run needs, as stored in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub experiment: ExperimentConfig,
    pub scaling: ScalingConfig,
    pub method: Method,
    /// Noise added by `synth`; absent means a clean signal.
    pub synth_snr_db: Option<f64>,
    pub wav_format: SampleFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            experiment: ExperimentConfig::default(),
            scaling: ScalingConfig::default(),
            method: Method::Both,
            synth_snr_db: None,
            wav_format: SampleFormat::Float32,
        }
    }
}

/// Options shared by every subcommand. Anything given here wins over the
/// config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON config file; missing fields take their defaults.
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub fs: Option<f64>,
    #[arg(long, global = true)]
    pub duration: Option<f64>,
    #[arg(long, global = true)]
    pub win_len: Option<usize>,
    #[arg(long, global = true)]
    pub hop: Option<usize>,
    #[arg(long, global = true)]
    pub fft_len: Option<usize>,
    #[arg(long, global = true)]
    pub f_min: Option<f64>,
    #[arg(long, global = true)]
    pub f_max: Option<f64>,
    #[arg(long, global = true)]
    pub delta_mq: Option<f64>,
    #[arg(long, global = true)]
    pub delta_lp: Option<f64>,
    /// Number of paths L.
    #[arg(long, global = true)]
    pub n_paths: Option<usize>,
    #[arg(long, global = true)]
    pub k_mq: Option<usize>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true)]
    pub tolerance_hz: Option<f64>,
    /// Comma-separated SNR list in dB for eval and plot.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub snr_list: Option<Vec<f64>>,
    #[arg(long, global = true, value_enum)]
    pub method: Option<Method>,
}

pub fn load(o: &Overrides) -> Result<RunConfig> {
    let mut cfg = match &o.config {
        Some(p) => read(p)?,
        None => RunConfig::default(),
    };
    let e = &mut cfg.experiment;
    let set = |dst: &mut f64, v: Option<f64>| {
        if let Some(v) = v {
            *dst = v;
        }
    };
    if let Some(fs) = o.fs {
        e.fs = fs;
        e.analysis.stft.fs = fs;
    }
    set(&mut e.duration, o.duration);
    set(&mut e.analysis.peaks.f_min, o.f_min);
    set(&mut e.analysis.peaks.f_max, o.f_max);
    set(&mut e.delta_mq, o.delta_mq);
    set(&mut e.delta_lp, o.delta_lp);
    set(&mut e.tolerance_hz, o.tolerance_hz);
    if let Some(v) = o.seed {
        e.seed = v;
        cfg.scaling.seed = v;
    }
    if let Some(v) = o.win_len {
        e.analysis.stft.win_len = v;
    }
    if let Some(v) = o.hop {
        e.analysis.stft.hop = v;
    }
    if let Some(v) = o.fft_len {
        e.analysis.stft.fft_len = v;
    }
    if let Some(v) = o.n_paths {
        e.n_paths = v;
    }
    if let Some(v) = o.k_mq {
        e.k_mq = v;
    }
    if let Some(v) = o.trials {
        e.trials = v;
    }
    if let Some(v) = &o.snr_list {
        e.snr_list = v.clone();
    }
    if let Some(m) = o.method {
        cfg.method = m;
    }
    cfg.experiment.validate()?;
    Ok(cfg)
}

fn read(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("config {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, r#"{"experiment": {"seed": 5, "trials": 2}, "method": "lp"}"#).unwrap();
        let o = Overrides {
            config: Some(p),
            seed: Some(9),
            ..Default::default()
        };
        let cfg = load(&o).unwrap();
        assert_eq!(cfg.experiment.seed, 9);
        assert_eq!(cfg.experiment.trials, 2);
        assert_eq!(cfg.method, Method::Lp);
        assert_eq!(cfg.experiment.n_paths, 3);
    }

    #[test]
    fn defaults_round_trip() {
        let cfg = RunConfig::default();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), cfg);
    }

    #[test]
    fn invalid_values_are_rejected() {
        let o = Overrides {
            hop: Some(4096),
            ..Default::default()
        };
        assert!(matches!(load(&o), Err(Error::InvalidInput(_))));
    }
}
