//! Spectral analysis: STFT, banded peak picking and chirp parameter
//! estimation, producing the node lattice consumed by the trackers.

mod ddm;
mod dump;
mod peaks;
mod stft;

pub use ddm::{ddm_estimate, DdmAnalyzer, DdmFrame, Rejection};
pub use dump::{read_atoms, write_atoms, AtomDump, AtomFormat, AtomRecord};
pub use peaks::pick_peaks;
pub use stft::{frame_count, stft, Spectrogram};

use std::f64::consts::TAU;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::par;
use crate::signal::SignalBuffer;
use crate::window::{CosineSumWindow, NUTTALL_C1};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StftConfig {
    pub win_len: usize,
    pub hop: usize,
    pub fft_len: usize,
    pub fs: f64,
}

impl Default for StftConfig {
    fn default() -> Self {
        Self {
            win_len: 2048,
            hop: 512,
            fft_len: 2048,
            fs: 16000.0,
        }
    }
}

impl StftConfig {
    pub fn validate(&self) -> Result<()> {
        if self.win_len < 4 || self.hop == 0 || self.hop > self.win_len {
            return invalid(format!(
                "need 0 < hop <= win_len and win_len >= 4, got hop {} win_len {}",
                self.hop, self.win_len
            ));
        }
        if self.fft_len < self.win_len {
            return invalid(format!("fft_len {} < win_len {}", self.fft_len, self.win_len));
        }
        if !(self.fs > 0.0) {
            return invalid(format!("sample rate must be positive, got {}", self.fs));
        }
        Ok(())
    }

    /// Number of retained (non-negative frequency) bins.
    pub fn n_bins(&self) -> usize {
        self.fft_len / 2 + 1
    }

    pub fn bin_hz(&self) -> f64 {
        self.fs / self.fft_len as f64
    }

    /// Sample index of the center of frame `k`.
    pub fn frame_center(&self, k: usize) -> f64 {
        (k * self.hop) as f64 + self.win_len as f64 / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PeakPickConfig {
    pub band_width: f64,
    pub band_spacing: f64,
    pub f_min: f64,
    pub f_max: f64,
    /// Peaks more than this many dB below the strongest bin of the row are
    /// dropped. Keeps window sidelobes of clean signals out of the lattice.
    pub floor_db: f64,
}

impl Default for PeakPickConfig {
    fn default() -> Self {
        Self {
            band_width: 100.0,
            band_spacing: 50.0,
            f_min: 250.0,
            f_max: 2000.0,
            floor_db: 80.0,
        }
    }
}

impl PeakPickConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.band_spacing > 0.0 && self.band_spacing <= self.band_width) {
            return invalid(format!(
                "need 0 < band_spacing <= band_width, got {} / {}",
                self.band_spacing, self.band_width
            ));
        }
        if !(self.f_min >= 0.0 && self.f_min < self.f_max) {
            return invalid(format!("need 0 <= f_min < f_max, got {} / {}", self.f_min, self.f_max));
        }
        if self.floor_db.is_nan() || self.floor_db < 0.0 {
            return invalid(format!("floor_db must be >= 0, got {}", self.floor_db));
        }
        Ok(())
    }
}

/// Everything the analysis stage needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisConfig {
    pub stft: StftConfig,
    pub peaks: PeakPickConfig,
    pub window_coeffs: [f64; 4],
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            stft: StftConfig::default(),
            peaks: PeakPickConfig::default(),
            window_coeffs: NUTTALL_C1,
        }
    }
}

impl AnalysisConfig {
    pub fn window(&self) -> Result<CosineSumWindow> {
        CosineSumWindow::new(self.window_coeffs, self.stft.win_len)
    }

    pub fn validate(&self) -> Result<()> {
        self.stft.validate()?;
        self.peaks.validate()?;
        self.window().map(|_| ())
    }
}

/// Chirp parameters estimated at one spectral peak.
///
/// `phi` and `omega` refer to the center of the analysis frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpAtom {
    pub frame: usize,
    pub phi: f64,
    /// rad/sample
    pub omega: f64,
    /// rad/sample^2
    pub psi: f64,
    pub power: f64,
    pub bin: usize,
}

impl ChirpAtom {
    pub fn freq_hz(&self, fs: f64) -> f64 {
        self.omega * fs / TAU
    }
}

/// Frames of atoms with a frame-major global node index.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Lattice {
    frames: Vec<Vec<ChirpAtom>>,
    offsets: Vec<usize>,
}

impl Lattice {
    /// Builds a lattice; each atom's `frame` field is set to its frame index.
    pub fn from_frames(mut frames: Vec<Vec<ChirpAtom>>) -> Self {
        let mut offsets = Vec::with_capacity(frames.len() + 1);
        let mut total = 0;
        for (k, frame) in frames.iter_mut().enumerate() {
            offsets.push(total);
            total += frame.len();
            for a in frame.iter_mut() {
                a.frame = k;
            }
        }
        offsets.push(total);
        Self { frames, offsets }
    }

    /// Lattice of dummy atoms with the given frame sizes, for use with
    /// table-driven cost functions.
    pub fn placeholder(sizes: &[usize]) -> Self {
        let frames = sizes
            .iter()
            .map(|&n| {
                (0..n)
                    .map(|i| ChirpAtom {
                        frame: 0,
                        phi: 0.0,
                        omega: 0.01 * (i + 1) as f64,
                        psi: 0.0,
                        power: 1.0,
                        bin: i,
                    })
                    .collect()
            })
            .collect();
        Self::from_frames(frames)
    }

    pub fn n_frames(&self) -> usize {
        self.frames.len()
    }

    /// Total node count `M`.
    pub fn n_nodes(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    pub fn frames(&self) -> &[Vec<ChirpAtom>] {
        &self.frames
    }

    pub fn frame(&self, k: usize) -> &[ChirpAtom] {
        &self.frames[k]
    }

    pub fn frame_len(&self, k: usize) -> usize {
        self.frames[k].len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.frames.iter().map(Vec::len).collect()
    }

    pub fn max_frame_len(&self) -> usize {
        self.frames.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Global indices of the nodes in frame `k`.
    pub fn frame_range(&self, k: usize) -> Range<usize> {
        self.offsets[k]..self.offsets[k + 1]
    }

    pub fn global(&self, k: usize, i: usize) -> usize {
        debug_assert!(i < self.frames[k].len());
        self.offsets[k] + i
    }

    /// `(frame, index within frame)` of global node `m`.
    pub fn locate(&self, m: usize) -> (usize, usize) {
        assert!(m < self.n_nodes(), "node {m} out of range");
        // last frame starting at or before m; empty frames share its offset
        let k = self.offsets.partition_point(|&o| o <= m) - 1;
        (k, m - self.offsets[k])
    }

    pub fn frame_of(&self, m: usize) -> usize {
        self.locate(m).0
    }

    pub fn atom(&self, m: usize) -> &ChirpAtom {
        let (k, i) = self.locate(m);
        &self.frames[k][i]
    }
}

/// Runs STFT, peak picking and chirp estimation over every frame.
pub fn analyze(signal: &SignalBuffer, cfg: &AnalysisConfig) -> Result<Lattice> {
    cfg.validate()?;
    if signal.fs != cfg.stft.fs {
        return invalid(format!(
            "signal sample rate {} differs from configured {}",
            signal.fs, cfg.stft.fs
        ));
    }
    let n_frames = frame_count(signal.len(), &cfg.stft)?;
    let analyzer = DdmAnalyzer::new(&cfg.stft, &cfg.window()?);
    let omega_lo = TAU * cfg.peaks.f_min / cfg.stft.fs;
    let omega_hi = TAU * cfg.peaks.f_max / cfg.stft.fs;

    let frames = par::map_range(n_frames, |k| {
        let start = k * cfg.stft.hop;
        let segment = &signal.samples[start..start + cfg.stft.win_len];
        let frame = analyzer.frame(segment);
        let mags: Vec<f64> = frame.spectrum().iter().map(|z| z.norm()).collect();
        pick_peaks(&mags, &cfg.peaks, cfg.stft.fs, cfg.stft.fft_len)
            .into_iter()
            .filter_map(|bin| analyzer.estimate(&frame, bin, k).ok())
            .filter(|a| a.omega >= omega_lo && a.omega <= omega_hi)
            .collect::<Vec<_>>()
    });
    Ok(Lattice::from_frames(frames))
}
