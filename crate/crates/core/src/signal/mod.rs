//! Chirp synthesis and calibrated noise.

mod io;

pub use io::{read_raw_f64, read_wav, write_raw_f64, write_wav, RawHeader, WavFormat};

use std::f64::consts::{PI, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Constant-amplitude linear chirp `exp(j(phi + omega n + psi n^2 / 2))`.
///
/// `omega` is in rad/sample, `psi` in rad/sample^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpSpec {
    pub phi: f64,
    pub omega: f64,
    pub psi: f64,
}

impl ChirpSpec {
    pub fn new(phi: f64, omega: f64, psi: f64) -> Self {
        Self { phi, omega, psi }
    }

    /// Chirp ramping linearly from `nu0` Hz to `nu1` Hz over `n_samples`.
    pub fn from_frequencies(phi: f64, nu0: f64, nu1: f64, fs: f64, n_samples: usize) -> Self {
        let omega0 = TAU * nu0 / fs;
        let omega1 = TAU * nu1 / fs;
        Self {
            phi,
            omega: omega0,
            psi: (omega1 - omega0) / n_samples as f64,
        }
    }

    /// Initial frequency in Hz.
    pub fn nu0(&self, fs: f64) -> f64 {
        self.omega * fs / TAU
    }

    /// Frequency in Hz reached after `n_samples`.
    pub fn nu1(&self, fs: f64, n_samples: usize) -> f64 {
        (self.omega + self.psi * n_samples as f64) * fs / TAU
    }

    /// Instantaneous frequency in rad/sample at (possibly fractional) sample `n`.
    pub fn omega_at(&self, n: f64) -> f64 {
        self.omega + self.psi * n
    }

    pub fn phase_at(&self, n: f64) -> f64 {
        self.phi + self.omega * n + 0.5 * self.psi * n * n
    }

    /// Checks that the sweep stays in `[0, pi)` for `n_samples` samples.
    pub fn validate(&self, n_samples: usize) -> Result<()> {
        let last = self.omega_at(n_samples.saturating_sub(1) as f64);
        for (what, w) in [("initial", self.omega), ("final", last)] {
            if !w.is_finite() || !(0.0..PI).contains(&w) {
                return invalid(format!(
                    "{what} frequency {w} rad/sample outside [0, pi) for {n_samples} samples"
                ));
            }
        }
        Ok(())
    }
}

/// Mono sample buffer. Complex signals carry a second (imaginary) channel.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalBuffer {
    pub samples: Vec<f64>,
    pub imag: Option<Vec<f64>>,
    pub fs: f64,
}

impl SignalBuffer {
    pub fn new(samples: Vec<f64>, fs: f64) -> Self {
        Self {
            samples,
            imag: None,
            fs,
        }
    }

    pub fn zeros(len: usize, fs: f64) -> Self {
        Self::new(vec![0.0; len], fs)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.len() as f64 / self.fs
    }

    pub fn is_complex(&self) -> bool {
        self.imag.is_some()
    }

    /// Mean of `|s|^2` over all samples.
    pub fn power(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let re: f64 = self.samples.iter().map(|x| x * x).sum();
        let im: f64 = self
            .imag
            .as_ref()
            .map_or(0.0, |v| v.iter().map(|x| x * x).sum());
        (re + im) / self.len() as f64
    }

    pub fn scaled(&self, gain: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|x| x * gain).collect(),
            imag: self
                .imag
                .as_ref()
                .map(|v| v.iter().map(|x| x * gain).collect()),
            fs: self.fs,
        }
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

/// Number of samples in `duration` seconds at `fs`.
pub fn n_samples_for(duration: f64, fs: f64) -> usize {
    (duration * fs).round() as usize
}

/// Samples `exp(j(phi + omega n + psi n^2 / 2))` for `n in 0..n_samples`.
///
/// With `real_part` only the real part is kept; otherwise the imaginary part
/// goes to the second channel.
pub fn synth_chirp(spec: &ChirpSpec, n_samples: usize, fs: f64, real_part: bool) -> Result<SignalBuffer> {
    if !(fs > 0.0) {
        return invalid(format!("sample rate must be positive, got {fs}"));
    }
    spec.validate(n_samples)?;
    let phases = (0..n_samples).map(|n| spec.phase_at(n as f64));
    if real_part {
        Ok(SignalBuffer::new(phases.map(f64::cos).collect(), fs))
    } else {
        let (re, im) = phases.map(|p| (p.cos(), p.sin())).unzip();
        Ok(SignalBuffer {
            samples: re,
            imag: Some(im),
            fs,
        })
    }
}

/// Elementwise sum of equally long buffers at one sample rate.
pub fn mix(signals: &[SignalBuffer]) -> Result<SignalBuffer> {
    let Some(first) = signals.first() else {
        return invalid("mix needs at least one signal");
    };
    let complex = first.is_complex();
    for s in &signals[1..] {
        if s.len() != first.len() {
            return invalid(format!("length mismatch: {} vs {}", s.len(), first.len()));
        }
        if s.fs != first.fs {
            return invalid(format!("sample rate mismatch: {} vs {}", s.fs, first.fs));
        }
        if s.is_complex() != complex {
            return invalid("cannot mix real and complex buffers");
        }
    }
    let mut out = first.clone();
    for s in &signals[1..] {
        for (o, x) in out.samples.iter_mut().zip(&s.samples) {
            *o += x;
        }
        if let (Some(oi), Some(si)) = (out.imag.as_mut(), s.imag.as_ref()) {
            for (o, x) in oi.iter_mut().zip(si) {
                *o += x;
            }
        }
    }
    Ok(out)
}

/// Adds white Gaussian noise at `snr_db` relative to the measured signal power.
///
/// Noise comes from a ChaCha8 generator seeded with `seed`, so output is
/// reproducible across runs and platforms. `snr_db = +inf` returns the input
/// unchanged. Complex buffers receive circular noise split evenly between
/// the two channels.
pub fn add_noise(signal: &SignalBuffer, snr_db: f64, seed: u64) -> Result<SignalBuffer> {
    if snr_db == f64::INFINITY {
        return Ok(signal.clone());
    }
    if !snr_db.is_finite() {
        return invalid(format!("snr_db must be finite or +inf, got {snr_db}"));
    }
    let p_sig = signal.power();
    if p_sig == 0.0 {
        return invalid("SNR undefined for an all-zero signal");
    }
    let variance = p_sig * 10f64.powf(-snr_db / 10.0);
    let per_channel = if signal.is_complex() { variance / 2.0 } else { variance };
    let normal = Normal::new(0.0, per_channel.sqrt()).expect("finite positive std");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = signal.clone();
    for x in out.samples.iter_mut() {
        *x += normal.sample(&mut rng);
    }
    if let Some(im) = out.imag.as_mut() {
        for x in im.iter_mut() {
            *x += normal.sample(&mut rng);
        }
    }
    Ok(out)
}

/// SNR in dB of `noisy` measured against the known `clean` signal.
pub fn measured_snr_db(clean: &SignalBuffer, noisy: &SignalBuffer) -> f64 {
    let noise: f64 = clean
        .samples
        .iter()
        .zip(&noisy.samples)
        .map(|(c, n)| (n - c).powi(2))
        .sum::<f64>()
        / clean.len().max(1) as f64;
    10.0 * (clean.power() / noise).log10()
}
