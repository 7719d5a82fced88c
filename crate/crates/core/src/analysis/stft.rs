use num_complex::Complex64;
use rustfft::FftPlanner;

use super::StftConfig;
use crate::error::{invalid, Result};
use crate::par;
use crate::signal::SignalBuffer;
use crate::window::CosineSumWindow;

/// Complex spectrogram; `frames[k][b]` is bin `b` of frame `k`.
#[derive(Debug, Clone)]
pub struct Spectrogram {
    pub frames: Vec<Vec<Complex64>>,
    pub cfg: StftConfig,
}

impl Spectrogram {
    pub fn n_frames(&self) -> usize {
        self.frames.len()
    }

    pub fn magnitudes(&self, k: usize) -> Vec<f64> {
        self.frames[k].iter().map(|z| z.norm()).collect()
    }
}

/// `floor((len - win_len) / hop) + 1`, or an error if no full frame fits.
pub fn frame_count(len: usize, cfg: &StftConfig) -> Result<usize> {
    if len < cfg.win_len {
        return invalid(format!(
            "signal of {len} samples is shorter than one {}-sample window",
            cfg.win_len
        ));
    }
    Ok((len - cfg.win_len) / cfg.hop + 1)
}

/// Windowed FFT of frames starting every `hop` samples. Bins `0..=fft_len/2`
/// are kept; the window is zero-padded to `fft_len`.
pub fn stft(signal: &SignalBuffer, cfg: &StftConfig, w: &CosineSumWindow) -> Result<Spectrogram> {
    cfg.validate()?;
    if w.len != cfg.win_len {
        return invalid(format!("window length {} != win_len {}", w.len, cfg.win_len));
    }
    let n_frames = frame_count(signal.len(), cfg)?;
    let fft = FftPlanner::<f64>::new().plan_fft_forward(cfg.fft_len);
    let wv = w.values();
    let frames = par::map_range(n_frames, |k| {
        let seg = &signal.samples[k * cfg.hop..k * cfg.hop + cfg.win_len];
        let mut buf = vec![Complex64::new(0.0, 0.0); cfg.fft_len];
        for ((b, x), wn) in buf.iter_mut().zip(seg).zip(&wv) {
            b.re = x * wn;
        }
        fft.process(&mut buf);
        buf.truncate(cfg.n_bins());
        buf
    });
    Ok(Spectrogram { frames, cfg: *cfg })
}
