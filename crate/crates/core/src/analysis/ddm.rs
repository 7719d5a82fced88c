//! Distribution Derivative Method for local chirp parameters.
//!
//! For a frame modelled as `x(t) = exp(c0 + c1 t + c2 t^2)`, integration by
//! parts against a test atom `a(t)` that vanishes at the frame edges gives
//!
//! ```text
//! c1 <x, a> + 2 c2 <x, t a> = -<x, a'>
//! ```
//!
//! Using the three Fourier atoms `w(t) e^{j w_b t}` at the peak bin and its
//! neighbours yields an over-determined 3x2 complex system, solved in the
//! least-squares sense. Frequency is `Im(c1)` and chirp rate `2 Im(c2)`.
//! Time `t` is measured from the frame center.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use nalgebra::{Matrix3x2, Vector3};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{ChirpAtom, StftConfig};
use crate::window::CosineSumWindow;

/// Largest accepted condition number of the column-equilibrated system.
pub const MAX_CONDITION: f64 = 1e8;

/// Why an atom could not be estimated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rejection {
    BinOutOfRange(usize),
    IllConditioned(f64),
    NonFinite,
    FrequencyOutOfRange(f64),
}

/// Per-frame spectra shared by every peak in the frame.
#[derive(Debug, Clone)]
pub struct DdmFrame {
    /// FFT of `x w` with time origin at the frame start (plain STFT bins).
    spec_w: Vec<Complex64>,
    /// FFT of `x (n - c) w`.
    spec_tw: Vec<Complex64>,
    /// FFT of `x w'`.
    spec_dw: Vec<Complex64>,
}

impl DdmFrame {
    /// Ordinary STFT bins `0..=fft_len/2` of this frame.
    pub fn spectrum(&self) -> &[Complex64] {
        &self.spec_w
    }
}

/// Precomputed window tables and FFT plan.
pub struct DdmAnalyzer {
    fft: Arc<dyn Fft<f64>>,
    fft_len: usize,
    center: f64,
    w: Vec<f64>,
    tw: Vec<f64>,
    dw: Vec<f64>,
    t: Vec<f64>,
}

impl DdmAnalyzer {
    pub fn new(cfg: &StftConfig, window: &CosineSumWindow) -> Self {
        assert_eq!(window.len, cfg.win_len, "window length must equal win_len");
        let center = cfg.win_len as f64 / 2.0;
        let w = window.values();
        let t: Vec<f64> = (0..cfg.win_len).map(|n| n as f64 - center).collect();
        let tw = t.iter().zip(&w).map(|(t, w)| t * w).collect();
        Self {
            fft: FftPlanner::<f64>::new().plan_fft_forward(cfg.fft_len),
            fft_len: cfg.fft_len,
            center,
            dw: window.derivative(),
            tw,
            w,
            t,
        }
    }

    fn transform(&self, segment: &[f64], weights: &[f64]) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.fft_len];
        for ((b, x), g) in buf.iter_mut().zip(segment).zip(weights) {
            b.re = x * g;
        }
        self.fft.process(&mut buf);
        buf.truncate(self.fft_len / 2 + 1);
        buf
    }

    pub fn frame(&self, segment: &[f64]) -> DdmFrame {
        assert_eq!(segment.len(), self.w.len(), "segment must span one window");
        DdmFrame {
            spec_w: self.transform(segment, &self.w),
            spec_tw: self.transform(segment, &self.tw),
            spec_dw: self.transform(segment, &self.dw),
        }
    }

    fn bin_omega(&self, bin: usize) -> f64 {
        TAU * bin as f64 / self.fft_len as f64
    }

    /// Moves the time origin of an FFT bin from the frame start to its center.
    fn centered(&self, z: Complex64, bin: usize) -> Complex64 {
        z * Complex64::from_polar(1.0, self.bin_omega(bin) * self.center)
    }

    /// Estimates the atom at `peak_bin` of frame `frame_index`.
    pub fn estimate(&self, frame: &DdmFrame, peak_bin: usize, frame_index: usize) -> Result<ChirpAtom, Rejection> {
        let n_bins = frame.spec_w.len();
        if peak_bin == 0 || peak_bin + 1 >= n_bins {
            return Err(Rejection::BinOutOfRange(peak_bin));
        }
        let mut a = Matrix3x2::<Complex64>::zeros();
        let mut rhs = Vector3::<Complex64>::zeros();
        for (row, bin) in (peak_bin - 1..=peak_bin + 1).enumerate() {
            let om = self.bin_omega(bin);
            let xw = self.centered(frame.spec_w[bin], bin);
            let xtw = self.centered(frame.spec_tw[bin], bin);
            let xdw = self.centered(frame.spec_dw[bin], bin);
            a[(row, 0)] = xw;
            a[(row, 1)] = 2.0 * xtw;
            // <x, a'> with a' = (w' + j om w) e^{j om t}
            rhs[row] = -(xdw - Complex64::new(0.0, om) * xw);
        }

        let norms = [a.column(0).norm(), a.column(1).norm()];
        if !(norms[0] > 0.0 && norms[1] > 0.0) || !norms.iter().all(|n| n.is_finite()) {
            return Err(Rejection::IllConditioned(f64::INFINITY));
        }
        let mut scaled = a;
        for (j, n) in norms.iter().enumerate() {
            scaled.column_mut(j).unscale_mut(*n);
        }
        let svd = scaled.svd(true, true);
        let (smax, smin) = (svd.singular_values.max(), svd.singular_values.min());
        let cond = smax / smin;
        if !(cond <= MAX_CONDITION) {
            return Err(Rejection::IllConditioned(cond));
        }
        let sol = svd.solve(&rhs, 0.0).map_err(|_| Rejection::IllConditioned(cond))?;
        let c1 = sol[0] / norms[0];
        let c2 = sol[1] / norms[1];
        let omega = c1.im;
        let psi = 2.0 * c2.im;
        if !omega.is_finite() || !psi.is_finite() {
            return Err(Rejection::NonFinite);
        }
        if !(omega > 0.0 && omega < PI) {
            return Err(Rejection::FrequencyOutOfRange(omega));
        }

        // c0 = log(<x, a_peak> / <exp(c1 t + c2 t^2), a_peak>)
        let om = self.bin_omega(peak_bin);
        let model: Complex64 = self
            .t
            .iter()
            .zip(&self.w)
            .map(|(&t, &w)| (c1 * t + c2 * t * t - Complex64::new(0.0, om * t)).exp() * w)
            .sum();
        let c0 = (self.centered(frame.spec_w[peak_bin], peak_bin) / model).ln();
        if !c0.im.is_finite() {
            return Err(Rejection::NonFinite);
        }

        Ok(ChirpAtom {
            frame: frame_index,
            phi: c0.im,
            omega,
            psi,
            power: frame.spec_w[peak_bin].norm_sqr(),
            bin: peak_bin,
        })
    }
}

/// One-shot estimate from a raw (unwindowed) `win_len`-sample segment.
pub fn ddm_estimate(
    segment: &[f64],
    peak_bin: usize,
    cfg: &StftConfig,
    w: &CosineSumWindow,
    frame_index: usize,
) -> Result<ChirpAtom, Rejection> {
    let analyzer = DdmAnalyzer::new(cfg, w);
    analyzer.estimate(&analyzer.frame(segment), peak_bin, frame_index)
}
