use std::collections::BTreeSet;

use super::PeakPickConfig;

/// Banded local-maximum search over one magnitude row.
///
/// Bands start at `f_min` every `band_spacing` Hz and are `band_width` Hz wide
/// (clipped to `f_max`). In each band the strongest bin that is a strict
/// local maximum of the whole row is kept, unless it lies more than
/// `floor_db` below the row maximum. Bins found by overlapping bands are
/// reported once; output is ascending.
pub fn pick_peaks(mags: &[f64], cfg: &PeakPickConfig, fs: f64, fft_len: usize) -> Vec<usize> {
    let bin_hz = fs / fft_len as f64;
    let floor = mags.iter().copied().fold(0.0, f64::max) * 10f64.powf(-cfg.floor_db / 20.0);
    let is_peak = |b: usize| mags[b] >= floor && b > 0 && b + 1 < mags.len() && mags[b] > mags[b - 1] && mags[b] > mags[b + 1];

    let mut found = BTreeSet::new();
    let mut lo = cfg.f_min;
    while lo < cfg.f_max {
        let hi = (lo + cfg.band_width).min(cfg.f_max);
        let first = (lo / bin_hz).ceil() as usize;
        let best = (first..mags.len())
            .take_while(|&b| {
                let f = b as f64 * bin_hz;
                f < hi || (hi == cfg.f_max && f <= hi)
            })
            .filter(|&b| is_peak(b))
            .max_by(|&a, &b| mags[a].total_cmp(&mags[b]).then(b.cmp(&a)));
        if let Some(b) = best {
            found.insert(b);
        }
        lo += cfg.band_spacing;
    }
    found.into_iter().collect()
}
