//! Mono WAV and raw float-64 audio files.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::SignalBuffer;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WavFormat {
    Pcm16,
    Float32,
}

/// Writes the real channel as a mono WAV file.
///
/// PCM output requires every sample inside `[-1, 1]`; scale beforehand.
pub fn write_wav(path: &Path, signal: &SignalBuffer, format: WavFormat) -> Result<()> {
    if signal.fs.fract() != 0.0 || signal.fs <= 0.0 || signal.fs > u32::MAX as f64 {
        return invalid(format!("WAV needs an integral sample rate, got {}", signal.fs));
    }
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: signal.fs as u32,
        bits_per_sample: match format {
            WavFormat::Pcm16 => 16,
            WavFormat::Float32 => 32,
        },
        sample_format: match format {
            WavFormat::Pcm16 => hound::SampleFormat::Int,
            WavFormat::Float32 => hound::SampleFormat::Float,
        },
    };
    let mut writer = hound::WavWriter::create(path, spec)?;
    match format {
        WavFormat::Pcm16 => {
            if let Some(x) = signal.samples.iter().find(|x| x.abs() > 1.0) {
                return invalid(format!("sample {x} exceeds PCM full scale"));
            }
            for x in &signal.samples {
                writer.write_sample((x * i16::MAX as f64).round() as i16)?;
            }
        }
        WavFormat::Float32 => {
            for x in &signal.samples {
                writer.write_sample(*x as f32)?;
            }
        }
    }
    writer.finalize()?;
    Ok(())
}

/// Reads a mono 16-bit PCM or 32-bit float WAV file.
pub fn read_wav(path: &Path) -> Result<SignalBuffer> {
    let mut reader = hound::WavReader::open(path)?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return invalid(format!("expected mono WAV, got {} channels", spec.channels));
    }
    let samples = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| v as f64 / i16::MAX as f64))
            .collect::<std::result::Result<Vec<_>, _>>()?,
        (hound::SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<Vec<_>, _>>()?,
        (fmt, bits) => return invalid(format!("unsupported WAV encoding {fmt:?}/{bits} bits")),
    };
    Ok(SignalBuffer::new(samples, spec.sample_rate as f64))
}

/// Sidecar header stored next to raw float-64 files as `<file>.json`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawHeader {
    pub fs: f64,
    pub n_samples: usize,
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Writes little-endian f64 samples plus a JSON sidecar `{fs, n_samples}`.
pub fn write_raw_f64(path: &Path, signal: &SignalBuffer) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for x in &signal.samples {
        w.write_all(&x.to_le_bytes())?;
    }
    w.flush()?;
    let header = RawHeader {
        fs: signal.fs,
        n_samples: signal.len(),
    };
    std::fs::write(sidecar(path), serde_json::to_vec_pretty(&header)?)?;
    Ok(())
}

pub fn read_raw_f64(path: &Path) -> Result<SignalBuffer> {
    let header: RawHeader = serde_json::from_slice(&std::fs::read(sidecar(path))?)?;
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    if bytes.len() != header.n_samples * 8 {
        return invalid(format!(
            "raw file holds {} bytes, header promises {} samples",
            bytes.len(),
            header.n_samples
        ));
    }
    let samples = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(SignalBuffer::new(samples, header.fs))
}
