//! Atom dump files: JSON document or CSV with identical columns.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ChirpAtom, Lattice};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomFormat {
    Json,
    Csv,
}

impl AtomFormat {
    /// Picks CSV for `.csv` paths, JSON otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => AtomFormat::Csv,
            _ => AtomFormat::Json,
        }
    }
}

/// One node; the column set shared by both formats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomRecord {
    pub frame: usize,
    pub phi: f64,
    pub omega: f64,
    pub psi: f64,
    pub power: f64,
    pub bin: usize,
}

impl From<&ChirpAtom> for AtomRecord {
    fn from(a: &ChirpAtom) -> Self {
        Self {
            frame: a.frame,
            phi: a.phi,
            omega: a.omega,
            psi: a.psi,
            power: a.power,
            bin: a.bin,
        }
    }
}

/// Whole-lattice dump. `n_frames` keeps empty frames representable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomDump {
    pub n_frames: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hop: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fs: Option<f64>,
    pub atoms: Vec<AtomRecord>,
}

impl AtomDump {
    pub fn from_lattice(lat: &Lattice, hop: Option<usize>, fs: Option<f64>) -> Self {
        Self {
            n_frames: lat.n_frames(),
            hop,
            fs,
            atoms: lat.frames().iter().flatten().map(AtomRecord::from).collect(),
        }
    }

    /// Rebuilds the lattice, keeping atom order within each frame.
    pub fn to_lattice(&self) -> Result<Lattice> {
        let mut frames = vec![Vec::new(); self.n_frames];
        for r in &self.atoms {
            let Some(frame) = frames.get_mut(r.frame) else {
                return invalid(format!("atom frame {} >= n_frames {}", r.frame, self.n_frames));
            };
            frame.push(ChirpAtom {
                frame: r.frame,
                phi: r.phi,
                omega: r.omega,
                psi: r.psi,
                power: r.power,
                bin: r.bin,
            });
        }
        Ok(Lattice::from_frames(frames))
    }
}

pub fn write_atoms(path: &Path, dump: &AtomDump, format: AtomFormat) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    match format {
        AtomFormat::Json => {
            serde_json::to_writer_pretty(&mut out, dump)?;
            writeln!(out)?;
        }
        AtomFormat::Csv => {
            write!(out, "# n_frames={}", dump.n_frames)?;
            if let Some(h) = dump.hop {
                write!(out, " hop={h}")?;
            }
            if let Some(fs) = dump.fs {
                write!(out, " fs={fs}")?;
            }
            writeln!(out)?;
            let mut w = csv::Writer::from_writer(&mut out);
            if dump.atoms.is_empty() {
                w.write_record(["frame", "phi", "omega", "psi", "power", "bin"])?;
            }
            for r in &dump.atoms {
                w.serialize(r)?;
            }
            w.flush()?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads a dump. A file holding only whitespace is an empty dump.
pub fn read_atoms(path: &Path, format: AtomFormat) -> Result<AtomDump> {
    if std::fs::read(path)?.iter().all(u8::is_ascii_whitespace) {
        return Ok(AtomDump {
            n_frames: 0,
            hop: None,
            fs: None,
            atoms: Vec::new(),
        });
    }
    match format {
        AtomFormat::Json => Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?),
        AtomFormat::Csv => {
            let mut reader = BufReader::new(File::open(path)?);
            let mut header = String::new();
            reader.read_line(&mut header)?;
            let mut dump = AtomDump {
                n_frames: 0,
                hop: None,
                fs: None,
                atoms: Vec::new(),
            };
            let Some(meta) = header.trim().strip_prefix('#') else {
                return invalid("CSV atom dump must start with a '# n_frames=K' line");
            };
            let mut saw_frames = false;
            for kv in meta.split_whitespace() {
                let bad = || crate::Error::InvalidInput(format!("bad header field '{kv}'"));
                let (k, v) = kv.split_once('=').ok_or_else(bad)?;
                match k {
                    "n_frames" => {
                        dump.n_frames = v.parse().map_err(|_| bad())?;
                        saw_frames = true;
                    }
                    "hop" => dump.hop = Some(v.parse().map_err(|_| bad())?),
                    "fs" => dump.fs = Some(v.parse().map_err(|_| bad())?),
                    _ => {}
                }
            }
            if !saw_frames {
                return invalid("CSV header lacks n_frames");
            }
            for rec in csv::Reader::from_reader(reader).deserialize() {
                dump.atoms.push(rec?);
            }
            Ok(dump)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Lattice {
        let frames = Lattice::placeholder(&[2, 0, 3])
            .frames()
            .iter()
            .map(|f| {
                f.iter()
                    .map(|a| ChirpAtom {
                        phi: -1.234_567_890_123,
                        psi: 3.3e-6,
                        power: 0.1 + a.omega,
                        ..*a
                    })
                    .collect()
            })
            .collect();
        Lattice::from_frames(frames)
    }

    #[test]
    fn both_formats_round_trip_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let lat = sample();
        let dump = AtomDump::from_lattice(&lat, Some(512), Some(16000.0));
        for (name, fmt) in [("a.json", AtomFormat::Json), ("a.csv", AtomFormat::Csv)] {
            let p = dir.path().join(name);
            assert_eq!(AtomFormat::from_path(&p), fmt);
            write_atoms(&p, &dump, fmt).unwrap();
            let back = read_atoms(&p, fmt).unwrap();
            assert_eq!(back, dump);
            assert_eq!(back.to_lattice().unwrap(), lat);
        }
    }

    #[test]
    fn blank_file_is_an_empty_dump() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("blank.csv");
        std::fs::write(&p, "\n").unwrap();
        for fmt in [AtomFormat::Csv, AtomFormat::Json] {
            let d = read_atoms(&p, fmt).unwrap();
            assert_eq!((d.n_frames, d.atoms.len()), (0, 0));
        }
    }

    #[test]
    fn empty_lattice_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let lat = Lattice::from_frames(vec![vec![]; 28]);
        let dump = AtomDump::from_lattice(&lat, None, None);
        for (name, fmt) in [("e.json", AtomFormat::Json), ("e.csv", AtomFormat::Csv)] {
            let p = dir.path().join(name);
            write_atoms(&p, &dump, fmt).unwrap();
            assert_eq!(read_atoms(&p, fmt).unwrap().to_lattice().unwrap().n_frames(), 28);
        }
    }

    #[test]
    fn out_of_range_frame_is_rejected() {
        let dump = AtomDump {
            n_frames: 1,
            hop: None,
            fs: None,
            atoms: vec![AtomRecord {
                frame: 3,
                phi: 0.0,
                omega: 0.1,
                psi: 0.0,
                power: 1.0,
                bin: 1,
            }],
        };
        assert!(dump.to_lattice().is_err());
    }
}
