use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ptrack::analysis::{read_atoms, AtomDump, AtomFormat, AtomRecord};
use ptrack::signal::{read_wav, write_wav, SignalBuffer, WavFormat};
use ptrack::PathSet;
use serde_json::Value;
use tempfile::TempDir;

fn ptrack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptrack")).args(args).output().unwrap()
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "status {:?}\nstdout {}\nstderr {}",
        out.status,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn write_dump(p: &Path, frames: &[&[f64]]) {
    let atoms = frames
        .iter()
        .enumerate()
        .flat_map(|(k, f)| {
            f.iter().map(move |&omega| AtomRecord {
                frame: k,
                phi: 0.0,
                omega,
                psi: 0.0,
                power: 1.0,
                bin: 0,
            })
        })
        .collect();
    let dump = AtomDump {
        n_frames: frames.len(),
        hop: Some(512),
        fs: Some(16000.0),
        atoms,
    };
    std::fs::write(p, serde_json::to_string(&dump).unwrap()).unwrap();
}

#[test]
fn synth_default_is_one_second_and_reproducible() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (path(&dir, "a.wav"), path(&dir, "b.wav"));
    let out = ptrack(&["synth", "--out", s(&a)]);
    ok(&out);
    assert!(String::from_utf8_lossy(&out.stdout).contains("clean"));
    let sig = read_wav(&a).unwrap();
    assert_eq!((sig.len(), sig.fs), (16000, 16000.0));

    ok(&ptrack(&["synth", "--out", s(&a), "--snr", "-6", "--seed", "4"]));
    let out = ptrack(&["synth", "--out", s(&b), "--snr", "-6", "--seed", "4"]);
    ok(&out);
    assert!(String::from_utf8_lossy(&out.stdout).contains("achieved SNR"));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    ok(&ptrack(&["synth", "--out", s(&b), "--snr", "-6", "--seed", "5"]));
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn pcm_output_is_rescaled_into_range() {
    let dir = TempDir::new().unwrap();
    let a = path(&dir, "a.wav");
    ok(&ptrack(&["synth", "--out", s(&a), "--format", "pcm16", "--snr", "0"]));
    let sig = read_wav(&a).unwrap();
    assert!(sig.peak() <= 1.0 && sig.peak() > 0.9);
}

#[test]
fn analyze_gives_28_frames_and_round_trips() {
    let dir = TempDir::new().unwrap();
    let (wav, atoms, csv) = (path(&dir, "a.wav"), path(&dir, "a.json"), path(&dir, "a.csv"));
    ok(&ptrack(&["synth", "--out", s(&wav), "--snr", "0"]));
    ok(&ptrack(&["analyze", "--input", s(&wav), "--out", s(&atoms)]));
    ok(&ptrack(&["analyze", "--input", s(&wav), "--out", s(&csv)]));
    let j = read_atoms(&atoms, AtomFormat::Json).unwrap();
    let c = read_atoms(&csv, AtomFormat::Csv).unwrap();
    assert_eq!(j.n_frames, 28);
    assert_eq!(j, c);
    let lat = j.to_lattice().unwrap();
    assert_eq!(AtomDump::from_lattice(&lat, j.hop, j.fs), j);
}

#[test]
fn silence_gives_a_valid_dump() {
    let dir = TempDir::new().unwrap();
    let (wav, atoms) = (path(&dir, "z.wav"), path(&dir, "z.json"));
    write_wav(&wav, &SignalBuffer::zeros(16000, 16000.0), WavFormat::Pcm16).unwrap();
    ok(&ptrack(&["analyze", "--input", s(&wav), "--out", s(&atoms)]));
    let d = read_atoms(&atoms, AtomFormat::Json).unwrap();
    assert_eq!((d.n_frames, d.atoms.len()), (28, 0));

    let paths = path(&dir, "p.json");
    ok(&ptrack(&["track", "--atoms", s(&atoms), "--out", s(&paths)]));
    let v = json(&paths);
    assert_eq!(v["lp"]["paths"], Value::Array(vec![]));
    assert_eq!(v["greedy"]["paths"], Value::Array(vec![]));
}

#[test]
fn malformed_wav_exits_invalid() {
    let dir = TempDir::new().unwrap();
    let bad = path(&dir, "bad.wav");
    std::fs::write(&bad, b"not a wav").unwrap();
    let out = ptrack(&["analyze", "--input", s(&bad), "--out", s(&path(&dir, "x.json"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn both_methods_lp_not_worse() {
    let dir = TempDir::new().unwrap();
    let (atoms, paths) = (path(&dir, "a.json"), path(&dir, "p.json"));
    // costs 0.02 0.05 / 0.01 0.02: greedy takes 0.01 first and pays 0.06
    write_dump(&atoms, &[&[0.30, 0.33], &[0.32, 0.35]]);
    let args = ["--n-paths", "2", "--delta-mq", "1", "--delta-lp", "1"];
    let out = ptrack(&[&args[..], &["track", "--atoms", s(&atoms), "--out", s(&paths)]].concat());
    ok(&out);
    let v = json(&paths);
    let greedy: PathSet = serde_json::from_value(v["greedy"].clone()).unwrap();
    let lp: PathSet = serde_json::from_value(v["lp"].clone()).unwrap();
    assert!((greedy.total_cost() - 0.06).abs() < 1e-9);
    assert!((lp.total_cost() - 0.04).abs() < 1e-9);
    assert_eq!(lp.paths, vec![vec![0, 2], vec![1, 3]]);
}

#[test]
fn too_many_paths_exits_infeasible() {
    let dir = TempDir::new().unwrap();
    let (atoms, paths) = (path(&dir, "a.json"), path(&dir, "p.json"));
    write_dump(&atoms, &[&[0.30, 0.33], &[0.32], &[0.31, 0.36]]);
    let out = ptrack(&["--n-paths", "2", "--method", "lp", "track", "--atoms", s(&atoms), "--out", s(&paths)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible"));
    assert!(json(&paths)["lp_error"].is_string());
}

#[test]
fn greedy_threshold_stop_has_its_own_exit_code() {
    let dir = TempDir::new().unwrap();
    let (atoms, paths) = (path(&dir, "a.json"), path(&dir, "p.json"));
    write_dump(&atoms, &[&[0.30, 0.60], &[0.30, 0.90]]);
    let out = ptrack(&["--n-paths", "2", "--delta-mq", "0.1", "--method", "greedy", "track", "--atoms", s(&atoms), "--out", s(&paths)]);
    assert_eq!(out.status.code(), Some(5));
    let v = json(&paths);
    assert_eq!(v["greedy_stopped_early"], Value::Bool(true));
    assert_eq!(v["greedy"]["paths"].as_array().unwrap().len(), 1);
}

#[test]
fn empty_atom_file_gives_empty_paths() {
    let dir = TempDir::new().unwrap();
    let (atoms, paths) = (path(&dir, "e.json"), path(&dir, "p.json"));
    std::fs::write(&atoms, "").unwrap();
    ok(&ptrack(&["track", "--atoms", s(&atoms), "--out", s(&paths)]));
    let v = json(&paths);
    assert_eq!(v["lp"]["paths"], Value::Array(vec![]));
    assert_eq!(v["greedy"]["paths"], Value::Array(vec![]));
}

#[test]
fn eval_metrics_match_the_schema() {
    let dir = TempDir::new().unwrap();
    let (m, fig) = (path(&dir, "m.json"), path(&dir, "fig.svg"));
    ok(&ptrack(&["eval", "--out", s(&m), "--figure", s(&fig), "--timings"]));
    let v = json(&m);
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 3);
    for r in results {
        assert!(r["lp"].is_object() && r["greedy"].is_object());
    }

    let schema: Value = serde_json::from_str(include_str!("../schema/metrics.schema.json")).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).unwrap();
    if let Err(errors) = compiled.validate(&v) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("schema violations: {msgs:?}");
    }
    let mut broken = v.clone();
    broken["results"][0]["lp"]["median_coverage"][0] = serde_json::json!(1.5);
    assert!(!compiled.is_valid(&broken));

    let svg = std::fs::read_to_string(&fig).unwrap();
    assert_eq!(svg.matches("<rect").count(), 9);
}

#[test]
fn eval_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (path(&dir, "a.json"), path(&dir, "b.json"));
    let args = ["--trials", "1", "--snr-list", "-3,-9", "--seed", "12"];
    ok(&ptrack(&[&args[..], &["eval", "--out", s(&a)]].concat()));
    ok(&ptrack(&[&args[..], &["eval", "--out", s(&b)]].concat()));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(json(&a)["config"]["snr_list"], serde_json::json!([-3.0, -9.0]));
}

#[test]
fn plot_of_empty_paths_shows_atoms_only() {
    let dir = TempDir::new().unwrap();
    let (atoms, paths, svg) = (path(&dir, "a.json"), path(&dir, "p.json"), path(&dir, "x.svg"));
    write_dump(&atoms, &[&[0.30, 0.33], &[0.32, 0.35]]);
    std::fs::write(&paths, r#"{"lp": {"paths": [], "costs": [], "method": "lp"}, "greedy_stopped_early": false}"#).unwrap();
    ok(&ptrack(&["plot", "--atoms", s(&atoms), "--paths", s(&paths), "--out", s(&svg)]));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<line").count(), 4);
    assert!(!text.contains("<polyline"));
}

#[test]
fn config_dump_reflects_file_and_flags() {
    let dir = TempDir::new().unwrap();
    let out = ptrack(&["config", "--dump"]);
    ok(&out);
    let defaults: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(defaults["experiment"]["n_paths"], 3);
    assert_eq!(defaults["experiment"]["analysis"]["stft"]["hop"], 512);

    let cfg = path(&dir, "c.json");
    std::fs::write(&cfg, r#"{"experiment": {"delta_lp": 0.2, "seed": 3}}"#).unwrap();
    let out = ptrack(&["--config", s(&cfg), "--seed", "8", "config", "--dump"]);
    ok(&out);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["experiment"]["delta_lp"], 0.2);
    assert_eq!(v["experiment"]["seed"], 8);

    let bad = ptrack(&["--hop", "4096", "config", "--dump"]);
    assert_eq!(bad.status.code(), Some(2));
}
