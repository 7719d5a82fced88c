//! `ptrack`: synthesize, analyze, track, evaluate and plot.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ptrack::analysis::{analyze, read_atoms, write_atoms, AtomDump, AtomFormat};
use ptrack::eval::{render_figure, render_panel_svg, run_cell, run_experiment, scaling_benchmark, FigureRow};
use ptrack::greedy::{chain_spans, greedy_spans};
use ptrack::lattice::CostFn;
use ptrack::lpsolve::track_lp;
use ptrack::signal::{add_noise, measured_snr_db, read_wav, write_wav, WavFormat};
use ptrack::{Error, PathSet, Result};
use serde::{Deserialize, Serialize};

use config::{load, Overrides, RunConfig, SampleFormat};

const EXIT_INVALID: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_INTERNAL: u8 = 4;
const EXIT_EARLY_STOP: u8 = 5;

#[derive(Parser)]
#[command(name = "ptrack", version, about = "Sinusoidal partial tracking with greedy and LP path search")]
struct Cli {
    #[command(flatten)]
    opts: Overrides,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the configured chirp mixture as WAV.
    Synth {
        #[arg(long)]
        out: PathBuf,
        /// Add white noise at this SNR (dB).
        #[arg(long, allow_hyphen_values = true)]
        snr: Option<f64>,
        #[arg(long, value_enum)]
        format: Option<SampleFormat>,
    },
    /// WAV to atom dump (JSON, or CSV for a .csv path).
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Atom dump to path sets.
    Track {
        #[arg(long)]
        atoms: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the SNR sweep and write metrics JSON.
    Eval {
        #[arg(long)]
        out: PathBuf,
        /// Also render the figure here.
        #[arg(long)]
        figure: Option<PathBuf>,
        /// Also run the scaling benchmark and write its table here.
        #[arg(long)]
        scaling: Option<PathBuf>,
        /// Record per-stage wall-clock times (metrics stop being reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Render SVG: one panel from files, or the SNR-by-method grid.
    Plot {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, requires = "atoms")]
        paths: Option<PathBuf>,
        #[arg(long)]
        atoms: Option<PathBuf>,
    },
    /// Print the effective configuration.
    Config {
        #[arg(long)]
        dump: bool,
    },
}

/// Output of `track`: one path set per selected method.
#[derive(Debug, Serialize, Deserialize)]
struct TrackOutput {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    greedy: Option<PathSet>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    lp: Option<PathSet>,
    /// Set when the LP could not route the requested paths.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    lp_error: Option<String>,
    greedy_stopped_early: bool,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn synth(cfg: &RunConfig, out: &Path, snr: Option<f64>, format: Option<SampleFormat>) -> Result<u8> {
    let e = &cfg.experiment;
    let clean = e.clean_signal()?;
    let snr = snr.or(cfg.synth_snr_db);
    let mut sig = match snr {
        Some(s) => add_noise(&clean, s, e.seed)?,
        None => clean.clone(),
    };
    let achieved = snr.map(|_| measured_snr_db(&clean, &sig));
    let format: WavFormat = format.unwrap_or(cfg.wav_format).into();
    if format == WavFormat::Pcm16 && sig.peak() > 1.0 {
        sig = sig.scaled(0.999 / sig.peak());
    }
    write_wav(out, &sig, format)?;
    match achieved {
        Some(db) => println!("achieved SNR: {db:.3} dB"),
        None => println!("clean signal, {} samples", sig.len()),
    }
    Ok(0)
}

fn analyze_cmd(cfg: &RunConfig, input: &Path, out: &Path) -> Result<u8> {
    let sig = read_wav(input)?;
    let mut analysis = cfg.experiment.analysis.clone();
    analysis.stft.fs = sig.fs;
    let lat = analyze(&sig, &analysis)?;
    let dump = AtomDump::from_lattice(&lat, Some(analysis.stft.hop), Some(sig.fs));
    write_atoms(out, &dump, AtomFormat::from_path(out))?;
    println!("{} frames, {} atoms", lat.n_frames(), lat.n_nodes());
    Ok(0)
}

fn track(cfg: &RunConfig, atoms: &Path, out: &Path) -> Result<u8> {
    let dump = read_atoms(atoms, AtomFormat::from_path(atoms))?;
    let lat = dump.to_lattice()?;
    let e = &cfg.experiment;
    let d = CostFn::PredictionError {
        hop: dump.hop.unwrap_or(e.analysis.stft.hop) as f64,
    };
    let mut result = TrackOutput {
        greedy: None,
        lp: None,
        lp_error: None,
        greedy_stopped_early: false,
    };
    if cfg.method.greedy() {
        let spans = greedy_spans(&lat, &d, e.n_paths, e.delta_mq, e.k_mq)?;
        result.greedy_stopped_early = spans.iter().any(|s| s.stopped_early);
        result.greedy = Some(chain_spans(&spans));
    }
    let mut code = 0;
    if cfg.method.lp() {
        match track_lp(&lat, &d, e.delta_lp, e.n_paths) {
            Ok(ps) => result.lp = Some(ps),
            Err(err @ Error::Infeasible { .. }) => {
                eprintln!("ptrack: {err}");
                result.lp_error = Some(err.to_string());
                code = EXIT_INFEASIBLE;
            }
            Err(err) => return Err(err),
        }
    }
    write_json(out, &result)?;
    for (name, ps) in [("greedy", &result.greedy), ("lp", &result.lp)] {
        if let Some(ps) = ps {
            println!("{name}: {} paths, total cost {:.6}", ps.len(), ps.total_cost());
        }
    }
    if code == 0 && result.greedy_stopped_early {
        println!("greedy: stopped early at the threshold");
        code = EXIT_EARLY_STOP;
    }
    Ok(code)
}

fn eval(cfg: &RunConfig, out: &Path, figure: Option<&Path>, scaling: Option<&Path>, timings: bool) -> Result<u8> {
    let mut experiment = cfg.experiment.clone();
    experiment.record_timings |= timings;
    let report = run_experiment(&experiment)?;
    write_json(out, &report)?;
    for r in &report.results {
        let fmt = |e: Option<f64>| e.map_or("-".to_string(), |e| format!("{e:.2} Hz"));
        println!(
            "{:>6} dB  lp err {} cov {:.2?}  greedy err {} cov {:.2?}",
            r.snr_db,
            fmt(r.lp.median_mean_err_hz),
            r.lp.median_coverage,
            fmt(r.greedy.median_mean_err_hz),
            r.greedy.median_coverage
        );
    }
    if let Some(p) = figure {
        plot_grid(cfg, p)?;
    }
    if let Some(p) = scaling {
        let table = scaling_benchmark(&cfg.scaling)?;
        write_json(p, &table)?;
        println!(
            "scaling: greedy counts {}, LP log-log slope {:.2}",
            if table.greedy_counts_match() { "match" } else { "MISMATCH" },
            table.lp_slope.unwrap_or(f64::NAN)
        );
        if !table.greedy_counts_match() {
            return Ok(EXIT_INTERNAL);
        }
    }
    Ok(0)
}

fn plot_grid(cfg: &RunConfig, out: &Path) -> Result<()> {
    let e = &cfg.experiment;
    let cells = e
        .snr_list
        .iter()
        .enumerate()
        .map(|(s, &snr)| run_cell(e, Some(snr), e.cell_seed(s, 0)))
        .collect::<Result<Vec<_>>>()?;
    let labels: Vec<String> = e.snr_list.iter().map(|s| format!("{s} dB")).collect();
    let rows: Vec<FigureRow> = cells
        .iter()
        .zip(&labels)
        .map(|(c, label)| FigureRow {
            label,
            lattice: &c.lattice,
            lp: c.lp.as_ref(),
            greedy: Some(&c.greedy),
        })
        .collect();
    let peaks = &e.analysis.peaks;
    std::fs::write(out, render_figure(&rows, &e.analysis.stft, (peaks.f_min, peaks.f_max)))?;
    Ok(())
}

fn plot(cfg: &RunConfig, out: &Path, atoms: Option<&Path>, paths: Option<&Path>) -> Result<u8> {
    let Some(atoms) = atoms else {
        plot_grid(cfg, out)?;
        return Ok(0);
    };
    let dump = read_atoms(atoms, AtomFormat::from_path(atoms))?;
    let lat = dump.to_lattice()?;
    let mut stft = cfg.experiment.analysis.stft;
    stft.hop = dump.hop.unwrap_or(stft.hop);
    stft.fs = dump.fs.unwrap_or(stft.fs);
    let tracked = match paths {
        Some(p) => {
            let t: TrackOutput = serde_json::from_str(&std::fs::read_to_string(p)?)?;
            if cfg.method.lp() { t.lp.or(t.greedy) } else { t.greedy }
        }
        None => None,
    };
    let peaks = &cfg.experiment.analysis.peaks;
    let svg = render_panel_svg(&lat, tracked.as_ref(), &stft, (peaks.f_min, peaks.f_max), "");
    std::fs::write(out, svg)?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    let cfg = load(&cli.opts)?;
    match cli.cmd {
        Command::Synth { out, snr, format } => synth(&cfg, &out, snr, format),
        Command::Analyze { input, out } => analyze_cmd(&cfg, &input, &out),
        Command::Track { atoms, out } => track(&cfg, &atoms, &out),
        Command::Eval {
            out,
            figure,
            scaling,
            timings,
        } => eval(&cfg, &out, figure.as_deref(), scaling.as_deref(), timings),
        Command::Plot { out, paths, atoms } => plot(&cfg, &out, atoms.as_deref(), paths.as_deref()),
        Command::Config { dump } => {
            if !dump {
                return Err(Error::InvalidInput("nothing to do; pass --dump".into()));
            }
            println!("{}", serde_json::to_string_pretty(&cfg)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("ptrack: {e}");
            ExitCode::from(match e {
                Error::Infeasible { .. } => EXIT_INFEASIBLE,
                Error::Internal(_) => EXIT_INTERNAL,
                _ => EXIT_INVALID,
            })
        }
    }
}
