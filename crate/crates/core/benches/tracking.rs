//! Compare builds with `cargo bench -p ptrack` and
//! `cargo bench -p ptrack --no-default-features`; ids carry the build tag.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use ptrack::analysis::analyze;
use ptrack::eval::{random_table_instance, run_experiment, ExperimentConfig};
use ptrack::greedy::{chain_short_paths, greedy_tuples_with, SearchMode};
use ptrack::lattice::build_pairs;
use ptrack::lpsolve::track_lp;
use ptrack::signal::add_noise;

fn tag() -> &'static str {
    if ptrack::is_parallel() {
        "parallel"
    } else {
        "sequential"
    }
}

fn pipeline(c: &mut Criterion) {
    let cfg = ExperimentConfig::default();
    let noisy = add_noise(&cfg.clean_signal().unwrap(), -6.0, 1).unwrap();
    let lat = analyze(&noisy, &cfg.analysis).unwrap();
    let d = cfg.cost_fn();

    let mut g = c.benchmark_group("pipeline");
    g.bench_function(BenchmarkId::new("analyze", tag()), |b| {
        b.iter(|| analyze(black_box(&noisy), &cfg.analysis).unwrap())
    });
    g.bench_function(BenchmarkId::new("build_pairs", tag()), |b| {
        b.iter(|| build_pairs(black_box(&lat), &d, cfg.delta_lp))
    });
    g.bench_function(BenchmarkId::new("greedy", tag()), |b| {
        b.iter(|| chain_short_paths(black_box(&lat), &d, 3, cfg.delta_mq, cfg.k_mq).unwrap())
    });
    g.bench_function(BenchmarkId::new("lp", tag()), |b| {
        b.iter(|| track_lp(black_box(&lat), &d, cfg.delta_lp, 3).unwrap())
    });
    g.finish();
}

fn greedy_exhaustive(c: &mut Criterion) {
    let mut g = c.benchmark_group("greedy_exhaustive");
    for n in [6usize, 10, 14] {
        let (lat, d) = random_table_instance(&[n; 4], n as u64);
        g.bench_with_input(BenchmarkId::new(tag(), n), &n, |b, _| {
            b.iter(|| greedy_tuples_with(&lat, &d, 3, f64::INFINITY, 0, 4, SearchMode::Exhaustive).unwrap())
        });
    }
    g.finish();
}

fn lp_scaling(c: &mut Criterion) {
    let mut g = c.benchmark_group("lp_scaling");
    for k in [16usize, 64, 256] {
        let (lat, d) = random_table_instance(&vec![12; k], k as u64);
        g.bench_with_input(BenchmarkId::new(tag(), k), &k, |b, _| {
            b.iter(|| track_lp(&lat, &d, f64::INFINITY, 3).unwrap())
        });
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let cfg = ExperimentConfig {
        trials: 2,
        ..Default::default()
    };
    let mut g = c.benchmark_group("sweep");
    g.sample_size(10);
    g.bench_function(BenchmarkId::new("three_snrs", tag()), |b| b.iter(|| run_experiment(&cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, pipeline, greedy_exhaustive, lp_scaling, sweep);
criterion_main!(benches);
