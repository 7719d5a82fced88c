//! The noisy three-chirp comparison between the greedy and LP trackers,
//! plus trajectory metrics, SVG figures and scaling measurements.

mod experiment;
mod metrics;
mod plot;
mod scaling;

pub use experiment::{
    run_cell, run_experiment, ChirpTrack, CellResult, ExperimentConfig, ExperimentReport, MethodSummary,
    SnrReport, Timings, TrialReport, METRICS_SCHEMA_VERSION,
};
pub use metrics::{associate, method_metrics, GroundTruth, MethodMetrics, PathMetrics};
pub use plot::{render_figure, render_panel_svg, FigureRow};
pub use scaling::{
    loglog_slope, random_table_instance, scaling_benchmark, GreedyCountRow, LpTimingRow, ScalingConfig,
    ScalingTable,
};
