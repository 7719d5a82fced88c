//! L best node-disjoint paths through the lattice as a linear program.

mod certificate;
mod dump;
mod extract;
mod flow;
mod problem;
mod simplex;
mod sparse;

pub use certificate::transition_matching;
pub use dump::{read_problem_dump, write_problem_dump, DumpHeader, DUMP_VERSION};
pub use extract::extract_paths;
pub use flow::{solve, Solution};
pub use problem::{
    build_full_problem, build_problem, closed_form_nnz, full_lattice_nnz, CountRows, Form, NnzBreakdown, ProblemDims,
    TrackingProblem, INTEGRALITY_TOL,
};
pub use simplex::{solve_dense, solve_simplex, DenseLp, LpStatus, RowKind};
pub use sparse::SparseMatrix;

use crate::analysis::Lattice;
use crate::error::Result;
use crate::lattice::{build_pairs, Distance};
use crate::paths::{PathSet, TrackMethod};

/// Thresholds, builds, solves and extracts in one go.
///
/// A lattice with fewer than two frames, or with no nodes at all, yields an
/// empty path set.
pub fn track_lp<D: Distance + ?Sized>(lat: &Lattice, d: &D, delta_lp: f64, n_paths: usize) -> Result<PathSet> {
    if lat.n_frames() < 2 || lat.n_nodes() == 0 {
        return Ok(PathSet::empty(TrackMethod::Lp));
    }
    let ps = build_pairs(lat, d, delta_lp);
    let problem = build_problem(&ps, lat, n_paths)?;
    let sol = solve(&problem)?;
    extract_paths(&sol.x, &problem, &ps, lat)
}
