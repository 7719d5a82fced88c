//! Plain-text dump of a program for cross-checking with external solvers.
//!
//! A directory holds `header.json` and one `row col value` triplet file per
//! array (`c.txt`, `G.txt`, `h.txt`, `A.txt`, `b.txt`; vectors use column 0).
//! Indices are 0-based and only nonzero entries are written.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::problem::{Form, ProblemDims, TrackingProblem};
use super::sparse::SparseMatrix;
use crate::error::{invalid, Result};

pub const DUMP_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DumpHeader {
    pub version: u32,
    pub sense: String,
    pub n_vars: usize,
    pub g_rows: usize,
    pub a_rows: usize,
    pub reduced: bool,
    pub dims: ProblemDims,
    pub pairs: Vec<[usize; 2]>,
}

fn write_triplets(path: &Path, m: &SparseMatrix) -> Result<()> {
    let mut s = String::new();
    for &(r, c, v) in &m.entries {
        if v != 0.0 {
            writeln!(s, "{r} {c} {v}").unwrap();
        }
    }
    std::fs::write(path, s)?;
    Ok(())
}

fn column(v: &[f64]) -> SparseMatrix {
    SparseMatrix {
        n_rows: v.len(),
        n_cols: 1,
        entries: v.iter().enumerate().map(|(i, &x)| (i, 0, x)).collect(),
    }
}

fn read_triplets(path: &Path, n_rows: usize, n_cols: usize) -> Result<SparseMatrix> {
    let mut m = SparseMatrix::new(n_rows, n_cols);
    for (ln, line) in std::fs::read_to_string(path)?.lines().enumerate() {
        let f: Vec<&str> = line.split_whitespace().collect();
        let parsed = match f.as_slice() {
            [r, c, v] => r.parse().ok().zip(c.parse().ok()).zip(v.parse::<f64>().ok()),
            _ => None,
        };
        let Some(((r, c), v)) = parsed else {
            return invalid(format!("{}:{}: expected 'row col value'", path.display(), ln + 1));
        };
        if r >= n_rows || c >= n_cols {
            return invalid(format!("{}:{}: index out of range", path.display(), ln + 1));
        }
        m.push(r, c, v);
    }
    Ok(m)
}

fn dense_column(m: &SparseMatrix) -> Vec<f64> {
    let mut v = vec![0.0; m.n_rows];
    for &(r, _, x) in &m.entries {
        v[r] = x;
    }
    v
}

pub fn write_problem_dump(dir: &Path, p: &TrackingProblem) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let header = DumpHeader {
        version: DUMP_VERSION,
        sense: "minimize c.x s.t. G x <= h, A x = b".into(),
        n_vars: p.n_vars(),
        g_rows: p.g.n_rows,
        a_rows: p.a.n_rows,
        reduced: p.form == Form::Reduced,
        dims: p.dims.clone(),
        pairs: p.pairs.iter().map(|&(i, j)| [i, j]).collect(),
    };
    std::fs::write(dir.join("header.json"), serde_json::to_vec_pretty(&header)?)?;
    write_triplets(&dir.join("c.txt"), &column(&p.c))?;
    write_triplets(&dir.join("G.txt"), &p.g)?;
    write_triplets(&dir.join("h.txt"), &column(&p.h))?;
    write_triplets(&dir.join("A.txt"), &p.a)?;
    write_triplets(&dir.join("b.txt"), &column(&p.b))?;
    Ok(())
}

/// Reads a dump back. Only reduced-form dumps can be restored.
pub fn read_problem_dump(dir: &Path) -> Result<TrackingProblem> {
    let header: DumpHeader = serde_json::from_slice(&std::fs::read(dir.join("header.json"))?)?;
    if header.version != DUMP_VERSION {
        return invalid(format!("unsupported dump version {}", header.version));
    }
    if !header.reduced {
        return invalid("only reduced-form dumps can be read back");
    }
    let n = header.n_vars;
    Ok(TrackingProblem {
        c: dense_column(&read_triplets(&dir.join("c.txt"), n, 1)?),
        g: read_triplets(&dir.join("G.txt"), header.g_rows, n)?,
        h: dense_column(&read_triplets(&dir.join("h.txt"), header.g_rows, 1)?),
        a: read_triplets(&dir.join("A.txt"), header.a_rows, n)?,
        b: dense_column(&read_triplets(&dir.join("b.txt"), header.a_rows, 1)?),
        dims: header.dims,
        pairs: header.pairs.into_iter().map(|[i, j]| (i, j)).collect(),
        form: Form::Reduced,
    })
}
