/// Coordinate-format sparse matrix.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    /// `(row, col, value)`, no duplicate coordinates.
    pub entries: Vec<(usize, usize, f64)>,
}

impl SparseMatrix {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.n_rows && col < self.n_cols);
        self.entries.push((row, col, value));
    }

    /// Entries whose value is not exactly zero.
    pub fn nnz(&self) -> usize {
        self.entries.iter().filter(|e| e.2 != 0.0).count()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_rows];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }

    /// Product in integer arithmetic; every entry must be integral.
    pub fn mul_int(&self, x: &[i64]) -> Option<Vec<i64>> {
        let mut y = vec![0i64; self.n_rows];
        for &(r, c, v) in &self.entries {
            if v.fract() != 0.0 {
                return None;
            }
            y[r] += v as i64 * x[c];
        }
        Some(y)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n_cols]; self.n_rows];
        for &(r, c, v) in &self.entries {
            d[r][c] += v;
        }
        d
    }

    /// Stacks matrices with equal column counts vertically.
    pub fn vstack(blocks: &[&SparseMatrix]) -> SparseMatrix {
        let n_cols = blocks.first().map_or(0, |b| b.n_cols);
        let mut out = SparseMatrix::new(blocks.iter().map(|b| b.n_rows).sum(), n_cols);
        let mut offset = 0;
        for b in blocks {
            assert_eq!(b.n_cols, n_cols, "column mismatch in vstack");
            out.entries
                .extend(b.entries.iter().map(|&(r, c, v)| (r + offset, c, v)));
            offset += b.n_rows;
        }
        out
    }

    pub fn scaled(&self, s: f64) -> SparseMatrix {
        SparseMatrix {
            entries: self.entries.iter().map(|&(r, c, v)| (r, c, v * s)).collect(),
            ..*self
        }
    }

    pub fn identity(n: usize) -> SparseMatrix {
        SparseMatrix {
            n_rows: n,
            n_cols: n,
            entries: (0..n).map(|i| (i, i, 1.0)).collect(),
        }
    }

    /// Nonzero count per column.
    pub fn column_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_cols];
        for &(_, c, v) in &self.entries {
            if v != 0.0 {
                counts[c] += 1;
            }
        }
        counts
    }

    /// Rows `range` as a new matrix.
    pub fn rows(&self, range: std::ops::Range<usize>) -> SparseMatrix {
        SparseMatrix {
            n_rows: range.len(),
            n_cols: self.n_cols,
            entries: self
                .entries
                .iter()
                .filter(|e| range.contains(&e.0))
                .map(|&(r, c, v)| (r - range.start, c, v))
                .collect(),
        }
    }
}
