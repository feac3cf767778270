//! Compressed sparse row storage for the operator `A`.

use crate::dense::DenseBlock;
use crate::error::{Error, Result};
use crate::C64;

/// Square or rectangular CSR matrix over complex scalars.
///
/// Column indices are strictly increasing inside each row. Values are never
/// mutated after construction, so the Frobenius norm is computed once.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<C64>,
    fro_norm: f64,
}

impl SparseMatrix {
    /// Validates raw CSR arrays.
    pub fn try_new(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<C64>,
    ) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::InvalidStructure("matrix dimensions must be positive".into()));
        }
        if row_offsets.len() != n_rows + 1 {
            return Err(Error::InvalidStructure(format!(
                "row_offsets has length {}, expected {}",
                row_offsets.len(),
                n_rows + 1
            )));
        }
        if col_indices.len() != values.len() {
            return Err(Error::InvalidStructure(format!(
                "{} column indices but {} values",
                col_indices.len(),
                values.len()
            )));
        }
        if row_offsets[0] != 0 || row_offsets[n_rows] != values.len() {
            return Err(Error::InvalidStructure(
                "row_offsets must start at 0 and end at the number of stored values".into(),
            ));
        }
        for i in 0..n_rows {
            let (lo, hi) = (row_offsets[i], row_offsets[i + 1]);
            if lo > hi {
                return Err(Error::InvalidStructure(format!("row_offsets decreases at row {i}")));
            }
            let cols = &col_indices[lo..hi];
            if cols.iter().any(|&c| c >= n_cols) {
                return Err(Error::InvalidStructure(format!("column index out of range in row {i}")));
            }
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidStructure(format!(
                    "column indices not strictly increasing in row {i}"
                )));
            }
        }
        let fro_norm = values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        Ok(Self {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
            fro_norm,
        })
    }

    /// Assembles from `(row, col, value)` triplets. Duplicates are summed;
    /// explicit zeros are kept.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, C64)>,
    ) -> Result<Self> {
        let mut t: Vec<(usize, usize, C64)> = triplets.into_iter().collect();
        if let Some(&(i, j, _)) = t.iter().find(|&&(i, j, _)| i >= n_rows || j >= n_cols) {
            return Err(Error::InvalidStructure(format!(
                "entry ({i}, {j}) outside a {n_rows}×{n_cols} matrix"
            )));
        }
        // stable sort keeps duplicate summation order deterministic
        t.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_offsets = vec![0usize; n_rows + 1];
        let mut col_indices = Vec::with_capacity(t.len());
        let mut values: Vec<C64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in t {
            if last == Some((i, j)) {
                *values.last_mut().expect("duplicate follows an entry") += v;
            } else {
                col_indices.push(j);
                values.push(v);
                row_offsets[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n_rows {
            row_offsets[i + 1] += row_offsets[i];
        }
        Self::try_new(n_rows, n_cols, row_offsets, col_indices, values)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![C64::new(1.0, 0.0); n])
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::try_new(n, n, (0..=n).collect(), (0..n).collect(), diag.to_vec())
            .expect("diagonal structure is valid")
    }

    pub fn from_dense(m: &DenseBlock) -> Self {
        let trip = (0..m.n_rows()).flat_map(|i| {
            (0..m.n_cols()).filter_map(move |j| {
                let v = m[(i, j)];
                (v != C64::default()).then_some((i, j, v))
            })
        });
        Self::from_triplets(m.n_rows(), m.n_cols(), trip).expect("dense entries are in range")
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    #[inline]
    pub fn frobenius_norm(&self) -> f64 {
        self.fro_norm
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    /// Stored value at `(i, j)`, zero when absent.
    pub fn get(&self, i: usize, j: usize) -> C64 {
        let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
        match self.col_indices[lo..hi].binary_search(&j) {
            Ok(p) => self.values[lo + p],
            Err(_) => C64::default(),
        }
    }

    /// Iterates over stored `(row, col, value)` entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.n_rows).flat_map(move |i| {
            (self.row_offsets[i]..self.row_offsets[i + 1])
                .map(move |p| (i, self.col_indices[p], self.values[p]))
        })
    }

    /// `y = A x`, accumulated row-wise left to right.
    pub fn matvec(&self, x: &[C64]) -> Result<Vec<C64>> {
        let mut y = vec![C64::default(); self.n_rows];
        self.matvec_into(x, &mut y)?;
        Ok(y)
    }

    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) -> Result<()> {
        if x.len() != self.n_cols {
            return Err(Error::DimensionMismatch {
                context: "matvec input",
                expected: self.n_cols,
                found: x.len(),
            });
        }
        if y.len() != self.n_rows {
            return Err(Error::DimensionMismatch {
                context: "matvec output",
                expected: self.n_rows,
                found: y.len(),
            });
        }
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = C64::default();
            for p in self.row_offsets[i]..self.row_offsets[i + 1] {
                acc += self.values[p] * x[self.col_indices[p]];
            }
            *yi = acc;
        }
        Ok(())
    }

    /// `Y = A X`, column by column with the same accumulation order as
    /// [`SparseMatrix::matvec`].
    pub fn block_matvec(&self, x: &DenseBlock) -> Result<DenseBlock> {
        if x.n_rows() != self.n_cols {
            return Err(Error::DimensionMismatch {
                context: "block_matvec input rows",
                expected: self.n_cols,
                found: x.n_rows(),
            });
        }
        let mut y = DenseBlock::zeros(self.n_rows, x.n_cols());
        for j in 0..x.n_cols() {
            self.matvec_into(x.col(j), y.col_mut(j))?;
        }
        Ok(y)
    }

    /// `A + σ I` (square matrices only).
    pub fn shifted(&self, sigma: C64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                context: "shifted requires a square matrix",
                expected: self.n_rows,
                found: self.n_cols,
            });
        }
        let diag = (0..self.n_rows).map(|i| (i, i, sigma));
        Self::from_triplets(self.n_rows, self.n_cols, self.triplets().chain(diag))
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(
            self.n_cols,
            self.n_rows,
            self.triplets().map(|(i, j, v)| (j, i, v)),
        )
        .expect("transpose of a valid matrix is valid")
    }

    pub fn to_dense(&self) -> DenseBlock {
        let mut m = DenseBlock::zeros(self.n_rows, self.n_cols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] += v;
        }
        m
    }
}
