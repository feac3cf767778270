//! Column-major dense blocks of complex scalars and the handful of vector
//! helpers the solvers share.

use std::ops::{Index, IndexMut, Range};

use crate::error::{Error, Result};
use crate::C64;

/// Conjugated inner product `aᴴ b`.
#[inline]
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[inline]
pub fn norm2(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub fn scale(alpha: C64, x: &mut [C64]) {
    for xi in x.iter_mut() {
        *xi *= alpha;
    }
}

/// A dense `n_rows × n_cols` block stored column by column.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseBlock {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<C64>,
}

impl DenseBlock {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            entries: vec![C64::default(); n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// `n_rows × n_cols` block whose leading columns are the identity
    /// (`E₁`-style selector when `n_rows > n_cols`).
    pub fn eye(n_rows: usize, n_cols: usize) -> Self {
        let mut m = Self::zeros(n_rows, n_cols);
        for i in 0..n_rows.min(n_cols) {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_col_major(n_rows: usize, n_cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != n_rows * n_cols {
            return Err(Error::DimensionMismatch {
                context: "DenseBlock::from_col_major",
                expected: n_rows * n_cols,
                found: entries.len(),
            });
        }
        Ok(Self {
            n_rows,
            n_cols,
            entries,
        })
    }

    pub fn from_columns(n_rows: usize, columns: &[Vec<C64>]) -> Result<Self> {
        let mut entries = Vec::with_capacity(n_rows * columns.len());
        for col in columns {
            if col.len() != n_rows {
                return Err(Error::DimensionMismatch {
                    context: "DenseBlock::from_columns",
                    expected: n_rows,
                    found: col.len(),
                });
            }
            entries.extend_from_slice(col);
        }
        Ok(Self {
            n_rows,
            n_cols: columns.len(),
            entries,
        })
    }

    /// Builds a block from row slices. Panics on ragged input; meant for
    /// literals in tests and examples.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(n_rows, n_cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n_cols, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| C64::new(v, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
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
    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<C64> {
        self.entries
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[C64] {
        &self.entries[j * self.n_rows..(j + 1) * self.n_rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [C64] {
        &mut self.entries[j * self.n_rows..(j + 1) * self.n_rows]
    }

    pub fn set_col(&mut self, j: usize, values: &[C64]) {
        self.col_mut(j).copy_from_slice(values);
    }

    pub fn push_col(&mut self, values: &[C64]) {
        assert_eq!(values.len(), self.n_rows);
        self.entries.extend_from_slice(values);
        self.n_cols += 1;
    }

    pub fn columns(&self) -> impl Iterator<Item = &[C64]> {
        (0..self.n_cols).map(move |j| self.col(j))
    }

    /// Copy of the columns in `range`.
    pub fn col_range(&self, range: Range<usize>) -> DenseBlock {
        let entries = self.entries[range.start * self.n_rows..range.end * self.n_rows].to_vec();
        DenseBlock {
            n_rows: self.n_rows,
            n_cols: range.len(),
            entries,
        }
    }

    /// Copy of the sub-block `rows × cols`.
    pub fn sub_block(&self, rows: Range<usize>, cols: Range<usize>) -> DenseBlock {
        let mut out = DenseBlock::zeros(rows.len(), cols.len());
        for (jo, j) in cols.enumerate() {
            out.col_mut(jo)
                .copy_from_slice(&self.col(j)[rows.start..rows.end]);
        }
        out
    }

    /// Writes `block` with its top-left corner at `(row, col)`.
    pub fn set_block(&mut self, row: usize, col: usize, block: &DenseBlock) {
        for j in 0..block.n_cols {
            self.col_mut(col + j)[row..row + block.n_rows].copy_from_slice(block.col(j));
        }
    }

    /// Copy with a different number of rows; new rows are zero, removed rows
    /// are dropped.
    pub fn resized_rows(&self, n_rows: usize) -> DenseBlock {
        let mut out = DenseBlock::zeros(n_rows, self.n_cols);
        let keep = n_rows.min(self.n_rows);
        for j in 0..self.n_cols {
            out.col_mut(j)[..keep].copy_from_slice(&self.col(j)[..keep]);
        }
        out
    }

    pub fn hstack(blocks: &[&DenseBlock]) -> Result<DenseBlock> {
        let n_rows = blocks.first().map_or(0, |b| b.n_rows);
        let mut entries = Vec::new();
        let mut n_cols = 0;
        for b in blocks {
            if b.n_rows != n_rows {
                return Err(Error::DimensionMismatch {
                    context: "DenseBlock::hstack",
                    expected: n_rows,
                    found: b.n_rows,
                });
            }
            entries.extend_from_slice(&b.entries);
            n_cols += b.n_cols;
        }
        Ok(DenseBlock {
            n_rows,
            n_cols,
            entries,
        })
    }

    pub fn adjoint(&self) -> DenseBlock {
        let mut out = DenseBlock::zeros(self.n_cols, self.n_rows);
        for j in 0..self.n_cols {
            for i in 0..self.n_rows {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// `self · other`
    pub fn matmul(&self, other: &DenseBlock) -> DenseBlock {
        assert_eq!(self.n_cols, other.n_rows, "matmul dimension mismatch");
        let mut out = DenseBlock::zeros(self.n_rows, other.n_cols);
        for j in 0..other.n_cols {
            let oc = other.col(j);
            let dst = &mut out.entries[j * self.n_rows..(j + 1) * self.n_rows];
            for (p, &coef) in oc.iter().enumerate() {
                if coef != C64::default() {
                    axpy(coef, self.col(p), dst);
                }
            }
        }
        out
    }

    /// `selfᴴ · other`
    pub fn adjoint_mul(&self, other: &DenseBlock) -> DenseBlock {
        assert_eq!(self.n_rows, other.n_rows, "adjoint_mul dimension mismatch");
        let mut out = DenseBlock::zeros(self.n_cols, other.n_cols);
        for j in 0..other.n_cols {
            let oc = other.col(j);
            for i in 0..self.n_cols {
                out[(i, j)] = dot(self.col(i), oc);
            }
        }
        out
    }

    /// `self · x`
    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.n_cols, x.len(), "mul_vec dimension mismatch");
        let mut y = vec![C64::default(); self.n_rows];
        for (j, &xj) in x.iter().enumerate() {
            if xj != C64::default() {
                axpy(xj, self.col(j), &mut y);
            }
        }
        y
    }

    /// `selfᴴ · x`
    pub fn adjoint_mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.n_rows, x.len(), "adjoint_mul_vec dimension mismatch");
        (0..self.n_cols).map(|j| dot(self.col(j), x)).collect()
    }

    pub fn add(&self, other: &DenseBlock) -> DenseBlock {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        DenseBlock {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries,
        }
    }

    pub fn sub(&self, other: &DenseBlock) -> DenseBlock {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        DenseBlock {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries,
        }
    }

    pub fn scaled(&self, alpha: C64) -> DenseBlock {
        DenseBlock {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries: self.entries.iter().map(|v| v * alpha).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.entries)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖selfᴴ self − I‖_F`
    pub fn orthonormality_error(&self) -> f64 {
        self.adjoint_mul(self)
            .sub(&DenseBlock::identity(self.n_cols))
            .frobenius_norm()
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.n_cols).all(|j| ((j + 1)..self.n_rows).all(|i| self[(i, j)] == C64::default()))
    }
}

impl Index<(usize, usize)> for DenseBlock {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.n_rows && j < self.n_cols);
        &self.entries[j * self.n_rows + i]
    }
}

impl IndexMut<(usize, usize)> for DenseBlock {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.n_rows && j < self.n_cols);
        &mut self.entries[j * self.n_rows + i]
    }
}
