use std::sync::Arc;

use crate::dense::DenseBlock;
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;
use crate::C64;

/// The family `(A + σᵢ I) xᵢ = bᵢ`, `i = 1..L`, with initial guesses.
#[derive(Clone, Debug)]
pub struct ShiftedFamily {
    matrix: Arc<SparseMatrix>,
    shifts: Vec<C64>,
    rhs: DenseBlock,
    initial_guess: DenseBlock,
}

impl ShiftedFamily {
    /// Zero initial guess.
    pub fn new(matrix: Arc<SparseMatrix>, shifts: Vec<C64>, rhs: DenseBlock) -> Result<Self> {
        let x0 = DenseBlock::zeros(rhs.n_rows(), rhs.n_cols());
        Self::with_initial_guess(matrix, shifts, rhs, x0)
    }

    pub fn with_initial_guess(
        matrix: Arc<SparseMatrix>,
        shifts: Vec<C64>,
        rhs: DenseBlock,
        initial_guess: DenseBlock,
    ) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidFamily(format!(
                "matrix is {}×{}, not square",
                matrix.n_rows(),
                matrix.n_cols()
            )));
        }
        let n = matrix.n_rows();
        if shifts.is_empty() {
            return Err(Error::InvalidFamily("no shifts".into()));
        }
        if rhs.n_rows() != n || initial_guess.n_rows() != n {
            return Err(Error::InvalidFamily(format!(
                "matrix has {n} rows, rhs {} and initial guess {}",
                rhs.n_rows(),
                initial_guess.n_rows()
            )));
        }
        if rhs.n_cols() != shifts.len() || initial_guess.n_cols() != shifts.len() {
            return Err(Error::InvalidFamily(format!(
                "{} shifts but rhs has {} columns and initial guess {}",
                shifts.len(),
                rhs.n_cols(),
                initial_guess.n_cols()
            )));
        }
        for i in 0..shifts.len() {
            for j in (i + 1)..shifts.len() {
                if shifts[i] == shifts[j] {
                    return Err(Error::InvalidFamily(format!(
                        "shifts {i} and {j} are both {}",
                        shifts[i]
                    )));
                }
            }
        }
        Ok(Self {
            matrix,
            shifts,
            rhs,
            initial_guess,
        })
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn matrix_arc(&self) -> &Arc<SparseMatrix> {
        &self.matrix
    }

    pub fn shifts(&self) -> &[C64] {
        &self.shifts
    }

    pub fn rhs(&self) -> &DenseBlock {
        &self.rhs
    }

    pub fn initial_guess(&self) -> &DenseBlock {
        &self.initial_guess
    }

    pub fn n(&self) -> usize {
        self.matrix.n_rows()
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    /// Same matrix, shifts and right-hand sides with a new initial guess.
    pub fn with_x0(&self, x0: DenseBlock) -> Result<Self> {
        Self::with_initial_guess(self.matrix.clone(), self.shifts.clone(), self.rhs.clone(), x0)
    }

    /// The subfamily made of the listed columns.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let pick = |b: &DenseBlock| {
            DenseBlock::from_columns(b.n_rows(), &indices.iter().map(|&i| b.col(i).to_vec()).collect::<Vec<_>>())
        };
        Self::with_initial_guess(
            self.matrix.clone(),
            indices.iter().map(|&i| self.shifts[i]).collect(),
            pick(&self.rhs)?,
            pick(&self.initial_guess)?,
        )
    }

    /// `bᵢ − (A + σᵢ I) xᵢ` for one shift.
    pub fn residual(&self, i: usize, x: &[C64]) -> Vec<C64> {
        let mut r = self.matrix.matvec(x).expect("family dimensions are consistent");
        let sigma = self.shifts[i];
        for ((ri, bi), xi) in r.iter_mut().zip(self.rhs.col(i)).zip(x) {
            *ri = bi - (*ri + sigma * xi);
        }
        r
    }

    /// `B − A X − X D`, column by column.
    pub fn residuals(&self, x: &DenseBlock) -> DenseBlock {
        let mut r = DenseBlock::zeros(self.n(), self.len());
        for i in 0..self.len() {
            r.set_col(i, &self.residual(i, x.col(i)));
        }
        r
    }

    pub fn initial_residuals(&self) -> DenseBlock {
        self.residuals(&self.initial_guess)
    }

    /// True when every initial guess is zero, so `R₀ = B` costs no matvec.
    pub fn zero_initial_guess(&self) -> bool {
        self.initial_guess.entries().iter().all(|v| *v == C64::default())
    }
}
