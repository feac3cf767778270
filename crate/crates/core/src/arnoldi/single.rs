use crate::dense::{axpy, dot, norm2, scale, DenseBlock};
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;
use crate::{c64, C64};

/// Relative size (against `‖A‖_F`) below which a new Arnoldi direction is
/// treated as zero.
pub const BREAKDOWN_TOL: f64 = 1e-14;

/// Single-vector Arnoldi relation `A V_j = V_{j+1} H̄_j`.
///
/// After a happy breakdown at step `j` the relation is `A V_j = V_j H_j`:
/// the basis keeps `j` columns and the Hessenberg matrix is square.
#[derive(Clone, Debug)]
pub struct ArnoldiState {
    basis: DenseBlock,
    /// Column `i` has length `i + 2`, or `i + 1` for the breakdown column.
    h_cols: Vec<Vec<C64>>,
    breakdown: bool,
    matvecs: usize,
}

impl ArnoldiState {
    /// Starts from `v` (normalized internally). Returns the state and `‖v‖`.
    pub fn new(v: &[C64]) -> Result<(Self, f64)> {
        let beta = norm2(v);
        if beta == 0.0 {
            return Err(Error::ZeroColumn(0));
        }
        let mut basis = DenseBlock::zeros(v.len(), 0);
        let mut v = v.to_vec();
        scale(c64(1.0 / beta), &mut v);
        basis.push_col(&v);
        Ok((
            Self {
                basis,
                h_cols: Vec::new(),
                breakdown: false,
                matvecs: 0,
            },
            beta,
        ))
    }

    pub fn steps(&self) -> usize {
        self.h_cols.len()
    }

    pub fn basis(&self) -> &DenseBlock {
        &self.basis
    }

    pub fn breakdown(&self) -> bool {
        self.breakdown
    }

    pub fn matvecs(&self) -> usize {
        self.matvecs
    }

    /// `H̄_j`, `(j+1) × j`, or `j × j` after a breakdown.
    pub fn hess(&self) -> DenseBlock {
        let j = self.steps();
        let mut h = DenseBlock::zeros(self.basis.n_cols(), j);
        for (c, col) in self.h_cols.iter().enumerate() {
            h.col_mut(c)[..col.len()].copy_from_slice(col);
        }
        h
    }

    /// Latest Hessenberg column.
    pub fn last_column(&self) -> Option<&[C64]> {
        self.h_cols.last().map(Vec::as_slice)
    }

    /// `H̄_j + σ [I; 0]`.
    pub fn shifted_hess(&self, sigma: C64) -> DenseBlock {
        let mut h = self.hess();
        for i in 0..self.steps() {
            h[(i, i)] += sigma;
        }
        h
    }

    /// One Arnoldi step: modified Gram–Schmidt plus one reorthogonalization
    /// pass. Returns `true` on breakdown. No-op once broken down.
    pub fn step(&mut self, a: &SparseMatrix) -> Result<bool> {
        if self.breakdown {
            return Ok(true);
        }
        let j = self.steps();
        let mut w = a.matvec(self.basis.col(j))?;
        self.matvecs += 1;
        let mut h = vec![C64::default(); j + 1];
        for _ in 0..2 {
            for (i, hi) in h.iter_mut().enumerate() {
                let v = self.basis.col(i);
                let coef = dot(v, &w);
                axpy(-coef, v, &mut w);
                *hi += coef;
            }
        }
        let beta = norm2(&w);
        if beta <= BREAKDOWN_TOL * a.frobenius_norm() {
            self.breakdown = true;
            self.h_cols.push(h);
            return Ok(true);
        }
        h.push(c64(beta));
        self.h_cols.push(h);
        scale(c64(1.0 / beta), &mut w);
        self.basis.push_col(&w);
        Ok(false)
    }
}

/// Extends `state` by up to `steps` Arnoldi steps, stopping early on a
/// happy breakdown (check [`ArnoldiState::breakdown`]).
pub fn arnoldi_extend(a: &SparseMatrix, mut state: ArnoldiState, steps: usize) -> Result<ArnoldiState> {
    for _ in 0..steps {
        if state.step(a)? {
            break;
        }
    }
    Ok(state)
}
