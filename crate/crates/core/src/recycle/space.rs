use std::fmt;

use crate::dense::DenseBlock;
use crate::error::{Error, Result};
use crate::kernels::{householder_qr, rank_revealing_qr, solve_upper};
use crate::sparse::SparseMatrix;
use crate::C64;

/// Relative diagonal size of the QR factor of `A U` below which a column
/// of `U` is dropped.
const DROP_TOL: f64 = 1e-12;

/// Where the vectors of a recycle space came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Initial,
    RitzLargest,
    RitzSmallest,
    HarmonicRitzSmallest,
    Solutions,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Initial => "initial",
            Provenance::RitzLargest => "ritz-largest",
            Provenance::RitzSmallest => "ritz-smallest",
            Provenance::HarmonicRitzSmallest => "harmonic-ritz-smallest",
            Provenance::Solutions => "solutions",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Recycle space `𝒰 = span(U)` with image `C = A U`, `Cᴴ C = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct RecycleSpace {
    u: DenseBlock,
    c: DenseBlock,
    provenance: Provenance,
}

impl RecycleSpace {
    /// The `k = 0` space.
    pub fn empty(n: usize) -> Self {
        Self {
            u: DenseBlock::zeros(n, 0),
            c: DenseBlock::zeros(n, 0),
            provenance: Provenance::Initial,
        }
    }

    /// Builds the space from `U`, computing `A U` (`k` matrix–vector
    /// products). Columns whose images are dependent are dropped.
    pub fn new(a: &SparseMatrix, u: &DenseBlock, provenance: Provenance) -> Result<Self> {
        if u.n_rows() != a.n_rows() {
            return Err(Error::DimensionMismatch {
                context: "recycle space rows",
                expected: a.n_rows(),
                found: u.n_rows(),
            });
        }
        let au = a.block_matvec(u)?;
        Self::from_image(u, &au, provenance)
    }

    /// Builds the space from `U` and a precomputed `A U`: with
    /// `A U = Q R`, sets `C = Q` and `U ← U R⁻¹`.
    pub fn from_image(u: &DenseBlock, au: &DenseBlock, provenance: Provenance) -> Result<Self> {
        if u.n_rows() != au.n_rows() || u.n_cols() != au.n_cols() {
            return Err(Error::DimensionMismatch {
                context: "recycle space image shape",
                expected: u.n_cols(),
                found: au.n_cols(),
            });
        }
        let n = u.n_rows();
        if u.n_cols() == 0 {
            return Ok(Self {
                u: DenseBlock::zeros(n, 0),
                c: DenseBlock::zeros(n, 0),
                provenance,
            });
        }
        if u.n_cols() > n {
            return Err(Error::InvalidConfig(format!(
                "recycle space of dimension {} exceeds n = {n}",
                u.n_cols()
            )));
        }
        let (_, _, dependent) = rank_revealing_qr(au, DROP_TOL);
        let keep: Vec<usize> = (0..u.n_cols()).filter(|j| !dependent.contains(j)).collect();
        let pick = |m: &DenseBlock| {
            DenseBlock::from_columns(n, &keep.iter().map(|&j| m.col(j).to_vec()).collect::<Vec<_>>())
        };
        let (u, au) = (pick(u)?, pick(au)?);
        let k = u.n_cols();
        if k == 0 {
            return Ok(Self::empty(n).with_provenance(provenance));
        }
        let f = householder_qr(&au);
        // R⁻¹ column by column
        let mut rinv = DenseBlock::zeros(k, k);
        for j in 0..k {
            let mut e = vec![C64::default(); k];
            e[j] = C64::new(1.0, 0.0);
            rinv.set_col(j, &solve_upper(&f.r, &e)?);
        }
        Ok(Self {
            u: u.matmul(&rinv),
            c: f.q,
            provenance,
        })
    }

    /// Space spanned by (approximate) solution vectors.
    pub fn from_solutions(a: &SparseMatrix, solutions: &DenseBlock) -> Result<Self> {
        Self::new(a, solutions, Provenance::Solutions)
    }

    /// The same `U` with `C` recomputed for another matrix.
    pub fn rebase(&self, a: &SparseMatrix) -> Result<Self> {
        Self::new(a, &self.u, self.provenance)
    }

    fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn u(&self) -> &DenseBlock {
        &self.u
    }

    pub fn c(&self) -> &DenseBlock {
        &self.c
    }

    pub fn k(&self) -> usize {
        self.u.n_cols()
    }

    pub fn n(&self) -> usize {
        self.u.n_rows()
    }

    pub fn is_empty(&self) -> bool {
        self.k() == 0
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
}
