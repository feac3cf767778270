use crate::dense::{axpy, dot, norm2, scale, DenseBlock};
use crate::error::{Error, Result};
use crate::random;
use crate::recycle::RecycleSpace;
use crate::sparse::SparseMatrix;
use crate::{c64, C64};

/// A dependent block Arnoldi column that was replaced by a random vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Replacement {
    /// Restart cycle the basis belongs to (set by the caller).
    pub cycle: usize,
    /// Block step that produced the column; 0 is the initial QR.
    pub step: usize,
    /// Column index within the block.
    pub column: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct BlockArnoldiOptions {
    /// A column is dependent when orthogonalization shrinks it below this
    /// fraction of its original norm.
    pub dependency_tol: f64,
    pub seed: u64,
    pub cycle: usize,
}

impl Default for BlockArnoldiOptions {
    fn default() -> Self {
        Self {
            dependency_tol: 1e-10,
            seed: 0,
            cycle: 0,
        }
    }
}

const REPLACEMENT_RETRIES: usize = 3;

/// Block Arnoldi relation `A W_j = W_{j+1} H̄_j`, or with a projector `C`,
/// `(I − C Cᴴ) A W_j = W_{j+1} H̄_j` and `B_j = Cᴴ A W_j`.
///
/// Columns are orthogonalized one at a time, so the subdiagonal blocks of
/// `H̄_j` are upper triangular and `R₀ = V₁ S₀` has upper-triangular `S₀`.
#[derive(Clone, Debug)]
pub struct BlockArnoldiState {
    basis: DenseBlock,
    /// Column `c` of `H̄` has length `(c / L + 2) L`.
    h_cols: Vec<Vec<C64>>,
    coupling_cols: Vec<Vec<C64>>,
    s0: DenseBlock,
    block_size: usize,
    projector: Option<DenseBlock>,
    replacements: Vec<Replacement>,
    exhausted: bool,
    block_matvecs: usize,
    opts: BlockArnoldiOptions,
    draws: u64,
}

impl BlockArnoldiState {
    /// Reduced QR `R₀ = V₁ S₀` with dependent columns replaced.
    pub fn start(r0: &DenseBlock, projector: Option<&DenseBlock>, opts: BlockArnoldiOptions) -> Result<Self> {
        let l = r0.n_cols();
        if l == 0 {
            return Err(Error::InvalidConfig("block size must be at least 1".into()));
        }
        if let Some(c) = projector {
            if c.n_rows() != r0.n_rows() {
                return Err(Error::DimensionMismatch {
                    context: "block_arnoldi projector rows",
                    expected: r0.n_rows(),
                    found: c.n_rows(),
                });
            }
        }
        let mut st = Self {
            basis: DenseBlock::zeros(r0.n_rows(), 0),
            h_cols: Vec::new(),
            coupling_cols: Vec::new(),
            s0: DenseBlock::zeros(l, l),
            block_size: l,
            projector: projector.filter(|c| c.n_cols() > 0).cloned(),
            replacements: Vec::new(),
            exhausted: false,
            block_matvecs: 0,
            opts,
            draws: 0,
        };
        for q in 0..l {
            let (coefs, diag) = st.orthonormalize_into_basis(r0.col(q).to_vec(), 0, q, false)?;
            for (i, v) in coefs.into_iter().enumerate() {
                st.s0[(i, q)] = v;
            }
            st.s0[(q, q)] = diag;
        }
        Ok(st)
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    /// Completed block steps `j`.
    pub fn steps(&self) -> usize {
        self.h_cols.len() / self.block_size
    }

    /// `W_{j+1}`, `n × (j+1)L`.
    pub fn basis(&self) -> &DenseBlock {
        &self.basis
    }

    pub fn s0(&self) -> &DenseBlock {
        &self.s0
    }

    pub fn replacements(&self) -> &[Replacement] {
        &self.replacements
    }

    /// The whole space was spanned; later basis columns are zero and no
    /// further steps are taken.
    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    pub fn block_matvecs(&self) -> usize {
        self.block_matvecs
    }

    pub fn is_projected(&self) -> bool {
        self.projector.is_some()
    }

    /// `H̄_j`, `(j+1)L × jL`.
    pub fn hess(&self) -> DenseBlock {
        let l = self.block_size;
        let j = self.steps();
        let mut h = DenseBlock::zeros((j + 1) * l, j * l);
        for (c, col) in self.h_cols.iter().enumerate() {
            h.col_mut(c)[..col.len()].copy_from_slice(col);
        }
        h
    }

    /// `H̄_j + σ [I; 0]`.
    pub fn shifted_hess(&self, sigma: C64) -> DenseBlock {
        let mut h = self.hess();
        for i in 0..h.n_cols() {
            h[(i, i)] += sigma;
        }
        h
    }

    /// The `L` Hessenberg columns added by the latest step, each of length
    /// `(j+1)L`.
    pub fn last_block_columns(&self) -> &[Vec<C64>] {
        let l = self.block_size;
        &self.h_cols[self.h_cols.len().saturating_sub(l)..]
    }

    /// The `L` columns of `B_j` added by the latest step (empty without a
    /// projector).
    pub fn last_coupling_columns(&self) -> &[Vec<C64>] {
        let l = self.block_size;
        &self.coupling_cols[self.coupling_cols.len().saturating_sub(l)..]
    }

    /// `B_j = Cᴴ A W_j`, `k × jL` (empty without a projector).
    pub fn coupling(&self) -> DenseBlock {
        let k = self.projector.as_ref().map_or(0, |c| c.n_cols());
        let mut b = DenseBlock::zeros(k, self.coupling_cols.len());
        for (c, col) in self.coupling_cols.iter().enumerate() {
            b.set_col(c, col);
        }
        b
    }

    /// One block step: `Y = A V_j`, projection against `C` when present,
    /// then column-wise modified Gram–Schmidt with one reorthogonalization
    /// pass. Returns `false` when the state is exhausted and nothing was done.
    pub fn step(&mut self, a: &SparseMatrix) -> Result<bool> {
        if self.exhausted {
            return Ok(false);
        }
        let l = self.block_size;
        let j = self.steps();
        let v = self.basis.col_range(j * l..(j + 1) * l);
        let y = a.block_matvec(&v)?;
        self.block_matvecs += 1;
        for q in 0..l {
            let (mut coefs, diag) = self.orthonormalize_into_basis(y.col(q).to_vec(), j + 1, q, true)?;
            let k = self.projector.as_ref().map_or(0, |c| c.n_cols());
            let b: Vec<C64> = coefs.drain(..k).collect();
            if self.projector.is_some() {
                self.coupling_cols.push(b);
            }
            // coefficients against W_{j+1} and the first q new columns
            coefs.resize((j + 2) * l, C64::default());
            coefs[(j + 1) * l + q] = diag;
            self.h_cols.push(coefs);
        }
        Ok(true)
    }

    /// Orthogonalizes `w` against `C` (when `with_projector`) and the basis,
    /// appends the normalized result (or a replacement) and returns the
    /// coefficients (`C` coefficients first) and the new diagonal entry.
    fn orthonormalize_into_basis(
        &mut self,
        mut w: Vec<C64>,
        step: usize,
        column: usize,
        with_projector: bool,
    ) -> Result<(Vec<C64>, C64)> {
        let k = match (&self.projector, with_projector) {
            (Some(c), true) => c.n_cols(),
            _ => 0,
        };
        let nb = self.basis.n_cols();
        let mut coefs = vec![C64::default(); k + nb];
        let pre = norm2(&w);
        for _ in 0..2 {
            if k > 0 {
                let c = self.projector.as_ref().expect("k > 0 implies projector");
                for i in 0..k {
                    let coef = dot(c.col(i), &w);
                    axpy(-coef, c.col(i), &mut w);
                    coefs[i] += coef;
                }
            }
            for i in 0..nb {
                let coef = dot(self.basis.col(i), &w);
                axpy(-coef, self.basis.col(i), &mut w);
                coefs[k + i] += coef;
            }
        }
        let nrm = norm2(&w);
        if !self.exhausted && nrm > self.opts.dependency_tol * pre && nrm > 0.0 {
            scale(c64(1.0 / nrm), &mut w);
            self.basis.push_col(&w);
            return Ok((coefs, c64(nrm)));
        }
        // dependent column: try a random replacement orthogonal to everything
        if !self.exhausted {
            for _ in 0..REPLACEMENT_RETRIES {
                let seed = random::derive_seed(self.opts.seed, self.draws);
                self.draws += 1;
                if let Some(z) = self.orthogonal_random(seed) {
                    let diag = dot(&z, &w);
                    self.basis.push_col(&z);
                    self.replacements.push(Replacement {
                        cycle: self.opts.cycle,
                        step,
                        column,
                        seed,
                    });
                    return Ok((coefs, diag));
                }
            }
            let used = self.basis.n_cols() + self.projector.as_ref().map_or(0, |c| c.n_cols());
            if used < self.basis.n_rows() {
                return Err(Error::TotalBreakdown { step });
            }
            self.exhausted = true;
        }
        self.basis.push_col(&vec![C64::default(); self.basis.n_rows()]);
        Ok((coefs, C64::default()))
    }

    fn orthogonal_random(&self, seed: u64) -> Option<Vec<C64>> {
        let n = self.basis.n_rows();
        let mut z = random::unit_vector(&mut random::rng(seed), n);
        for _ in 0..2 {
            if let Some(c) = &self.projector {
                for col in c.columns() {
                    let coef = dot(col, &z);
                    axpy(-coef, col, &mut z);
                }
            }
            for col in self.basis.columns() {
                let coef = dot(col, &z);
                axpy(-coef, col, &mut z);
            }
        }
        let nrm = norm2(&z);
        // a unit vector that loses nearly everything lies in the span
        if nrm <= 1e-8 {
            return None;
        }
        scale(c64(1.0 / nrm), &mut z);
        Some(z)
    }
}

/// Reduced QR of `r0` followed by `m` block steps (fewer if the space is
/// exhausted). With `projector`, steps use `(I − C Cᴴ) A` and accumulate
/// `B_j = Cᴴ A W_j`.
pub fn block_arnoldi(
    a: &SparseMatrix,
    r0: &DenseBlock,
    m: usize,
    projector: Option<&RecycleSpace>,
) -> Result<BlockArnoldiState> {
    block_arnoldi_with(a, r0, m, projector, BlockArnoldiOptions::default())
}

pub fn block_arnoldi_with(
    a: &SparseMatrix,
    r0: &DenseBlock,
    m: usize,
    projector: Option<&RecycleSpace>,
    opts: BlockArnoldiOptions,
) -> Result<BlockArnoldiState> {
    let mut st = BlockArnoldiState::start(r0, projector.map(RecycleSpace::c), opts)?;
    for _ in 0..m {
        if !st.step(a)? {
            break;
        }
    }
    Ok(st)
}
