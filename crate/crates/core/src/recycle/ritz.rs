use super::space::{Provenance, RecycleSpace};
use crate::arnoldi::BlockArnoldiState;
use crate::dense::DenseBlock;
use crate::error::{Error, Result};
use crate::kernels::{hessenberg_eigen, householder_qr, rank_revealing_qr, EigenOrdering, Lu};

/// How the recycle space is refreshed after a cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RecycleUpdate {
    /// Ritz vectors for the Ritz values of largest modulus.
    #[default]
    RitzLargest,
    /// Ritz vectors for the Ritz values of smallest modulus.
    RitzSmallest,
    /// Harmonic Ritz vectors for the harmonic Ritz values of smallest
    /// modulus.
    HarmonicRitzSmallest,
    /// Keep the space unchanged.
    Keep,
}

impl RecycleUpdate {
    pub fn provenance(self) -> Option<Provenance> {
        match self {
            RecycleUpdate::RitzLargest => Some(Provenance::RitzLargest),
            RecycleUpdate::RitzSmallest => Some(Provenance::RitzSmallest),
            RecycleUpdate::HarmonicRitzSmallest => Some(Provenance::HarmonicRitzSmallest),
            RecycleUpdate::Keep => None,
        }
    }
}

/// Subspace the (harmonic) Ritz vectors are extracted from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RitzSource {
    /// The cycle's Krylov basis `W_j`, through its Hessenberg matrix.
    #[default]
    Hessenberg,
    /// The augmented space `span[W_j U]`.
    Augmented,
}

/// `A W_j = W_{j+1} H̄_j + C B_j` (the `C` term only for projected states).
fn image_of_basis(arn: &BlockArnoldiState, space: &RecycleSpace) -> DenseBlock {
    let cols = arn.steps() * arn.block_size();
    let mut aw = arn.basis().matmul(&arn.hess());
    if arn.is_projected() && space.k() > 0 {
        aw = aw.add(&space.c().matmul(&arn.coupling()));
    }
    debug_assert_eq!(aw.n_cols(), cols);
    aw
}

/// `k` (harmonic) Ritz pairs of `A` over `span(q)` (orthonormal `q`) with
/// `aq = A q` and `t = qᴴ A q`. Returns `(U, A U)`.
fn extract(q: &DenseBlock, aq: &DenseBlock, t: &DenseBlock, mode: RecycleUpdate, k: usize) -> Result<(DenseBlock, DenseBlock)> {
    let (matrix, ordering) = match mode {
        RecycleUpdate::RitzLargest => (t.clone(), EigenOrdering::ModulusDescending),
        RecycleUpdate::RitzSmallest => (t.clone(), EigenOrdering::ModulusAscending),
        RecycleUpdate::HarmonicRitzSmallest => {
            // (A q)ᴴ(A q) y = θ (A q)ᴴ q y, with (A q)ᴴ q = tᴴ
            let lu = Lu::factor(&t.adjoint())?;
            (lu.solve(&aq.adjoint_mul(aq)), EigenOrdering::ModulusAscending)
        }
        RecycleUpdate::Keep => unreachable!("handled by the caller"),
    };
    let pairs = hessenberg_eigen(&matrix, ordering, k)?;
    Ok((q.matmul(&pairs.vectors), aq.matmul(&pairs.vectors)))
}

/// New recycle space of dimension `min(k, available)` from the (harmonic)
/// Ritz vectors of one cycle. `arn` may be projected against `space` (then
/// `space` must be the projector) or plain.
pub fn update_recycle_space(
    arn: &BlockArnoldiState,
    space: &RecycleSpace,
    mode: RecycleUpdate,
    source: RitzSource,
    k: usize,
) -> Result<RecycleSpace> {
    let Some(provenance) = mode.provenance() else {
        return Ok(space.clone());
    };
    let n = arn.basis().n_rows();
    let cols = arn.steps() * arn.block_size();
    if k == 0 {
        let none = DenseBlock::zeros(n, 0);
        return RecycleSpace::from_image(&none, &none, provenance);
    }
    if cols == 0 {
        return Ok(space.clone());
    }
    let w = arn.basis().col_range(0..cols);
    let aw = image_of_basis(arn, space);
    let (u, au) = match source {
        RitzSource::Augmented if space.k() > 0 => {
            let z = DenseBlock::hstack(&[&w, space.u()])?;
            let az = DenseBlock::hstack(&[&aw, space.c()])?;
            let (_, _, dependent) = rank_revealing_qr(&z, 1e-10);
            let keep: Vec<usize> = (0..z.n_cols()).filter(|j| !dependent.contains(j)).collect();
            let pick = |m: &DenseBlock| {
                DenseBlock::from_columns(n, &keep.iter().map(|&j| m.col(j).to_vec()).collect::<Vec<_>>())
            };
            let (z, az) = (pick(&z)?, pick(&az)?);
            let f = householder_qr(&z);
            // A Q = A Z R⁻¹
            let rinv = Lu::factor(&f.r)?.inverse();
            let aq = az.matmul(&rinv);
            let t = f.q.adjoint_mul(&aq);
            extract(&f.q, &aq, &t, mode, k.min(keep.len()))?
        }
        _ => {
            let h = arn.hess().sub_block(0..cols, 0..cols);
            extract(&w, &aw, &h, mode, k.min(cols))?
        }
    };
    let out = RecycleSpace::from_image(&u, &au, provenance)?;
    if out.is_empty() {
        return Err(Error::InvalidConfig("Ritz extraction produced no usable vectors".into()));
    }
    Ok(out)
}
