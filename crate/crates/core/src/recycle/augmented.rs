use super::space::RecycleSpace;
use crate::arnoldi::BlockArnoldiState;
use crate::dense::{axpy, DenseBlock};
use crate::error::{Error, Result};
use crate::kernels::householder_qr;
use crate::{c64, C64};

/// Smallest diagonal of `N`, relative to `‖U‖_F`, accepted by
/// [`build_augmented_operator`].
pub const AUGMENTATION_RANK_TOL: f64 = 1e-12;

/// Shifted augmented Arnoldi relation
/// `(A + σI) [W_j U] = [W_{j+1} C Û] G̅_j^σ` with
///
/// ```text
/// G̅_j^σ = [ H̄_j^σ   σ W_{j+1}ᴴU ]
///         [ B_j     I + σ CᴴU   ]
///         [ 0       σ N         ]
/// ```
///
/// where `U − W_{j+1}W_{j+1}ᴴU − CCᴴU = Û N` is a thin QR factorization.
#[derive(Clone, Debug)]
pub struct AugmentedShiftOperator {
    pub g_bar_sigma: DenseBlock,
    /// `W_{j+1}ᴴ U`.
    pub w_h_u: DenseBlock,
    /// `Cᴴ U`.
    pub c_h_u: DenseBlock,
    pub n_factor: DenseBlock,
    pub u_hat: DenseBlock,
    pub sigma: C64,
}

impl AugmentedShiftOperator {
    /// `[W_{j+1} C Û]`.
    pub fn left_basis(&self, arn: &BlockArnoldiState, space: &RecycleSpace) -> Result<DenseBlock> {
        DenseBlock::hstack(&[arn.basis(), space.c(), &self.u_hat])
    }
}

/// `U − W WᴴU − C CᴴU` by two passes of classical Gram–Schmidt. Returns the
/// remainder with the accumulated `WᴴU` and `CᴴU`.
pub(crate) fn split_recycle_space(w: &DenseBlock, space: &RecycleSpace) -> (DenseBlock, DenseBlock, DenseBlock) {
    let k = space.k();
    let mut z = space.u().clone();
    let mut whu = DenseBlock::zeros(w.n_cols(), k);
    let mut chu = DenseBlock::zeros(k, k);
    for _ in 0..2 {
        let cz = space.c().adjoint_mul(&z);
        let wz = w.adjoint_mul(&z);
        for j in 0..k {
            let col = z.col_mut(j);
            for (p, c) in space.c().columns().enumerate() {
                axpy(-cz[(p, j)], c, col);
            }
            for (p, wp) in w.columns().enumerate() {
                axpy(-wz[(p, j)], wp, col);
            }
        }
        chu = chu.add(&cz);
        whu = whu.add(&wz);
    }
    (z, whu, chu)
}

/// Assembles `G̅_j^σ` for a projected block Arnoldi state built with
/// `space.c()` as projector.
pub fn build_augmented_operator(
    space: &RecycleSpace,
    arn: &BlockArnoldiState,
    sigma: C64,
) -> Result<AugmentedShiftOperator> {
    let k = space.k();
    if k > 0 && !arn.is_projected() {
        return Err(Error::InvalidConfig(
            "augmented operator needs a block Arnoldi state projected against the recycle space".into(),
        ));
    }
    let hs = arn.shifted_hess(sigma);
    let (rows_w, cols_w) = (hs.n_rows(), hs.n_cols());
    if k == 0 {
        return Ok(AugmentedShiftOperator {
            g_bar_sigma: hs,
            w_h_u: DenseBlock::zeros(rows_w, 0),
            c_h_u: DenseBlock::zeros(0, 0),
            n_factor: DenseBlock::zeros(0, 0),
            u_hat: DenseBlock::zeros(space.n(), 0),
            sigma,
        });
    }
    let (z, whu, chu) = split_recycle_space(arn.basis(), space);
    let f = householder_qr(&z);
    let smallest = (0..k).map(|j| f.r[(j, j)].norm()).fold(f64::INFINITY, f64::min);
    if smallest <= AUGMENTATION_RANK_TOL * space.u().frobenius_norm() {
        return Err(Error::RankDeficientAugmentation { smallest });
    }
    let mut g = DenseBlock::zeros(rows_w + 2 * k, cols_w + k);
    g.set_block(0, 0, &hs);
    g.set_block(rows_w, 0, &arn.coupling());
    g.set_block(0, cols_w, &whu.scaled(sigma));
    let mut mid = chu.scaled(sigma);
    for i in 0..k {
        mid[(i, i)] += c64(1.0);
    }
    g.set_block(rows_w, cols_w, &mid);
    g.set_block(rows_w + k, cols_w, &f.r.scaled(sigma));
    Ok(AugmentedShiftOperator {
        g_bar_sigma: g,
        w_h_u: whu,
        c_h_u: chu,
        n_factor: f.r,
        u_hat: f.q,
        sigma,
    })
}
