use crate::dense::DenseBlock;
use crate::error::{Error, Result};
use crate::kernels::eigenvalues;

/// Largest principal angle between `span(X)` and `span(Y)`, both with
/// orthonormal columns of equal count.
///
/// Computed as `asin ‖X − Y(YᴴX)‖₂`, which stays accurate for tiny angles
/// where the cosine form loses everything to rounding.
pub fn subspace_equality_angle(x: &DenseBlock, y: &DenseBlock) -> Result<f64> {
    if x.n_cols() != y.n_cols() {
        return Err(Error::DimensionMismatch {
            context: "subspace_equality_angle column counts",
            expected: x.n_cols(),
            found: y.n_cols(),
        });
    }
    if x.n_rows() != y.n_rows() {
        return Err(Error::DimensionMismatch {
            context: "subspace_equality_angle row counts",
            expected: x.n_rows(),
            found: y.n_rows(),
        });
    }
    if x.n_cols() == 0 {
        return Ok(0.0);
    }
    let m = x.sub(&y.matmul(&y.adjoint_mul(x)));
    let gram = m.adjoint_mul(&m);
    let lmax = eigenvalues(&gram)?
        .into_iter()
        .map(|v| v.re)
        .fold(0.0, f64::max);
    Ok(lmax.sqrt().min(1.0).asin())
}
