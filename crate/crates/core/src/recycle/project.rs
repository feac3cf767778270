use super::space::RecycleSpace;
use crate::dense::{axpy, dot, DenseBlock};
use crate::error::{Error, Result};
use crate::kernels::{condition_1, Lu};
use crate::C64;

/// Condition estimate of `Cᴴ(C + σU)` above which the oblique projector is
/// refused.
pub const OBLIQUE_CONDITION_LIMIT: f64 = 1e12;

/// `v ← (I − C Cᴴ) v` by classical Gram–Schmidt with one
/// reorthogonalization pass.
pub(crate) fn project_out(c: &DenseBlock, v: &mut [C64]) {
    for _ in 0..2 {
        let coefs = c.adjoint_mul_vec(v);
        for (j, coef) in coefs.iter().enumerate() {
            axpy(-coef, c.col(j), v);
        }
    }
}

/// `R − C (Cᴴ R)` column by column.
pub fn orthogonal_residual_projection(space: &RecycleSpace, r: &DenseBlock) -> Result<DenseBlock> {
    if r.n_rows() != space.n() {
        return Err(Error::DimensionMismatch {
            context: "projected block rows",
            expected: space.n(),
            found: r.n_rows(),
        });
    }
    let mut out = r.clone();
    for j in 0..out.n_cols() {
        project_out(space.c(), out.col_mut(j));
    }
    Ok(out)
}

/// Oblique projection for one shift, with `M = Cᴴ(C + σU) = I + σ CᴴU`
/// factored once:
/// `r̂ = r − (C + σU) M⁻¹ Cᴴ r` and `x̂ = x + U M⁻¹ Cᴴ r`.
#[derive(Clone, Debug)]
pub(crate) struct ObliqueProjector {
    sigma: C64,
    lu: Lu,
}

impl ObliqueProjector {
    pub fn new(space: &RecycleSpace, sigma: C64) -> Result<Self> {
        let mut m = space.c().adjoint_mul(space.u()).scaled(sigma);
        for i in 0..space.k() {
            m[(i, i)] += C64::new(1.0, 0.0);
        }
        let condition = condition_1(&m);
        if !(condition <= OBLIQUE_CONDITION_LIMIT) {
            return Err(Error::ObliqueProjectorSingular { shift: sigma, condition });
        }
        let lu = Lu::factor(&m).map_err(|_| Error::ObliqueProjectorSingular { shift: sigma, condition })?;
        Ok(Self { sigma, lu })
    }

    pub fn apply(&self, space: &RecycleSpace, r: &mut [C64], x: &mut [C64]) {
        let t: Vec<C64> = space.c().columns().map(|c| dot(c, r)).collect();
        let s = self.lu.solve_vec(&t);
        for (j, sj) in s.iter().enumerate() {
            axpy(-sj, space.c().col(j), r);
            axpy(-(self.sigma * sj), space.u().col(j), r);
            axpy(*sj, space.u().col(j), x);
        }
    }
}

/// Oblique projection of one shifted residual: returns `(r̂, x̂)` with
/// `r̂ ⊥ C` and `b − (A + σI) x̂ = r̂` whenever `b − (A + σI) x = r`.
pub fn oblique_project_shift(
    space: &RecycleSpace,
    sigma: C64,
    r: &[C64],
    x: &[C64],
) -> Result<(Vec<C64>, Vec<C64>)> {
    for (len, context) in [(r.len(), "projected residual length"), (x.len(), "projected iterate length")] {
        if len != space.n() {
            return Err(Error::DimensionMismatch {
                context,
                expected: space.n(),
                found: len,
            });
        }
    }
    let (mut r, mut x) = (r.to_vec(), x.to_vec());
    if space.is_empty() {
        return Ok((r, x));
    }
    ObliqueProjector::new(space, sigma)?.apply(space, &mut r, &mut x);
    Ok((r, x))
}
