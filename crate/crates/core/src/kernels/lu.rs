use crate::dense::DenseBlock;
use crate::error::{Error, Result};
use crate::{c64, C64};

/// LU factorization with partial pivoting, `P M = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: DenseBlock,
    perm: Vec<usize>,
}

impl Lu {
    /// Fails when a pivot falls below `n · ε · max|M|`.
    pub fn factor(m: &DenseBlock) -> Result<Self> {
        let n = m.n_rows();
        if m.n_cols() != n {
            return Err(Error::DimensionMismatch {
                context: "LU needs a square matrix",
                expected: n,
                found: m.n_cols(),
            });
        }
        let tiny = n.max(1) as f64 * f64::EPSILON * m.max_abs();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax <= tiny || pmax == 0.0 {
                return Err(Error::NearSingular {
                    column: k,
                    pivot: pmax,
                });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let t = lu[(p, j)];
                    lu[(p, j)] = lu[(k, j)];
                    lu[(k, j)] = t;
                }
            }
            let piv = lu[(k, k)];
            for i in (k + 1)..n {
                let l = lu[(i, k)] / piv;
                lu[(i, k)] = l;
                if l != C64::default() {
                    for j in (k + 1)..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] -= l * u;
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        let n = self.perm.len();
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in (i + 1)..n {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        x
    }

    pub fn solve(&self, rhs: &DenseBlock) -> DenseBlock {
        let mut out = DenseBlock::zeros(rhs.n_rows(), rhs.n_cols());
        for c in 0..rhs.n_cols() {
            out.set_col(c, &self.solve_vec(rhs.col(c)));
        }
        out
    }

    pub fn inverse(&self) -> DenseBlock {
        self.solve(&DenseBlock::identity(self.perm.len()))
    }
}

/// Maximum absolute column sum.
pub fn norm_1(m: &DenseBlock) -> f64 {
    m.columns()
        .map(|c| c.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// 1-norm condition number from an explicit inverse; meant for the k×k
/// matrices of the oblique projector.
pub fn condition_1(m: &DenseBlock) -> f64 {
    match Lu::factor(m) {
        Ok(lu) => norm_1(m) * norm_1(&lu.inverse()),
        Err(_) => f64::INFINITY,
    }
}

/// `M⁻¹ rhs` by partial-pivoted elimination, together with the residual
/// `‖M X − rhs‖_F`.
pub fn solve_small_dense(m: &DenseBlock, rhs: &DenseBlock) -> Result<(DenseBlock, f64)> {
    if rhs.n_rows() != m.n_rows() {
        return Err(Error::DimensionMismatch {
            context: "solve_small_dense right-hand side rows",
            expected: m.n_rows(),
            found: rhs.n_rows(),
        });
    }
    let lu = Lu::factor(m)?;
    let x = lu.solve(rhs);
    let res = m.matmul(&x).sub(rhs).frobenius_norm();
    Ok((x, res))
}

/// Solves `(M − λ I) x = b` with tiny pivots floored; used by inverse
/// iteration, where the shifted matrix is singular by design.
pub(crate) fn perturbed_solve(m: &DenseBlock, lambda: C64, b: &[C64]) -> Vec<C64> {
    let n = m.n_rows();
    let mut a = m.clone();
    for i in 0..n {
        a[(i, i)] -= lambda;
    }
    let floor = f64::EPSILON * m.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut x = b.to_vec();
    // elimination with partial pivoting, pivots floored at `floor`
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm()))
            .expect("non-empty range");
        if p != k {
            for j in 0..n {
                let t = a[(p, j)];
                a[(p, j)] = a[(k, j)];
                a[(k, j)] = t;
            }
            x.swap(p, k);
        }
        if a[(k, k)].norm() < floor {
            a[(k, k)] = c64(floor);
        }
        let piv = a[(k, k)];
        for i in (k + 1)..n {
            let l = a[(i, k)] / piv;
            if l != C64::default() {
                for j in (k + 1)..n {
                    let u = a[(k, j)];
                    a[(i, j)] -= l * u;
                }
                let xk = x[k];
                x[i] -= l * xk;
            }
        }
    }
    for i in (0..n).rev() {
        let mut acc = x[i];
        for j in (i + 1)..n {
            acc -= a[(i, j)] * x[j];
        }
        x[i] = acc / a[(i, i)];
    }
    x
}
