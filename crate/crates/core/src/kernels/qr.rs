use crate::dense::{dot, norm2, DenseBlock};
use crate::error::{Error, Result};
use crate::{c64, C64};

/// Thin QR factors `M = q r`.
#[derive(Clone, Debug, PartialEq)]
pub struct QrFactors {
    pub q: DenseBlock,
    pub r: DenseBlock,
}

/// `I − τ v vᴴ` acting on rows `offset..offset + v.len()`, with `v[0] = 1`.
#[derive(Clone, Debug)]
pub(crate) struct Reflector {
    pub offset: usize,
    pub v: Vec<C64>,
    pub tau: f64,
}

impl Reflector {
    /// Reflector mapping `x` to `α e₁` with `|α| = ‖x‖`. Returns `α` too.
    pub fn new(offset: usize, x: &[C64]) -> (Self, C64) {
        let nrm = norm2(x);
        if nrm == 0.0 {
            return (
                Self {
                    offset,
                    v: vec![c64(1.0); 1],
                    tau: 0.0,
                },
                C64::default(),
            );
        }
        let x0 = x[0];
        let phase = if x0 == C64::default() { c64(1.0) } else { x0 / x0.norm() };
        let alpha = -phase * nrm;
        let mut v: Vec<C64> = x.to_vec();
        v[0] -= alpha;
        let v0 = v[0];
        for vi in v.iter_mut() {
            *vi /= v0;
        }
        let vv = norm2(&v).powi(2);
        (
            Self {
                offset,
                v,
                tau: 2.0 / vv,
            },
            alpha,
        )
    }

    /// `y ← (I − τ v vᴴ) y`; `y` must cover the reflector's rows.
    pub fn apply(&self, y: &mut [C64]) {
        if self.tau == 0.0 {
            return;
        }
        let seg = &mut y[self.offset..self.offset + self.v.len()];
        let s = dot(&self.v, seg) * self.tau;
        for (yi, vi) in seg.iter_mut().zip(&self.v) {
            *yi -= s * vi;
        }
    }
}

/// Householder QR of `m` (`n_rows ≥ n_cols`), with the diagonal of `r`
/// rotated to be real and non-negative.
pub fn householder_qr(m: &DenseBlock) -> QrFactors {
    let (n, k) = (m.n_rows(), m.n_cols());
    assert!(n >= k, "householder_qr needs n_rows ≥ n_cols ({n} < {k})");
    let mut a = m.clone();
    let mut refl = Vec::with_capacity(k);
    for j in 0..k {
        let (h, alpha) = Reflector::new(j, &a.col(j)[j..]);
        for c in (j + 1)..k {
            h.apply(a.col_mut(c));
        }
        let col = a.col_mut(j);
        col[j] = alpha;
        for v in col[j + 1..].iter_mut() {
            *v = C64::default();
        }
        refl.push(h);
    }
    let mut q = DenseBlock::eye(n, k);
    for c in 0..k {
        for h in refl.iter().rev() {
            h.apply(q.col_mut(c));
        }
    }
    let mut r = a.sub_block(0..k, 0..k);
    for j in 0..k {
        let d = r[(j, j)];
        if d != C64::default() {
            let ph = d / d.norm();
            for c in j..k {
                r[(j, c)] *= ph.conj();
            }
            for v in q.col_mut(j) {
                *v *= ph;
            }
            r[(j, j)] = c64(d.norm());
        }
    }
    QrFactors { q, r }
}

/// QR followed by a rank decision: rank counts diagonal entries of `r`
/// above `tol` times the largest one.
pub fn rank_revealing_qr(m: &DenseBlock, tol: f64) -> (QrFactors, usize, Vec<usize>) {
    assert!(tol > 0.0, "tolerance must be positive");
    let f = householder_qr(m);
    let k = f.r.n_cols();
    let dmax = (0..k).map(|j| f.r[(j, j)].norm()).fold(0.0, f64::max);
    let dependent: Vec<usize> = (0..k)
        .filter(|&j| dmax == 0.0 || f.r[(j, j)].norm() <= tol * dmax)
        .collect();
    let rank = k - dependent.len();
    (f, rank, dependent)
}

/// Solves `r x = b` for upper-triangular `r` (square leading part of `r`).
pub fn solve_upper(r: &DenseBlock, b: &[C64]) -> Result<Vec<C64>> {
    let k = r.n_cols();
    let dmax = (0..k).map(|j| r[(j, j)].norm()).fold(0.0, f64::max);
    let mut x = b[..k].to_vec();
    for j in (0..k).rev() {
        let d = r[(j, j)];
        if d.norm() <= f64::EPSILON * dmax || d == C64::default() {
            return Err(Error::SingularFactor { column: j });
        }
        x[j] /= d;
        let xj = x[j];
        for i in 0..j {
            x[i] -= r[(i, j)] * xj;
        }
    }
    Ok(x)
}

/// Least-squares solution of `m X ≈ rhs` for full-column-rank `m`.
pub fn qr_least_squares(m: &DenseBlock, rhs: &DenseBlock) -> Result<DenseBlock> {
    let f = householder_qr(m);
    let qtb = f.q.adjoint_mul(rhs);
    let mut out = DenseBlock::zeros(m.n_cols(), rhs.n_cols());
    for c in 0..rhs.n_cols() {
        out.set_col(c, &solve_upper(&f.r, qtb.col(c))?);
    }
    Ok(out)
}
