use super::lu::perturbed_solve;
use super::qr::Reflector;
use crate::dense::{axpy, dot, norm2, scale, DenseBlock};
use crate::error::{Error, Result};
use crate::{c64, random, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenOrdering {
    ModulusAscending,
    ModulusDescending,
}

#[derive(Clone, Debug)]
pub struct EigenPairs {
    pub values: Vec<C64>,
    /// Unit-norm eigenvectors, one column per value.
    pub vectors: DenseBlock,
    pub ordering: EigenOrdering,
    /// `‖M v − λ v‖` for each pair against the source matrix.
    pub residuals: Vec<f64>,
}

const SWEEPS_PER_EIGENVALUE: usize = 60;

/// Unitary reduction to upper-Hessenberg form (eigenvalues preserved).
pub fn reduce_to_hessenberg(m: &DenseBlock) -> DenseBlock {
    let n = m.n_rows();
    let mut a = m.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = a.col(k)[k + 1..].to_vec();
        let (h, alpha) = Reflector::new(k + 1, &x);
        for c in (k + 1)..n {
            h.apply(a.col_mut(c));
        }
        a[(k + 1, k)] = alpha;
        for i in (k + 2)..n {
            a[(i, k)] = C64::default();
        }
        if h.tau != 0.0 {
            for i in 0..n {
                let mut s = C64::default();
                for (p, vp) in h.v.iter().enumerate() {
                    s += a[(i, k + 1 + p)] * vp;
                }
                s *= h.tau;
                for (p, vp) in h.v.iter().enumerate() {
                    a[(i, k + 1 + p)] -= s * vp.conj();
                }
            }
        }
    }
    a
}

fn is_hessenberg(m: &DenseBlock) -> bool {
    (0..m.n_cols()).all(|j| ((j + 2)..m.n_rows()).all(|i| m[(i, j)] == C64::default()))
}

/// Rotation `[c s; −s̄ c]` taking `(a, b)` to `(r, 0)`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    if b == C64::default() {
        return (1.0, C64::default());
    }
    if a == C64::default() {
        return (0.0, b.conj() / b.norm());
    }
    let r = a.norm().hypot(b.norm());
    let c = a.norm() / r;
    let s = (a / a.norm()) * b.conj() / r;
    (c, s)
}

/// All eigenvalues of a square matrix by single-shift complex QR iteration
/// on its Hessenberg form. Order is the deflation order (bottom first).
pub fn eigenvalues(m: &DenseBlock) -> Result<Vec<C64>> {
    let n = m.n_rows();
    assert_eq!(n, m.n_cols(), "eigenvalues need a square matrix");
    let mut h = if is_hessenberg(m) {
        m.clone()
    } else {
        reduce_to_hessenberg(m)
    };
    let scale_ref = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut values = Vec::with_capacity(n);
    let mut sweeps = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n;
    while hi > 0 {
        let hi_i = hi - 1;
        // locate the active window [l, hi_i]
        let mut l = hi_i;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let near = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let near = if near == 0.0 { scale_ref } else { near };
            if sub <= f64::EPSILON * near {
                h[(l, l - 1)] = C64::default();
                break;
            }
            l -= 1;
        }
        if l == hi_i {
            values.push(h[(hi_i, hi_i)]);
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if since_deflation >= SWEEPS_PER_EIGENVALUE {
            return Err(Error::EigenNoConvergence {
                sweeps,
                converged: values.len(),
                partial: values,
            });
        }
        sweeps += 1;
        since_deflation += 1;

        let (a, b, c, d) = (
            h[(hi_i - 1, hi_i - 1)],
            h[(hi_i - 1, hi_i)],
            h[(hi_i, hi_i - 1)],
            h[(hi_i, hi_i)],
        );
        let mu = if since_deflation % 11 == 0 {
            // exceptional shift to break cycling
            d + c64(0.75 * c.norm()) * C64::new(0.6, 0.8)
        } else {
            let half = (a - d) * 0.5;
            let disc = (half * half + b * c).sqrt();
            let m1 = (a + d) * 0.5 + disc;
            let m2 = (a + d) * 0.5 - disc;
            if (m1 - d).norm() <= (m2 - d).norm() {
                m1
            } else {
                m2
            }
        };

        for k in l..=hi_i {
            h[(k, k)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi_i - l);
        for k in l..hi_i {
            let (cs, sn) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi_i {
                let (x, y) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = x * cs + sn * y;
                h[(k + 1, j)] = -sn.conj() * x + y * cs;
            }
            h[(k + 1, k)] = C64::default();
            rots.push((cs, sn));
        }
        for (off, &(cs, sn)) in rots.iter().enumerate() {
            let k = l + off;
            for i in l..=(k + 1) {
                let (x, y) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = x * cs + sn.conj() * y;
                h[(i, k + 1)] = -sn * x + y * cs;
            }
        }
        for k in l..=hi_i {
            h[(k, k)] += mu;
        }
    }
    Ok(values)
}

fn order_values(values: &mut [C64], want: EigenOrdering) {
    values.sort_by(|x, y| {
        let primary = match want {
            EigenOrdering::ModulusAscending => x.norm().total_cmp(&y.norm()),
            EigenOrdering::ModulusDescending => y.norm().total_cmp(&x.norm()),
        };
        primary
            .then(y.re.total_cmp(&x.re))
            .then(y.im.total_cmp(&x.im))
    });
}

/// `count` eigenpairs of square `h` under the requested ordering. Values
/// come from shifted QR iteration, vectors from inverse iteration on `h`
/// itself; vectors for (nearly) repeated values are kept orthogonal.
pub fn hessenberg_eigen(h: &DenseBlock, want: EigenOrdering, count: usize) -> Result<EigenPairs> {
    let n = h.n_rows();
    if h.n_cols() != n {
        return Err(Error::DimensionMismatch {
            context: "hessenberg_eigen needs a square matrix",
            expected: n,
            found: h.n_cols(),
        });
    }
    if count > n {
        return Err(Error::InvalidConfig(format!(
            "requested {count} eigenpairs of a {n}×{n} matrix"
        )));
    }
    let mut values = eigenvalues(h)?;
    order_values(&mut values, want);
    values.truncate(count);

    let hnorm = h.frobenius_norm();
    let cluster = 1e-8 * hnorm.max(f64::MIN_POSITIVE);
    let mut vectors = DenseBlock::zeros(n, count);
    let mut residuals = Vec::with_capacity(count);
    for (idx, &lambda) in values.iter().enumerate() {
        let mut rng = random::rng(random::derive_seed(0x5EED_E16E, idx as u64));
        let mut v = random::unit_vector(&mut rng, n);
        let twins: Vec<usize> = (0..idx).filter(|&p| (values[p] - lambda).norm() <= cluster).collect();
        for _ in 0..3 {
            let mut x = perturbed_solve(h, lambda, &v);
            for _ in 0..2 {
                for &p in &twins {
                    let coef = dot(vectors.col(p), &x);
                    axpy(-coef, vectors.col(p), &mut x);
                }
            }
            let nrm = norm2(&x);
            if !nrm.is_finite() || nrm == 0.0 {
                break;
            }
            scale(c64(1.0 / nrm), &mut x);
            v = x;
        }
        let mut hv = h.mul_vec(&v);
        axpy(-lambda, &v, &mut hv);
        residuals.push(norm2(&hv));
        vectors.set_col(idx, &v);
    }
    Ok(EigenPairs {
        values,
        vectors,
        ordering: want,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_largest() {
        let h = DenseBlock::from_diagonal(&[c64(1.0), c64(2.0), c64(3.0)]);
        let e = hessenberg_eigen(&h, EigenOrdering::ModulusDescending, 1).unwrap();
        assert!((e.values[0] - c64(3.0)).norm() < 1e-14);
        let v = e.vectors.col(0);
        assert!(v[0].norm() < 1e-12 && v[1].norm() < 1e-12);
        assert!((v[2].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_has_imaginary_pair() {
        let h = DenseBlock::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let e = hessenberg_eigen(&h, EigenOrdering::ModulusDescending, 2).unwrap();
        let mut ims: Vec<f64> = e.values.iter().map(|v| v.im).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 1.0).abs() < 1e-12 && (ims[1] - 1.0).abs() < 1e-12);
        assert!(e.values.iter().all(|v| v.re.abs() < 1e-12));
        assert!(e.residuals.iter().all(|&r| r < 1e-10));
    }

    #[test]
    fn repeated_values_get_independent_vectors() {
        let e = hessenberg_eigen(&DenseBlock::identity(3), EigenOrdering::ModulusDescending, 3).unwrap();
        assert!(e.vectors.orthonormality_error() < 1e-10);
    }
}
