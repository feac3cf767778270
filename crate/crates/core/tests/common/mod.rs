#![allow(dead_code)]

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use sbkrylov::random::{rng, unit_columns};
use sbkrylov::{c64, generate_convection_diffusion, DenseBlock, ShiftedFamily, SparseMatrix, C64};

pub type NaMat = DMatrix<C64>;

pub fn to_na(m: &DenseBlock) -> NaMat {
    NaMat::from_fn(m.n_rows(), m.n_cols(), |i, j| m[(i, j)])
}

pub fn from_na(m: &NaMat) -> DenseBlock {
    let mut out = DenseBlock::zeros(m.nrows(), m.ncols());
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out[(i, j)] = m[(i, j)];
        }
    }
    out
}

pub fn col_na(v: &[C64]) -> NaMat {
    NaMat::from_column_slice(v.len(), 1, v)
}

/// Random sparse matrix with about `per_row` off-diagonal entries per row
/// and a diagonal shifted by `diag`, complex entries when `complex`.
pub fn random_sparse(n: usize, per_row: usize, diag: f64, complex: bool, seed: u64) -> SparseMatrix {
    let mut g = rng(seed);
    let mut t = Vec::new();
    for i in 0..n {
        let im = if complex { g.random_range(-1.0..1.0) } else { 0.0 };
        t.push((i, i, C64::new(diag + g.random_range(-1.0..1.0), im)));
        for _ in 0..per_row {
            let j = g.random_range(0..n);
            let im = if complex { g.random_range(-1.0..1.0) } else { 0.0 };
            t.push((i, j, C64::new(g.random_range(-1.0..1.0), im)));
        }
    }
    SparseMatrix::from_triplets(n, n, t).unwrap()
}

pub fn random_block(n: usize, l: usize, seed: u64) -> DenseBlock {
    unit_columns(&mut rng(seed), n, l)
}

/// Orthonormal basis of the column span of `m` (nalgebra QR).
pub fn orth(m: &NaMat) -> NaMat {
    let qr = m.clone().qr();
    qr.q()
}

/// Largest principal angle between the spans of orthonormal `x` and `y`,
/// via the SVD of `x − y yᴴ x`.
pub fn max_angle(x: &NaMat, y: &NaMat) -> f64 {
    let d = x - y * (y.adjoint() * x);
    let s = d.singular_values();
    s.iter().copied().fold(0.0, f64::max).min(1.0).asin()
}

/// `A X` densely, for oracles.
pub fn dense_apply(a: &SparseMatrix, x: &NaMat) -> NaMat {
    to_na(&a.to_dense()) * x
}

/// Orthonormal basis of span{F, 𝒯F, …, 𝒯^{j−1}F} with
/// `𝒯(X) = P(A X + X D̃)`, `P = I − C Cᴴ` (identity without `c`), built from
/// explicit operator powers, each power normalized to unit Frobenius norm.
pub fn sylvester_krylov(a: &NaMat, d: &NaMat, f: &NaMat, c: Option<&NaMat>, j: usize) -> NaMat {
    let proj = |x: NaMat| match c {
        Some(c) => &x - c * (c.adjoint() * &x),
        None => x,
    };
    let mut blocks = vec![f.clone()];
    for _ in 1..j {
        let prev = blocks.last().unwrap();
        let mut next = proj(a * prev + prev * d);
        let nrm = next.norm();
        next /= C64::new(nrm, 0.0);
        blocks.push(next);
    }
    let mut all = NaMat::zeros(f.nrows(), f.ncols() * j);
    for (i, b) in blocks.iter().enumerate() {
        all.view_mut((0, i * f.ncols()), (f.nrows(), f.ncols())).copy_from(b);
    }
    orth(&all)
}

pub fn cd_family(grid: usize, convection: f64, shifts: &[f64], seed: u64) -> ShiftedFamily {
    let a = Arc::new(generate_convection_diffusion(grid, convection).unwrap());
    let n = a.n_rows();
    let rhs = random_block(n, shifts.len(), seed);
    ShiftedFamily::new(a, shifts.iter().map(|&s| c64(s)).collect(), rhs).unwrap()
}

pub fn diag_matrix(values: &[f64]) -> Arc<SparseMatrix> {
    Arc::new(SparseMatrix::from_diagonal(&values.iter().map(|&v| c64(v)).collect::<Vec<_>>()))
}

/// Dense solution of `(A + σ I) x = b`.
pub fn dense_solve(a: &SparseMatrix, sigma: C64, b: &[C64]) -> Vec<C64> {
    let m = to_na(&a.to_dense()) + NaMat::identity(a.n_rows(), a.n_rows()) * sigma;
    let x = m.lu().solve(&col_na(b)).expect("nonsingular");
    x.as_slice().to_vec()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Sine of the angle between two nonzero vectors, `‖u − v vᴴu/‖v‖²‖/‖u‖`.
pub fn sine(u: &[C64], v: &[C64]) -> f64 {
    let vu: C64 = v.iter().zip(u).map(|(a, b)| a.conj() * b).sum();
    let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let coef = vu / vv;
    let d: Vec<C64> = u.iter().zip(v).map(|(a, b)| a - b * coef).collect();
    norm(&d) / norm(u)
}

/// `‖b − (A + σ I) x‖`.
pub fn true_residual(a: &SparseMatrix, sigma: C64, b: &[C64], x: &[C64]) -> f64 {
    let ax = a.matvec(x).unwrap();
    let r: Vec<C64> = b.iter().zip(&ax).zip(x).map(|((bi, axi), xi)| bi - axi - sigma * xi).collect();
    norm(&r)
}
