use super::qr::{solve_upper, Reflector};
use crate::dense::{norm2, DenseBlock};
use crate::error::Result;
use crate::C64;

/// Householder least squares `min ‖g − H y‖` over a matrix that grows by
/// columns (and rows) one step at a time, as Arnoldi produces it.
///
/// Rows appended later are zero in every earlier column, so reflectors built
/// for earlier columns act as the identity on them.
#[derive(Clone, Debug)]
pub struct ProgressiveLsq {
    reflectors: Vec<Reflector>,
    /// Columns of the triangular factor, column `j` of length `j + 1`.
    r_cols: Vec<Vec<C64>>,
    /// `Qᴴ g`, zero-padded to the current row count.
    qtg: Vec<C64>,
}

impl ProgressiveLsq {
    pub fn new(g: &[C64]) -> Self {
        Self {
            reflectors: Vec::new(),
            r_cols: Vec::new(),
            qtg: g.to_vec(),
        }
    }

    pub fn n_cols(&self) -> usize {
        self.r_cols.len()
    }

    pub fn n_rows(&self) -> usize {
        self.qtg.len()
    }

    /// Appends column `h`; its length sets the row count, which may not
    /// shrink.
    pub fn push_column(&mut self, h: &[C64]) {
        let j = self.r_cols.len();
        assert!(h.len() >= self.qtg.len() && h.len() > j, "column too short");
        self.qtg.resize(h.len(), C64::default());
        let mut col = h.to_vec();
        for refl in &self.reflectors {
            refl.apply(&mut col);
        }
        let (refl, alpha) = Reflector::new(j, &col[j..]);
        refl.apply(&mut self.qtg);
        col.truncate(j + 1);
        col[j] = alpha;
        self.reflectors.push(refl);
        self.r_cols.push(col);
    }

    /// `‖g − H y‖` at the minimizer, read off the transformed right-hand side.
    pub fn residual_norm(&self) -> f64 {
        norm2(&self.qtg[self.r_cols.len()..])
    }

    /// `Qᴴ g` at the current row count.
    pub fn transformed_rhs(&self) -> &[C64] {
        &self.qtg
    }

    /// Applies `Qᴴ` to `v`, zero-padding it to the current row count.
    pub fn apply_adjoint(&self, v: &mut Vec<C64>) {
        assert!(v.len() <= self.qtg.len(), "vector longer than the factored matrix");
        v.resize(self.qtg.len(), C64::default());
        for refl in &self.reflectors {
            refl.apply(v);
        }
    }

    /// Square triangular factor of the columns pushed so far.
    pub fn triangular_factor(&self) -> DenseBlock {
        let k = self.r_cols.len();
        let mut r = DenseBlock::zeros(k, k);
        for (j, col) in self.r_cols.iter().enumerate() {
            r.col_mut(j)[..=j].copy_from_slice(col);
        }
        r
    }

    pub fn solve(&self) -> Result<Vec<C64>> {
        solve_upper(&self.triangular_factor(), &self.qtg[..self.r_cols.len()])
    }
}

/// One-shot `argmin ‖g − H y‖` for `H` with at least as many rows as
/// columns. Returns the minimizer and the residual norm.
pub fn hessenberg_least_squares(h: &DenseBlock, g: &[C64]) -> Result<(Vec<C64>, f64)> {
    assert_eq!(h.n_rows(), g.len(), "right-hand side length");
    let mut lsq = ProgressiveLsq::new(g);
    for j in 0..h.n_cols() {
        lsq.push_column(h.col(j));
    }
    Ok((lsq.solve()?, lsq.residual_norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn exact_and_pure_residual_cases() {
        let h = DenseBlock::from_real_rows(&[&[1.0], &[0.0]]);
        let (y, res) = hessenberg_least_squares(&h, &[c64(2.0), c64(0.0)]).unwrap();
        assert_eq!(y, vec![c64(2.0)]);
        assert_eq!(res, 0.0);
        let (y, res) = hessenberg_least_squares(&h, &[c64(0.0), c64(3.0)]).unwrap();
        assert_eq!(y, vec![c64(0.0)]);
        assert_eq!(res, 3.0);
    }

    #[test]
    fn growing_rows_matches_one_shot() {
        let h = DenseBlock::from_real_rows(&[&[2.0, 1.0], &[1.0, 3.0], &[0.0, 0.5]]);
        let g = [c64(1.0), c64(0.0), c64(0.0)];
        let (y, res) = hessenberg_least_squares(&h, &g).unwrap();
        let mut p = ProgressiveLsq::new(&g[..2]);
        p.push_column(&h.col(0)[..2]);
        p.push_column(h.col(1));
        let y2 = p.solve().unwrap();
        for (a, b) in y.iter().zip(&y2) {
            assert!((a - b).norm() < 1e-15);
        }
        assert!((res - p.residual_norm()).abs() < 1e-15);
    }
}
