//! Desk-scale test operators.

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;
use crate::{c64, C64};

/// 5-point discretization of `−Δu + c·u_x` on the unit square with
/// homogeneous Dirichlet boundary, `grid_m` interior points per direction
/// and central differences for the convection term.
///
/// Unknown `(i, j)` (x index `i`, y index `j`) has row `i + j·grid_m`. The
/// convection part is skew-symmetric, so the Hermitian part is the discrete
/// Laplacian and the matrix is positive-real for every `c`.
pub fn generate_convection_diffusion(grid_m: usize, convection: f64) -> Result<SparseMatrix> {
    if grid_m < 2 {
        return Err(Error::InvalidConfig(format!("grid_m must be at least 2, got {grid_m}")));
    }
    let m = grid_m;
    let h = 1.0 / (m as f64 + 1.0);
    let inv_h2 = 1.0 / (h * h);
    let diag = c64(4.0 * inv_h2);
    let east = c64(-inv_h2 + convection / (2.0 * h));
    let west = c64(-inv_h2 - convection / (2.0 * h));
    let ns = c64(-inv_h2);

    let mut t: Vec<(usize, usize, C64)> = Vec::with_capacity(5 * m * m);
    for j in 0..m {
        for i in 0..m {
            let row = i + j * m;
            if j > 0 {
                t.push((row, row - m, ns));
            }
            if i > 0 {
                t.push((row, row - 1, west));
            }
            t.push((row, row, diag));
            if i + 1 < m {
                t.push((row, row + 1, east));
            }
            if j + 1 < m {
                t.push((row, row + m, ns));
            }
        }
    }
    SparseMatrix::from_triplets(m * m, m * m, t)
}

/// Smallest eigenvalue of the 5-point Dirichlet Laplacian on a `grid_m²`
/// grid, `8 (m+1)² sin²(π / (2(m+1)))`. It bounds the field of values of
/// the convection–diffusion operator from the left.
pub fn laplacian_min_eigenvalue(grid_m: usize) -> f64 {
    let mp1 = grid_m as f64 + 1.0;
    let s = (std::f64::consts::PI / (2.0 * mp1)).sin();
    8.0 * mp1 * mp1 * s * s
}
