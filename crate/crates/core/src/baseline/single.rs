use crate::arnoldi::ArnoldiState;
use crate::common::{true_residual, DRIFT_TOL, STAGNATION_TOL};
use crate::dense::{axpy, norm2, DenseBlock};
use crate::error::{Error, Result};
use crate::kernels::{solve_small_dense, ProgressiveLsq};
use crate::report::{SolveReport, SolverConfig};
use crate::sparse::SparseMatrix;
use crate::{c64, C64};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Projection {
    MinimumResidual,
    Galerkin,
}

fn check_dims(a: &SparseMatrix, b: &[C64], x0: &[C64]) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            context: "solver needs a square matrix",
            expected: a.n_rows(),
            found: a.n_cols(),
        });
    }
    for (len, context) in [(b.len(), "right-hand side length"), (x0.len(), "initial guess length")] {
        if len != a.n_rows() {
            return Err(Error::DimensionMismatch {
                context,
                expected: a.n_rows(),
                found: len,
            });
        }
    }
    Ok(())
}

/// Galerkin solve `H_j y = β e₁` on the leading square part of `hbar`.
/// Returns `y` and the FOM residual norm `|h_{j+1,j}| |y_j|`.
pub(crate) fn fom_coefficients(hbar: &DenseBlock, g: &[C64]) -> Result<(Vec<C64>, f64)> {
    let j = hbar.n_cols();
    let h = hbar.sub_block(0..j, 0..j);
    let rhs = DenseBlock::from_col_major(j, 1, g[..j].to_vec())?;
    let (y, _) = solve_small_dense(&h, &rhs)?;
    let y = y.into_entries();
    let res = if hbar.n_rows() > j {
        (0..hbar.n_rows() - j)
            .map(|p| {
                let row = j + p;
                (0..j).map(|c| hbar[(row, c)] * y[c]).sum::<C64>().norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    } else {
        0.0
    };
    Ok((y, res))
}

fn restarted(
    a: &SparseMatrix,
    b: &[C64],
    x0: &[C64],
    cfg: &SolverConfig,
    kind: Projection,
) -> Result<(Vec<C64>, SolveReport)> {
    cfg.validate()?;
    check_dims(a, b, x0)?;
    let name = match kind {
        Projection::MinimumResidual => "gmres",
        Projection::Galerkin => "fom",
    };
    let bnorm = norm2(b);
    let mut report = SolveReport::new(name, &[C64::default()], vec![bnorm]);
    let mut x = x0.to_vec();
    let mut r = if x0.iter().all(|v| *v == C64::default()) {
        b.to_vec()
    } else {
        report.count_single();
        true_residual(a, C64::default(), b, x0)
    };
    let mut rnorm = norm2(&r);
    report.initial_residual_norms[0] = rnorm;
    let thr = cfg.threshold(bnorm);
    report.converged[0] = rnorm <= thr;
    let mut iter = 0;

    for cycle in 1..=cfg.max_cycles {
        if report.converged[0] {
            break;
        }
        report.cycles = cycle;
        let (mut arn, beta) = ArnoldiState::new(&r)?;
        let mut lsq = ProgressiveLsq::new(&[c64(beta)]);
        // last Galerkin iterate that exists: (steps, y, residual norm)
        let mut fom_last: Option<(usize, Vec<C64>, f64)> = None;
        let mut shown = rnorm;
        for _ in 0..cfg.cycle_length {
            let broke = arn.step(a)?;
            report.count_single();
            iter += 1;
            let res = match kind {
                Projection::MinimumResidual => {
                    lsq.push_column(arn.last_column().expect("a step was taken"));
                    lsq.residual_norm()
                }
                Projection::Galerkin => {
                    let mut g = vec![C64::default(); arn.steps() + 1];
                    g[0] = c64(beta);
                    match fom_coefficients(&arn.hess(), &g) {
                        Ok((y, res)) => {
                            fom_last = Some((arn.steps(), y, res));
                            res
                        }
                        Err(Error::NearSingular { .. }) | Err(Error::SingularFactor { .. }) => shown,
                        Err(e) => return Err(e),
                    }
                }
            };
            shown = res;
            let conv = res <= thr;
            report.record(0, cycle, iter, res, conv);
            if conv || broke {
                break;
            }
        }

        let hbar = arn.hess();
        let (steps, y) = match kind {
            Projection::MinimumResidual => (arn.steps(), lsq.solve()?),
            Projection::Galerkin => match fom_last {
                Some((s, y, _)) => {
                    if s < arn.steps() {
                        report.note(format!(
                            "cycle {cycle}: Galerkin system singular at step {}, using step {s}",
                            arn.steps()
                        ));
                    }
                    (s, y)
                }
                None => {
                    report.note(format!("cycle {cycle}: no Galerkin iterate exists; cycle skipped"));
                    (0, Vec::new())
                }
            },
        };
        let basis = arn.basis();
        for (c, yc) in y.iter().enumerate() {
            axpy(*yc, basis.col(c), &mut x);
        }
        // r ← r − V_{s+1} H̄_s y
        let rows = (steps + 1).min(basis.n_cols());
        for p in 0..rows {
            let hy: C64 = (0..steps).map(|c| hbar[(p, c)] * y[c]).sum();
            axpy(-hy, basis.col(p), &mut r);
        }
        let new_norm = norm2(&r);
        let rt = true_residual(a, C64::default(), b, &x);
        let gap = norm2(&rt.iter().zip(&r).map(|(u, v)| u - v).collect::<Vec<_>>());
        if gap > DRIFT_TOL * bnorm.max(f64::MIN_POSITIVE) {
            report.note(format!("cycle {cycle}: recurrence residual drifted by {:.3e} (relative)", gap / bnorm));
        }
        if rnorm - new_norm < STAGNATION_TOL * rnorm {
            report.note(format!("cycle {cycle}: stagnation (residual {new_norm:.6e})"));
        }
        rnorm = new_norm;
        report.converged[0] = rnorm <= thr;
    }
    report.iterations = iter;
    report.final_residual_norms[0] = rnorm;
    report.true_residual_norms[0] = norm2(&true_residual(a, C64::default(), b, &x));
    Ok((x, report))
}

/// Restarted GMRES(m): each cycle minimizes `‖b − A(x + t)‖` over
/// `t ∈ 𝒦_m(A, r)`.
pub fn gmres_restarted(
    a: &SparseMatrix,
    b: &[C64],
    x0: &[C64],
    cfg: &SolverConfig,
) -> Result<(Vec<C64>, SolveReport)> {
    restarted(a, b, x0, cfg, Projection::MinimumResidual)
}

/// Restarted FOM(m): each cycle imposes the Galerkin condition
/// `H_m y = β e₁`, so the cycle-end residual is parallel to `v_{m+1}`.
pub fn fom_restarted(
    a: &SparseMatrix,
    b: &[C64],
    x0: &[C64],
    cfg: &SolverConfig,
) -> Result<(Vec<C64>, SolveReport)> {
    restarted(a, b, x0, cfg, Projection::Galerkin)
}
