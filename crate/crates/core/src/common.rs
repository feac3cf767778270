//! Bookkeeping shared by the solvers.

use crate::dense::{norm2, DenseBlock};
use crate::family::ShiftedFamily;
use crate::report::SolveReport;
use crate::sparse::SparseMatrix;
use crate::C64;

/// Relative per-cycle residual reduction below which a cycle is flagged as
/// stagnating.
pub(crate) const STAGNATION_TOL: f64 = 1e-14;

/// Allowed gap between recurrence and recomputed residuals, relative to
/// `‖b‖`, before a note is written.
pub(crate) const DRIFT_TOL: f64 = 1e-8;

/// `b − (A + σ I) x` without touching the instrumentation counters.
pub(crate) fn true_residual(a: &SparseMatrix, sigma: C64, b: &[C64], x: &[C64]) -> Vec<C64> {
    let mut r = a.matvec(x).expect("dimensions checked by the caller");
    for ((ri, bi), xi) in r.iter_mut().zip(b).zip(x) {
        *ri = bi - (*ri + sigma * xi);
    }
    r
}

/// Compares recurrence residuals with recomputed ones and notes drift.
pub(crate) fn check_drift(
    report: &mut SolveReport,
    family: &ShiftedFamily,
    x: &DenseBlock,
    r_rec: &DenseBlock,
    cycle: usize,
) {
    for i in 0..family.len() {
        let rt = family.residual(i, x.col(i));
        let gap: f64 = norm2(
            &rt.iter()
                .zip(r_rec.col(i))
                .map(|(a, b)| a - b)
                .collect::<Vec<_>>(),
        );
        let scale = report.rhs_norms[i].max(f64::MIN_POSITIVE);
        if gap > DRIFT_TOL * scale {
            report.note(format!(
                "cycle {cycle}: shift {i} recurrence residual drifted from the true residual by {:.3e} (relative)",
                gap / scale
            ));
        }
    }
}

/// Fills the end-of-solve residual fields.
pub(crate) fn finalize(report: &mut SolveReport, family: &ShiftedFamily, x: &DenseBlock, r_rec: &DenseBlock) {
    for i in 0..family.len() {
        report.final_residual_norms[i] = norm2(r_rec.col(i));
        report.true_residual_norms[i] = norm2(&family.residual(i, x.col(i)));
    }
}

pub(crate) fn column_norms(b: &DenseBlock) -> Vec<f64> {
    b.columns().map(norm2).collect()
}
