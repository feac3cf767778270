use super::collinear::{decollinearize, detect_collinear, DecollinearizeStrategy, COLLINEAR_TOL};
use crate::arnoldi::{BlockArnoldiOptions, BlockArnoldiState};
use crate::baseline::fom_coefficients;
use crate::common::{check_drift, column_norms, finalize, STAGNATION_TOL};
use crate::dense::{axpy, norm2, DenseBlock};
use crate::error::{Error, Result};
use crate::family::ShiftedFamily;
use crate::kernels::{hessenberg_least_squares, ProgressiveLsq};
use crate::random;
use crate::report::{SolveReport, SolverConfig};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Projection {
    MinimumResidual,
    Galerkin,
}

/// Iterates, recurrence residuals and bookkeeping carried across cycles.
#[derive(Clone, Debug)]
pub(crate) struct BlockSolve {
    pub x: DenseBlock,
    pub r: DenseBlock,
    pub thresholds: Vec<f64>,
    pub iterations: usize,
}

impl BlockSolve {
    pub fn active(&self, report: &SolveReport) -> Vec<usize> {
        (0..self.thresholds.len()).filter(|&i| !report.converged[i]).collect()
    }
}

/// `[S₀ eᵢ; 0]` of length `rows`.
pub(crate) fn start_rhs(s0: &DenseBlock, i: usize, rows: usize) -> Vec<C64> {
    let mut g = vec![C64::default(); rows];
    g[..s0.n_rows()].copy_from_slice(s0.col(i));
    g
}

/// Initial residuals, convergence flags and, when `strategy` is given and
/// the unsolved residuals are collinear, de-collinearization.
pub(crate) fn prepare(
    family: &ShiftedFamily,
    cfg: &SolverConfig,
    strategy: Option<&DecollinearizeStrategy>,
    name: &str,
) -> Result<(BlockSolve, SolveReport)> {
    cfg.validate()?;
    let rhs_norms = column_norms(family.rhs());
    let mut report = SolveReport::new(name, family.shifts(), rhs_norms.clone());
    let thresholds: Vec<f64> = rhs_norms.iter().map(|&b| cfg.threshold(b)).collect();
    if !family.zero_initial_guess() {
        report.count_block(family.len());
    }
    let mut x = family.initial_guess().clone();
    let mut r = family.initial_residuals();
    report.initial_residual_norms = column_norms(&r);
    if let Some(strategy) = strategy {
        let open: Vec<usize> = (0..family.len())
            .filter(|&i| report.initial_residual_norms[i] > thresholds[i])
            .collect();
        let sub = DenseBlock::from_columns(
            family.n(),
            &open.iter().map(|&i| r.col(i).to_vec()).collect::<Vec<_>>(),
        )?;
        if open.len() > 1 && detect_collinear(&sub, COLLINEAR_TOL)? {
            let start = family.with_x0(x.clone())?;
            let (x1, r1, frag) = decollinearize(&start, strategy)?;
            report.matvec_count += frag.matvec_count;
            report.block_matvec_count += frag.block_matvec_count;
            report.replacements.extend(frag.replacements);
            report.notes.extend(frag.notes);
            report.note(format!("initial residuals collinear; applied {:?}", strategy.kind));
            x = x1;
            r = r1;
        }
    }
    for i in 0..family.len() {
        report.converged[i] = norm2(r.col(i)) <= thresholds[i];
    }
    let state = BlockSolve {
        x,
        r,
        thresholds,
        iterations: 0,
    };
    Ok((state, report))
}

pub(crate) fn arnoldi_options(cfg: &SolverConfig, cycle: usize) -> BlockArnoldiOptions {
    BlockArnoldiOptions {
        dependency_tol: cfg.dependency_tol,
        seed: random::derive_seed(cfg.seed, cycle as u64),
        cycle,
    }
}

/// One restart cycle of sbGMRES/sbFOM over `𝕂_m(A, R)`. Converged shifts
/// keep their residual column in the block but are not updated. Returns the
/// Arnoldi state for recycle-space extraction.
pub(crate) fn plain_cycle(
    family: &ShiftedFamily,
    cfg: &SolverConfig,
    kind: Projection,
    st: &mut BlockSolve,
    report: &mut SolveReport,
    cycle: usize,
) -> Result<BlockArnoldiState> {
    let l = family.len();
    let shifts = family.shifts();
    let active = st.active(report);
    let mut arn = BlockArnoldiState::start(&st.r, None, arnoldi_options(cfg, cycle))?;
    let mut lsq: Vec<ProgressiveLsq> = active
        .iter()
        .map(|&i| ProgressiveLsq::new(arn.s0().col(i)))
        .collect();
    // last Galerkin iterate per active shift: (steps, y)
    let mut fom_last: Vec<Option<(usize, Vec<C64>)>> = vec![None; active.len()];
    let mut shown: Vec<f64> = (0..l).map(|i| norm2(st.r.col(i))).collect();
    for _ in 0..cfg.cycle_length {
        if !arn.step(family.matrix())? {
            break;
        }
        report.count_block(l);
        st.iterations += 1;
        let j = arn.steps();
        let mut all = true;
        for (a, &i) in active.iter().enumerate() {
            let res = match kind {
                Projection::MinimumResidual => {
                    for (q, col) in arn.last_block_columns().iter().enumerate() {
                        let mut col = col.clone();
                        col[(j - 1) * l + q] += shifts[i];
                        lsq[a].push_column(&col);
                    }
                    lsq[a].residual_norm()
                }
                Projection::Galerkin => {
                    let g = start_rhs(arn.s0(), i, (j + 1) * l);
                    match fom_coefficients(&arn.shifted_hess(shifts[i]), &g) {
                        Ok((y, res)) => {
                            fom_last[a] = Some((j, y));
                            res
                        }
                        Err(Error::NearSingular { .. }) | Err(Error::SingularFactor { .. }) => shown[i],
                        Err(e) => return Err(e),
                    }
                }
            };
            shown[i] = res;
            all &= res <= st.thresholds[i];
        }
        for i in 0..l {
            let conv = report.converged[i] || shown[i] <= st.thresholds[i];
            report.record(i, cycle, st.iterations, shown[i], conv);
        }
        if all || arn.is_exhausted() {
            break;
        }
    }

    let before: Vec<f64> = column_norms(&st.r);
    for (a, &i) in active.iter().enumerate() {
        let sigma = shifts[i];
        let (steps, y) = match kind {
            Projection::MinimumResidual => (arn.steps(), lsq[a].solve()?),
            Projection::Galerkin => match fom_last[a].take() {
                Some((s, y)) => {
                    if s < arn.steps() {
                        report.note(format!(
                            "cycle {cycle}: shift {i} Galerkin system singular at step {}, using step {s}",
                            arn.steps()
                        ));
                    }
                    (s, y)
                }
                None => {
                    report.note(format!("cycle {cycle}: shift {i} has no Galerkin iterate; update skipped"));
                    continue;
                }
            },
        };
        let hbar = arn.shifted_hess(sigma);
        let basis = arn.basis();
        for (c, yc) in y.iter().enumerate() {
            axpy(*yc, basis.col(c), st.x.col_mut(i));
        }
        let r = st.r.col_mut(i);
        // r ← r − W_{s+1} H̄ₛ^σ y
        for p in 0..((steps + 1) * l).min(basis.n_cols()) {
            let hy: C64 = (0..steps * l).map(|c| hbar[(p, c)] * y[c]).sum();
            axpy(-hy, basis.col(p), r);
        }
    }
    end_of_cycle(family, st, report, cycle, &active, &before);
    Ok(arn)
}

/// Drift and stagnation notes, then freezes shifts that met the tolerance.
pub(crate) fn end_of_cycle(
    family: &ShiftedFamily,
    st: &BlockSolve,
    report: &mut SolveReport,
    cycle: usize,
    active: &[usize],
    before: &[f64],
) {
    check_drift(report, family, &st.x, &st.r, cycle);
    let after = column_norms(&st.r);
    for &i in active {
        if before[i] - after[i] < STAGNATION_TOL * before[i] {
            report.note(format!("cycle {cycle}: shift {i} stagnated (residual {:.6e})", after[i]));
        }
    }
    for (i, &t) in st.thresholds.iter().enumerate() {
        report.converged[i] = after[i] <= t;
    }
    report.cycles = cycle;
}

fn solve(
    family: &ShiftedFamily,
    cfg: &SolverConfig,
    strategy: &DecollinearizeStrategy,
    kind: Projection,
) -> Result<(DenseBlock, SolveReport)> {
    let name = match kind {
        Projection::MinimumResidual => "sbgmres",
        Projection::Galerkin => "sbfom",
    };
    let (mut st, mut report) = prepare(family, cfg, Some(strategy), name)?;
    for cycle in 1..=cfg.max_cycles {
        if report.all_converged() {
            break;
        }
        plain_cycle(family, cfg, kind, &mut st, &mut report, cycle)?;
    }
    report.iterations = st.iterations;
    finalize(&mut report, family, &st.x, &st.r);
    Ok((st.x, report))
}

/// Shifted block GMRES: every cycle builds one block Krylov subspace from
/// the residual block and minimizes each shifted residual over it.
///
/// Collinear initial residuals (for example identical right-hand sides with
/// `X₀ = 0`) are first made independent with `strategy`.
pub fn sbgmres(
    family: &ShiftedFamily,
    cfg: &SolverConfig,
    strategy: &DecollinearizeStrategy,
) -> Result<(DenseBlock, SolveReport)> {
    solve(family, cfg, strategy, Projection::MinimumResidual)
}

/// Shifted block FOM: as [`sbgmres`] with the Galerkin condition
/// `H_m^σ y = E₁ S₀ eᵢ` in place of the least-squares problem.
pub fn sbfom(
    family: &ShiftedFamily,
    cfg: &SolverConfig,
    strategy: &DecollinearizeStrategy,
) -> Result<(DenseBlock, SolveReport)> {
    solve(family, cfg, strategy, Projection::Galerkin)
}

/// Per-shift sbGMRES coefficients `argmin ‖E₁S₀eᵢ − H̄^{σᵢ} y‖` over the
/// relation held by `arn`, one vector per shift.
pub fn sbgmres_coefficients(arn: &BlockArnoldiState, shifts: &[C64]) -> Result<Vec<Vec<C64>>> {
    check_shift_count(arn, shifts)?;
    shifts
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let h = arn.shifted_hess(s);
            hessenberg_least_squares(&h, &start_rhs(arn.s0(), i, h.n_rows())).map(|(y, _)| y)
        })
        .collect()
}

/// Per-shift sbFOM coefficients `(H^{σᵢ})⁻¹ E₁S₀eᵢ`.
pub fn sbfom_coefficients(arn: &BlockArnoldiState, shifts: &[C64]) -> Result<Vec<Vec<C64>>> {
    check_shift_count(arn, shifts)?;
    shifts
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let h = arn.shifted_hess(s);
            fom_coefficients(&h, &start_rhs(arn.s0(), i, h.n_rows())).map(|(y, _)| y)
        })
        .collect()
}

fn check_shift_count(arn: &BlockArnoldiState, shifts: &[C64]) -> Result<()> {
    if shifts.len() != arn.block_size() {
        return Err(Error::DimensionMismatch {
            context: "one shift per block column",
            expected: arn.block_size(),
            found: shifts.len(),
        });
    }
    Ok(())
}
