use std::sync::Arc;

use super::project::{project_out, ObliqueProjector};
use super::ritz::{update_recycle_space, RecycleUpdate, RitzSource};
use super::space::RecycleSpace;
use crate::arnoldi::BlockArnoldiState;
use crate::common::{column_norms, finalize};
use crate::dense::{axpy, dot, norm2, DenseBlock};
use crate::error::{Error, Result};
use crate::family::ShiftedFamily;
use crate::kernels::{householder_qr, solve_upper, ProgressiveLsq};
use crate::report::{SolveReport, SolverConfig};
use crate::shifted::{
    arnoldi_options, end_of_cycle, plain_cycle, prepare, BlockSolve, DecollinearizeStrategy, Projection,
};
use crate::sparse::SparseMatrix;
use crate::{c64, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct RecycleConfig {
    /// Dimension of the recycle space kept between cycles; 0 disables
    /// recycling entirely.
    pub k: usize,
    pub update: RecycleUpdate,
    pub source: RitzSource,
    /// Used when the first cycle runs without a recycle space and the
    /// initial residuals are collinear.
    pub strategy: DecollinearizeStrategy,
}

impl Default for RecycleConfig {
    fn default() -> Self {
        Self {
            k: 10,
            update: RecycleUpdate::RitzLargest,
            source: RitzSource::Hessenberg,
            strategy: DecollinearizeStrategy::default(),
        }
    }
}

impl RecycleConfig {
    pub fn new(k: usize, update: RecycleUpdate) -> Self {
        Self {
            k,
            update,
            ..Self::default()
        }
    }
}

/// One augmented cycle's starting data and result, for inspection.
#[derive(Clone, Debug)]
pub struct AugmentedCycle {
    /// Iterates after the oblique projection.
    pub x_hat: DenseBlock,
    /// Residuals after the oblique projection.
    pub r_hat: DenseBlock,
    /// `W_j`, the Krylov part of the search space (`jL` columns).
    pub krylov_basis: DenseBlock,
    pub x: DenseBlock,
    pub r: DenseBlock,
    /// Per-shift residual norms of the final least-squares problems.
    pub lsq_residuals: Vec<f64>,
}

/// Per-shift least squares `min ‖g − G̅[y; z]‖` over the augmented relation,
/// organized with rows `[C; W_{j+1}]` for the Krylov columns so that they
/// can be factored progressively, and the `k` recycle columns eliminated
/// afterwards.
struct AugmentedLsq {
    krylov: ProgressiveLsq,
    sigma: C64,
}

struct AugmentedSolution {
    y: Vec<C64>,
    z: Vec<C64>,
    residual: f64,
}

/// `σ`-independent data of the recycle columns at the current step.
struct RecycleColumns {
    /// Rows `w_pᴴ U` of `W_{j+1}ᴴ U`.
    whu_rows: Vec<Vec<C64>>,
    chu: DenseBlock,
    /// `U − W WᴴU − C CᴴU`.
    remainder: DenseBlock,
    /// `N` of the thin QR of the remainder.
    n_factor: DenseBlock,
}

impl RecycleColumns {
    fn new(space: &RecycleSpace) -> Self {
        let k = space.k();
        let mut z = space.u().clone();
        let mut chu = DenseBlock::zeros(k, k);
        for _ in 0..2 {
            let cz = space.c().adjoint_mul(&z);
            for j in 0..k {
                let col = z.col_mut(j);
                for (p, c) in space.c().columns().enumerate() {
                    axpy(-cz[(p, j)], c, col);
                }
            }
            chu = chu.add(&cz);
        }
        Self {
            whu_rows: Vec::new(),
            chu,
            remainder: z,
            n_factor: DenseBlock::zeros(k, k),
        }
    }

    /// Accounts for basis columns `from..` of `w`.
    fn extend(&mut self, w: &DenseBlock, from: usize, space: &RecycleSpace) {
        let k = space.k();
        for p in from..w.n_cols() {
            let wp = w.col(p);
            let row: Vec<C64> = space.u().columns().map(|u| dot(wp, u)).collect();
            self.whu_rows.push(row);
            for _ in 0..2 {
                for j in 0..k {
                    let col = self.remainder.col_mut(j);
                    let coef = dot(wp, col);
                    axpy(-coef, wp, col);
                }
            }
        }
        self.n_factor = householder_qr(&self.remainder).r;
    }
}

impl AugmentedLsq {
    fn new(k: usize, s0_col: &[C64], sigma: C64) -> Self {
        let mut g = vec![C64::default(); k];
        g.extend_from_slice(s0_col);
        Self {
            krylov: ProgressiveLsq::new(&g),
            sigma,
        }
    }

    fn push_step(&mut self, arn: &BlockArnoldiState) {
        let l = arn.block_size();
        let j = arn.steps();
        for (q, (h, b)) in arn
            .last_block_columns()
            .iter()
            .zip(arn.last_coupling_columns())
            .enumerate()
        {
            let mut col = b.clone();
            col.extend_from_slice(h);
            col[b.len() + (j - 1) * l + q] += self.sigma;
            self.krylov.push_column(&col);
        }
    }

    fn solve(&self, rc: &RecycleColumns) -> Result<AugmentedSolution> {
        let k = rc.chu.n_cols();
        let jl = self.krylov.n_cols();
        let rows = self.krylov.n_rows();
        // recycle columns in [C; W] rows, then Qᴴ applied
        let mut p = DenseBlock::zeros(rows, k);
        for j in 0..k {
            let mut col: Vec<C64> = (0..k).map(|i| self.sigma * rc.chu[(i, j)]).collect();
            col[j] += c64(1.0);
            col.extend(rc.whu_rows.iter().map(|row| self.sigma * row[j]));
            self.krylov.apply_adjoint(&mut col);
            p.set_col(j, &col);
        }
        let qtg = self.krylov.transformed_rhs();
        let tail = rows - jl;
        let mut m = DenseBlock::zeros(tail + k, k);
        m.set_block(0, 0, &p.sub_block(jl..rows, 0..k));
        m.set_block(tail, 0, &rc.n_factor.scaled(self.sigma));
        let mut rhs = qtg[jl..].to_vec();
        rhs.resize(tail + k, C64::default());
        let f = householder_qr(&m);
        let qtr = f.q.adjoint_mul_vec(&rhs);
        let z = solve_upper(&f.r, &qtr)?;
        let mut res = rhs;
        for (j, zj) in z.iter().enumerate() {
            axpy(-zj, m.col(j), &mut res);
        }
        let mut top = qtg[..jl].to_vec();
        for (j, zj) in z.iter().enumerate() {
            axpy(-zj, &p.col(j)[..jl], &mut top);
        }
        let y = solve_upper(&self.krylov.triangular_factor(), &top)?;
        Ok(AugmentedSolution {
            y,
            z,
            residual: norm2(&res),
        })
    }
}

/// One cycle over `𝒰 + 𝕂_m((I − CCᴴ)A, R̂)`.
fn augmented_cycle(
    family: &ShiftedFamily,
    cfg: &SolverConfig,
    space: &RecycleSpace,
    st: &mut BlockSolve,
    report: &mut SolveReport,
    cycle: usize,
) -> Result<(BlockArnoldiState, AugmentedCycle)> {
    let l = family.len();
    let k = space.k();
    let shifts = family.shifts();
    let active = st.active(report);

    // oblique projection of active shifts (plus one refinement pass);
    // converged shifts only contribute a direction orthogonal to C
    let mut start = st.r.clone();
    for &i in &active {
        let proj = ObliqueProjector::new(space, shifts[i])?;
        for _ in 0..2 {
            proj.apply(space, st.r.col_mut(i), st.x.col_mut(i));
        }
        start.set_col(i, st.r.col(i));
    }
    // shifts solved by the projection alone leave the cycle here
    let projected = column_norms(&st.r);
    let active: Vec<usize> = active.into_iter().filter(|&i| projected[i] > st.thresholds[i]).collect();
    for i in (0..l).filter(|i| !active.contains(i)) {
        project_out(space.c(), start.col_mut(i));
    }
    let x_hat = st.x.clone();
    let r_hat = st.r.clone();

    let mut arn = BlockArnoldiState::start(&start, Some(space.c()), arnoldi_options(cfg, cycle))?;
    if active.is_empty() {
        end_of_cycle(family, st, report, cycle, &active, &projected);
        let trace = AugmentedCycle {
            x_hat,
            r_hat,
            krylov_basis: DenseBlock::zeros(family.n(), 0),
            x: st.x.clone(),
            r: st.r.clone(),
            lsq_residuals: projected,
        };
        return Ok((arn, trace));
    }
    let mut rc = RecycleColumns::new(space);
    rc.extend(arn.basis(), 0, space);
    let mut lsq: Vec<AugmentedLsq> = active
        .iter()
        .map(|&i| AugmentedLsq::new(k, arn.s0().col(i), shifts[i]))
        .collect();
    let mut last: Vec<Option<AugmentedSolution>> = (0..active.len()).map(|_| None).collect();
    let mut shown: Vec<f64> = column_norms(&st.r);
    for _ in 0..cfg.cycle_length {
        let before = arn.basis().n_cols();
        if !arn.step(family.matrix())? {
            break;
        }
        report.count_block(l);
        st.iterations += 1;
        rc.extend(arn.basis(), before, space);
        let mut all = true;
        for (a, &i) in active.iter().enumerate() {
            lsq[a].push_step(&arn);
            match lsq[a].solve(&rc) {
                Ok(sol) => {
                    shown[i] = sol.residual;
                    last[a] = Some(sol);
                }
                Err(Error::SingularFactor { .. }) => {}
                Err(e) => return Err(e),
            }
            all &= shown[i] <= st.thresholds[i];
        }
        for i in 0..l {
            let conv = report.converged[i] || shown[i] <= st.thresholds[i];
            report.record(i, cycle, st.iterations, shown[i], conv);
        }
        if all || arn.is_exhausted() {
            break;
        }
    }

    let before = column_norms(&st.r);
    let basis = arn.basis();
    let jl_total = arn.steps() * l;
    let hess = arn.hess();
    let coupling = arn.coupling();
    let mut lsq_residuals = vec![f64::NAN; l];
    for (a, &i) in active.iter().enumerate() {
        let Some(sol) = last[a].take() else {
            report.note(format!("cycle {cycle}: shift {i} has no augmented least-squares solution; update skipped"));
            continue;
        };
        lsq_residuals[i] = sol.residual;
        let sigma = shifts[i];
        let jl = sol.y.len();
        let x = st.x.col_mut(i);
        for (j, zj) in sol.z.iter().enumerate() {
            axpy(*zj, space.u().col(j), x);
        }
        for (c, yc) in sol.y.iter().enumerate() {
            axpy(*yc, basis.col(c), x);
        }
        // r ← r̂ − W_{j+1} H̄^σ y − C (B y + z) − σ U z
        let r = st.r.col_mut(i);
        for p in 0..(jl + l).min(basis.n_cols()) {
            let mut hy: C64 = (0..jl).map(|c| hess[(p, c)] * sol.y[c]).sum();
            if p < jl {
                hy += sigma * sol.y[p];
            }
            axpy(-hy, basis.col(p), r);
        }
        for j in 0..k {
            let by: C64 = (0..jl).map(|c| coupling[(j, c)] * sol.y[c]).sum::<C64>() + sol.z[j];
            axpy(-by, space.c().col(j), r);
            axpy(-(sigma * sol.z[j]), space.u().col(j), r);
        }
    }
    end_of_cycle(family, st, report, cycle, &active, &before);
    let trace = AugmentedCycle {
        x_hat,
        r_hat,
        krylov_basis: basis.col_range(0..jl_total),
        x: st.x.clone(),
        r: st.r.clone(),
        lsq_residuals,
    };
    Ok((arn, trace))
}

fn refresh(
    arn: &BlockArnoldiState,
    space: &RecycleSpace,
    rcfg: &RecycleConfig,
    report: &mut SolveReport,
    cycle: usize,
) -> RecycleSpace {
    match update_recycle_space(arn, space, rcfg.update, rcfg.source, rcfg.k) {
        Ok(next) => {
            report.recycle_provenance = Some(next.provenance());
            next
        }
        Err(e) => {
            report.note(format!("cycle {cycle}: recycle space update failed ({e}); keeping the previous space"));
            space.clone()
        }
    }
}

fn check_space(family: &ShiftedFamily, space: &RecycleSpace) -> Result<()> {
    if space.n() != family.n() {
        return Err(Error::DimensionMismatch {
            context: "recycle space rows",
            expected: family.n(),
            found: space.n(),
        });
    }
    Ok(())
}

fn recycled(
    family: &ShiftedFamily,
    cfg: &SolverConfig,
    space: &RecycleSpace,
    rcfg: &RecycleConfig,
    name: &str,
) -> Result<(DenseBlock, SolveReport, RecycleSpace)> {
    check_space(family, space)?;
    let mut space = if rcfg.k == 0 {
        RecycleSpace::empty(family.n())
    } else {
        space.clone()
    };
    let strategy = space.is_empty().then_some(&rcfg.strategy);
    let (mut st, mut report) = prepare(family, cfg, strategy, name)?;
    if rcfg.k > 0 {
        report.recycle_provenance = Some(space.provenance());
    }
    for cycle in 1..=cfg.max_cycles {
        if report.all_converged() {
            break;
        }
        let arn = if space.is_empty() {
            plain_cycle(family, cfg, Projection::MinimumResidual, &mut st, &mut report, cycle)?
        } else {
            augmented_cycle(family, cfg, &space, &mut st, &mut report, cycle)?.0
        };
        if rcfg.k > 0 && rcfg.update != RecycleUpdate::Keep {
            space = refresh(&arn, &space, rcfg, &mut report, cycle);
        }
    }
    report.iterations = st.iterations;
    finalize(&mut report, family, &st.x, &st.r);
    Ok((st.x, report, space))
}

/// Recycled shifted block GMRES. Each cycle obliquely projects every
/// shifted residual so that it is orthogonal to `C`, builds one block
/// Krylov subspace of `(I − CCᴴ)A` from the projected residuals and
/// minimizes each shifted residual over `𝒰 + 𝕂_m`. The space is then
/// refreshed per `rcfg`.
///
/// With `rcfg.k == 0` this is exactly [`crate::sbgmres`].
pub fn rsbgmres(
    family: &ShiftedFamily,
    cfg: &SolverConfig,
    space: &RecycleSpace,
    rcfg: &RecycleConfig,
) -> Result<(DenseBlock, SolveReport, RecycleSpace)> {
    recycled(family, cfg, space, rcfg, "rsbgmres")
}

/// A single augmented cycle of rsbGMRES from the family's initial guess,
/// returning the projected start, the Krylov basis and the result.
pub fn rsbgmres_cycle(family: &ShiftedFamily, cfg: &SolverConfig, space: &RecycleSpace) -> Result<AugmentedCycle> {
    check_space(family, space)?;
    if space.is_empty() {
        return Err(Error::InvalidConfig("rsbgmres_cycle needs a non-empty recycle space".into()));
    }
    let (mut st, mut report) = prepare(family, cfg, None, "rsbgmres")?;
    report.converged.iter_mut().for_each(|c| *c = false);
    Ok(augmented_cycle(family, cfg, space, &mut st, &mut report, 1)?.1)
}

/// Recycled GMRES for one system `A x = b`: iterates on `(I − CCᴴ)A` and
/// corrects through `𝒰`. `space` must satisfy `C = A U` for this `A`.
/// With an empty space the first cycle is plain GMRES.
pub fn rgmres_baseline(
    a: &SparseMatrix,
    b: &[C64],
    x0: &[C64],
    cfg: &SolverConfig,
    space: &RecycleSpace,
    rcfg: &RecycleConfig,
) -> Result<(Vec<C64>, SolveReport, RecycleSpace)> {
    let n = a.n_rows();
    let rhs = DenseBlock::from_col_major(n, 1, b.to_vec())?;
    let x0 = DenseBlock::from_col_major(n, 1, x0.to_vec())?;
    let family = ShiftedFamily::with_initial_guess(Arc::new(a.clone()), vec![C64::default()], rhs, x0)?;
    let (x, mut report, space) = recycled(&family, cfg, space, rcfg, "rgmres")?;
    // a single-vector method: no block products
    report.block_matvec_count = 0;
    report.history.iter_mut().for_each(|r| r.block_matvecs = 0);
    Ok((x.into_entries(), report, space))
}

impl RecycleConfig {
    /// Defaults for [`rgmres_baseline`]: harmonic Ritz vectors for the
    /// smallest harmonic Ritz values.
    pub fn rgmres(k: usize) -> Self {
        Self::new(k, RecycleUpdate::HarmonicRitzSmallest)
    }
}
