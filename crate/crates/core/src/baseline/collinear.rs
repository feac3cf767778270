//! Shifted methods that share one single-vector Krylov basis and therefore
//! need collinear residuals `rᵢ = γᵢ r_base`.

use super::single::fom_coefficients;
use crate::arnoldi::ArnoldiState;
use crate::common::{check_drift, column_norms, finalize};
use crate::dense::{axpy, dot, norm2, scale, DenseBlock};
use crate::error::{Error, Result};
use crate::family::ShiftedFamily;
use crate::kernels::{solve_small_dense, ProgressiveLsq};
use crate::report::{SolveReport, SolverConfig};
use crate::shifted::collinearity_sines;
use crate::{c64, C64};

/// Sine tolerance for the collinearity precondition.
const COLLINEAR_TOL: f64 = 1e-8;

/// Which system drives the shared minimization in sGMRES.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BaseShift {
    /// The shift of smallest modulus (the worst-conditioned system).
    #[default]
    SmallestModulus,
    Index(usize),
}

/// Residual block stored as one vector and per-shift factors.
struct CollinearResiduals {
    base: Vec<C64>,
    factors: Vec<C64>,
}

impl CollinearResiduals {
    /// Picks the longest column as the base direction; fails if any other
    /// nonzero column is not parallel to it.
    fn from_block(r: &DenseBlock) -> Result<Self> {
        let norms = column_norms(r);
        let (p, _) = norms
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        let nonzero: Vec<usize> = (0..r.n_cols()).filter(|&i| norms[i] > 0.0).collect();
        let sub = DenseBlock::from_columns(r.n_rows(), &nonzero.iter().map(|&i| r.col(i).to_vec()).collect::<Vec<_>>())?;
        if let Some((a, b, s)) = collinearity_sines(&sub).into_iter().find(|&(_, _, s)| s > COLLINEAR_TOL) {
            return Err(Error::NotCollinear {
                first: nonzero[a],
                second: nonzero[b],
                sine: s,
            });
        }
        let base = r.col(p).to_vec();
        let bb = dot(&base, &base);
        let factors = (0..r.n_cols())
            .map(|i| if norms[i] > 0.0 { dot(&base, r.col(i)) / bb } else { C64::default() })
            .collect();
        Ok(Self { base, factors })
    }

    fn block(&self) -> DenseBlock {
        let mut b = DenseBlock::zeros(self.base.len(), self.factors.len());
        for (i, &f) in self.factors.iter().enumerate() {
            let col = b.col_mut(i);
            for (c, v) in col.iter_mut().zip(&self.base) {
                *c = f * v;
            }
        }
        b
    }
}

fn pick_base(shifts: &[C64], choice: BaseShift, active: &[bool]) -> Result<usize> {
    match choice {
        BaseShift::Index(i) if i >= shifts.len() => Err(Error::InvalidConfig(format!(
            "base shift index {i} out of range for {} shifts",
            shifts.len()
        ))),
        BaseShift::Index(i) if active[i] => Ok(i),
        _ => Ok((0..shifts.len())
            .filter(|&i| active[i])
            .min_by(|&i, &j| shifts[i].norm().total_cmp(&shifts[j].norm()))
            .unwrap_or(0)),
    }
}

/// Solves `[H̄^σ  z] [y; β'] = rhs` (square) and returns `(y, β')`.
fn collinearity_system(hbar_sigma: &DenseBlock, z: &[C64], rhs: &[C64]) -> Result<(Vec<C64>, C64)> {
    let (rows, cols) = (hbar_sigma.n_rows(), hbar_sigma.n_cols());
    if rows == cols {
        // invariant subspace reached: the base residual vanished
        let (y, _) = solve_small_dense(hbar_sigma, &DenseBlock::from_col_major(rows, 1, rhs.to_vec())?)?;
        return Ok((y.into_entries(), C64::default()));
    }
    let mut m = hbar_sigma.clone();
    m.push_col(z);
    let (sol, _) = solve_small_dense(&m, &DenseBlock::from_col_major(rows, 1, rhs.to_vec())?)?;
    let mut y = sol.into_entries();
    let beta = y.pop().expect("non-empty solution");
    Ok((y, beta))
}

/// Restarted shifted GMRES with collinear residuals: each cycle minimizes the
/// base system over `𝒦_m(A, r_base)` and picks the other iterates so that
/// their residuals stay parallel to the base residual.
///
/// Every shift is updated in every cycle (no matvecs are involved), so the
/// residuals stay collinear until the whole family has converged.
pub fn sgmres_frommer(
    family: &ShiftedFamily,
    cfg: &SolverConfig,
    base_choice: BaseShift,
) -> Result<(DenseBlock, SolveReport)> {
    cfg.validate()?;
    let a = family.matrix();
    let shifts = family.shifts();
    let l = family.len();
    let mut report = SolveReport::new("sgmres", shifts, column_norms(family.rhs()));
    if !family.zero_initial_guess() {
        report.count_block(l);
    }
    let r0 = family.initial_residuals();
    let mut res = CollinearResiduals::from_block(&r0)?;
    report.initial_residual_norms = column_norms(&r0);
    let thr: Vec<f64> = report.rhs_norms.iter().map(|&b| cfg.threshold(b)).collect();
    let mut x = family.initial_guess().clone();
    for i in 0..l {
        report.converged[i] = report.initial_residual_norms[i] <= thr[i];
    }
    let mut iter = 0;

    for cycle in 1..=cfg.max_cycles {
        if report.all_converged() {
            break;
        }
        report.cycles = cycle;
        let unconverged: Vec<bool> = report.converged.iter().map(|c| !c).collect();
        let b_idx = pick_base(shifts, base_choice, &unconverged)?;
        // re-anchor on the base system: r_base ← γ_b r_base, γᵢ ← γᵢ / γ_b
        let gb = res.factors[b_idx];
        scale(gb, &mut res.base);
        for f in res.factors.iter_mut() {
            *f /= gb;
        }
        let (mut arn, beta) = ArnoldiState::new(&res.base)?;
        let mut lsq = ProgressiveLsq::new(&[c64(beta)]);
        let mut sols: Vec<(Vec<C64>, C64)> = Vec::new();
        for _ in 0..cfg.cycle_length {
            let broke = arn.step(a)?;
            report.count_single();
            iter += 1;
            let j = arn.steps();
            let mut col = arn.last_column().expect("a step was taken").to_vec();
            col[j - 1] += shifts[b_idx];
            lsq.push_column(&col);
            let yb = lsq.solve()?;
            let hb = arn.shifted_hess(shifts[b_idx]);
            let mut g = vec![C64::default(); hb.n_rows()];
            g[0] = c64(beta);
            let hy = hb.mul_vec(&yb);
            let zb: Vec<C64> = g.iter().zip(&hy).map(|(u, v)| u - v).collect();
            let zb_norm = lsq.residual_norm();
            sols.clear();
            for i in 0..l {
                if i == b_idx {
                    sols.push((yb.clone(), c64(1.0)));
                    continue;
                }
                let rhs: Vec<C64> = g.iter().map(|v| v * res.factors[i]).collect();
                let sol = collinearity_system(&arn.shifted_hess(shifts[i]), &zb, &rhs).map_err(|e| match e {
                    Error::NearSingular { .. } | Error::SingularFactor { .. } => Error::CollinearitySystemSingular {
                        index: i,
                        shift: shifts[i],
                    },
                    other => other,
                })?;
                sols.push(sol);
            }
            let mut all = true;
            for (i, sol) in sols.iter().enumerate() {
                let r = sol.1.norm() * zb_norm;
                let conv = r <= thr[i];
                all &= conv;
                report.record(i, cycle, iter, r, conv);
            }
            if all || broke {
                break;
            }
        }
        let basis = arn.basis();
        for (i, sol) in sols.iter().enumerate() {
            let xi = x.col_mut(i);
            for (c, yc) in sol.0.iter().enumerate() {
                axpy(*yc, basis.col(c), xi);
            }
        }
        // new base residual V_{j+1} z_b
        let hb = arn.shifted_hess(shifts[b_idx]);
        let mut zb = hb.mul_vec(&sols[b_idx].0);
        for v in zb.iter_mut() {
            *v = -*v;
        }
        zb[0] += c64(beta);
        let mut new_base = vec![C64::default(); family.n()];
        for (p, zp) in zb.iter().enumerate() {
            axpy(*zp, basis.col(p), &mut new_base);
        }
        res.base = new_base;
        for (i, sol) in sols.iter().enumerate() {
            res.factors[i] = sol.1;
        }
        let rb = res.block();
        for i in 0..l {
            report.converged[i] = norm2(rb.col(i)) <= thr[i];
        }
        check_drift(&mut report, family, &x, &rb, cycle);
    }
    report.iterations = iter;
    let rb = res.block();
    finalize(&mut report, family, &x, &rb);
    Ok((x, report))
}

/// Restarted shifted FOM: one basis of `𝒦_m(A, r_base)` per cycle and a
/// Galerkin solve with `H_m + σᵢ I` per shift. All cycle-end residuals are
/// multiples of `v_{m+1}`.
pub fn sfom_simoncini(family: &ShiftedFamily, cfg: &SolverConfig) -> Result<(DenseBlock, SolveReport)> {
    cfg.validate()?;
    let a = family.matrix();
    let shifts = family.shifts();
    let l = family.len();
    let mut report = SolveReport::new("sfom", shifts, column_norms(family.rhs()));
    if !family.zero_initial_guess() {
        report.count_block(l);
    }
    let r0 = family.initial_residuals();
    let mut res = CollinearResiduals::from_block(&r0)?;
    report.initial_residual_norms = column_norms(&r0);
    let thr: Vec<f64> = report.rhs_norms.iter().map(|&b| cfg.threshold(b)).collect();
    let mut x = family.initial_guess().clone();
    let mut norms = report.initial_residual_norms.clone();
    for i in 0..l {
        report.converged[i] = norms[i] <= thr[i];
    }
    // shifts whose residual left the common direction after a skipped update
    let mut excluded = vec![false; l];
    let mut detached: Vec<Option<Vec<C64>>> = vec![None; l];
    let mut iter = 0;

    for cycle in 1..=cfg.max_cycles {
        if report.all_converged() {
            break;
        }
        let active: Vec<bool> = excluded.iter().map(|e| !e).collect();
        if !active.iter().any(|&a| a) {
            break;
        }
        report.cycles = cycle;
        let (mut arn, beta) = ArnoldiState::new(&res.base)?;
        let mut last: Vec<Option<(usize, Vec<C64>)>> = vec![None; l];
        let mut shown = norms.clone();
        for _ in 0..cfg.cycle_length {
            let broke = arn.step(a)?;
            report.count_single();
            iter += 1;
            let mut all = true;
            for i in 0..l {
                if active[i] {
                    let mut g = vec![C64::default(); arn.hess().n_rows()];
                    g[0] = res.factors[i] * beta;
                    match fom_coefficients(&arn.shifted_hess(shifts[i]), &g) {
                        Ok((y, r)) => {
                            last[i] = Some((arn.steps(), y));
                            shown[i] = r;
                        }
                        Err(Error::NearSingular { .. }) | Err(Error::SingularFactor { .. }) => {}
                        Err(e) => return Err(e),
                    }
                }
                let conv = shown[i] <= thr[i];
                if active[i] {
                    all &= conv;
                }
                report.record(i, cycle, iter, shown[i], conv);
            }
            if all || broke {
                break;
            }
        }
        let steps = arn.steps();
        let basis = arn.basis().clone();
        let hbar = arn.hess();
        // v_{m+1} direction for the new common residual
        let next_dir: Option<Vec<C64>> = (basis.n_cols() > steps).then(|| basis.col(steps).to_vec());
        for i in 0..l {
            if !active[i] {
                continue;
            }
            match &last[i] {
                Some((s, y)) if *s == steps => {
                    let xi = x.col_mut(i);
                    for (c, yc) in y.iter().enumerate() {
                        axpy(*yc, basis.col(c), xi);
                    }
                    res.factors[i] = match &next_dir {
                        Some(_) => -hbar[(steps, steps - 1)] * y[steps - 1],
                        None => C64::default(),
                    };
                }
                _ => {
                    report.note(format!(
                        "cycle {cycle}: H_m + σ I singular for shift {i}; update skipped and shift excluded"
                    ));
                    excluded[i] = true;
                    let old: Vec<C64> = res.base.iter().map(|v| v * res.factors[i]).collect();
                    detached[i] = Some(old);
                }
            }
        }
        match next_dir {
            Some(v) => res.base = v,
            None => {
                for (i, f) in res.factors.iter_mut().enumerate() {
                    if active[i] && !excluded[i] {
                        *f = C64::default();
                    }
                }
            }
        }
        let rb = residual_block(&res, &detached);
        for i in 0..l {
            norms[i] = norm2(rb.col(i));
            report.converged[i] = norms[i] <= thr[i];
        }
        check_drift(&mut report, family, &x, &rb, cycle);
    }
    report.iterations = iter;
    let rb = residual_block(&res, &detached);
    finalize(&mut report, family, &x, &rb);
    Ok((x, report))
}

fn residual_block(res: &CollinearResiduals, detached: &[Option<Vec<C64>>]) -> DenseBlock {
    let mut b = res.block();
    for (i, d) in detached.iter().enumerate() {
        if let Some(v) = d {
            b.set_col(i, v);
        }
    }
    b
}
