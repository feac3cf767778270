use crate::arnoldi::{ArnoldiState, BlockArnoldiOptions, BlockArnoldiState};
use crate::baseline::fom_coefficients;
use crate::common::column_norms;
use crate::dense::{axpy, dot, norm2, DenseBlock};
use crate::error::{Error, Result};
use crate::family::ShiftedFamily;
use crate::kernels::hessenberg_least_squares;
use crate::random;
use crate::report::SolveReport;
use crate::C64;

/// Default sine tolerance of [`detect_collinear`].
pub const COLLINEAR_TOL: f64 = 1e-12;

const RESEEDS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyKind {
    /// Fresh seeded random initial guesses.
    RandomX0,
    /// One single-vector Krylov cycle shared by all shifts, each residual
    /// minimized over it.
    GmresCycle,
    /// One block FOM cycle on `[r | random columns]`.
    FomRandomBlock,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecollinearizeStrategy {
    pub kind: StrategyKind,
    pub init_cycle_length: usize,
    pub seed: u64,
}

impl Default for DecollinearizeStrategy {
    fn default() -> Self {
        Self {
            kind: StrategyKind::GmresCycle,
            init_cycle_length: 10,
            seed: 0,
        }
    }
}

impl DecollinearizeStrategy {
    pub fn new(kind: StrategyKind, init_cycle_length: usize, seed: u64) -> Self {
        Self {
            kind,
            init_cycle_length,
            seed,
        }
    }
}

/// Sine of the angle between `u` and `v`, from the component of `v`
/// orthogonal to `u` (accurate for nearly parallel vectors).
pub fn sine_between(u: &[C64], v: &[C64]) -> f64 {
    let uu = dot(u, u);
    let mut w = v.to_vec();
    axpy(-(dot(u, v) / uu), u, &mut w);
    (norm2(&w) / norm2(v)).min(1.0)
}

/// `(i, j, sine)` for every column pair `i < j`.
pub fn collinearity_sines(r: &DenseBlock) -> Vec<(usize, usize, f64)> {
    let l = r.n_cols();
    let mut out = Vec::with_capacity(l * l.saturating_sub(1) / 2);
    for i in 0..l {
        for j in (i + 1)..l {
            out.push((i, j, sine_between(r.col(i), r.col(j))));
        }
    }
    out
}

/// True iff every pair of columns of `r` has sine of angle at most `tol`.
pub fn detect_collinear(r: &DenseBlock, tol: f64) -> Result<bool> {
    if let Some(i) = (0..r.n_cols()).find(|&i| norm2(r.col(i)) == 0.0) {
        return Err(Error::ZeroColumn(i));
    }
    Ok(collinearity_sines(r).iter().all(|&(_, _, s)| s <= tol))
}

fn nonzero_columns(r: &DenseBlock) -> DenseBlock {
    let cols: Vec<Vec<C64>> = r.columns().filter(|c| norm2(c) > 0.0).map(<[C64]>::to_vec).collect();
    DenseBlock::from_columns(r.n_rows(), &cols).expect("same row count")
}

fn still_collinear(r: &DenseBlock) -> bool {
    let nz = nonzero_columns(r);
    nz.n_cols() > 1 && collinearity_sines(&nz).iter().all(|&(_, _, s)| s <= COLLINEAR_TOL)
}

/// Replaces collinear initial residuals with independent ones. Returns the
/// new initial guesses, their residuals and a report holding the work done
/// (matvec counts and notes; no iteration records).
pub fn decollinearize(
    family: &ShiftedFamily,
    strategy: &DecollinearizeStrategy,
) -> Result<(DenseBlock, DenseBlock, SolveReport)> {
    if strategy.init_cycle_length == 0 {
        return Err(Error::InvalidConfig("init_cycle_length must be at least 1".into()));
    }
    let mut report = SolveReport::new("decollinearize", family.shifts(), column_norms(family.rhs()));
    if !family.zero_initial_guess() {
        report.count_block(family.len());
    }
    let r0 = family.initial_residuals();
    report.initial_residual_norms = column_norms(&r0);
    if family.len() == 1 {
        return Ok((family.initial_guess().clone(), r0, report));
    }
    match strategy.kind {
        StrategyKind::RandomX0 => random_x0(family, strategy, report),
        StrategyKind::GmresCycle => match gmres_cycle(family, strategy, &r0, &mut report)? {
            Some((x, r)) => Ok((x, r, report)),
            None => {
                report.note("gmres-cycle stagnated for every shift; falling back to fom-random-block");
                fom_random_block(family, strategy, &r0, report)
            }
        },
        StrategyKind::FomRandomBlock => fom_random_block(family, strategy, &r0, report),
    }
}

fn random_x0(
    family: &ShiftedFamily,
    strategy: &DecollinearizeStrategy,
    mut report: SolveReport,
) -> Result<(DenseBlock, DenseBlock, SolveReport)> {
    let n = family.n();
    let anorm = family.matrix().frobenius_norm();
    for attempt in 0..RESEEDS {
        let mut rng = random::rng(random::derive_seed(strategy.seed, attempt as u64));
        let mut x0 = random::unit_columns(&mut rng, n, family.len());
        // a random unit vector has ‖A u‖ ≈ ‖A‖_F / √n; match that to ‖bᵢ‖
        for i in 0..family.len() {
            let s = report.rhs_norms[i] * (n as f64).sqrt() / anorm.max(f64::MIN_POSITIVE);
            for v in x0.col_mut(i) {
                *v *= s;
            }
        }
        let r = family.residuals(&x0);
        report.count_block(family.len());
        if !still_collinear(&r) {
            return Ok((x0, r, report));
        }
    }
    Err(Error::PersistentCollinearity { attempts: RESEEDS })
}

/// Returns `None` when no shift made progress.
fn gmres_cycle(
    family: &ShiftedFamily,
    strategy: &DecollinearizeStrategy,
    r0: &DenseBlock,
    report: &mut SolveReport,
) -> Result<Option<(DenseBlock, DenseBlock)>> {
    let norms = column_norms(r0);
    let p = (0..norms.len()).fold(0, |b, i| if norms[i] > norms[b] { i } else { b });
    let base = r0.col(p).to_vec();
    let (mut arn, beta) = ArnoldiState::new(&base)?;
    for _ in 0..strategy.init_cycle_length {
        let broke = arn.step(family.matrix())?;
        report.count_single();
        if broke {
            break;
        }
    }
    let bb = dot(&base, &base);
    let mut x = family.initial_guess().clone();
    let mut r = r0.clone();
    let mut progressed = false;
    for (i, &sigma) in family.shifts().iter().enumerate() {
        if norms[i] == 0.0 {
            continue;
        }
        let gamma = dot(&base, r0.col(i)) / bb;
        let hs = arn.shifted_hess(sigma);
        let mut g = vec![C64::default(); hs.n_rows()];
        g[0] = gamma * beta;
        let (y, res) = hessenberg_least_squares(&hs, &g)?;
        if res < norms[i] * (1.0 - 1e-14) {
            progressed = true;
        }
        let basis = arn.basis();
        for (c, yc) in y.iter().enumerate() {
            axpy(*yc, basis.col(c), x.col_mut(i));
        }
        let hy = hs.mul_vec(&y);
        for (q, hq) in hy.iter().enumerate() {
            axpy(-hq, basis.col(q), r.col_mut(i));
        }
    }
    if !progressed || still_collinear(&r) {
        return Ok(None);
    }
    Ok(Some((x, r)))
}

fn fom_random_block(
    family: &ShiftedFamily,
    strategy: &DecollinearizeStrategy,
    r0: &DenseBlock,
    mut report: SolveReport,
) -> Result<(DenseBlock, DenseBlock, SolveReport)> {
    let (n, l) = (family.n(), family.len());
    let norms = column_norms(r0);
    let p = (0..l).fold(0, |b, i| if norms[i] > norms[b] { i } else { b });
    let base = r0.col(p).to_vec();
    let bb = dot(&base, &base);
    for attempt in 0..RESEEDS {
        let seed = random::derive_seed(strategy.seed, 1000 + attempt as u64);
        let mut rng = random::rng(seed);
        let mut start = random::unit_columns(&mut rng, n, l);
        start.set_col(0, &base);
        let opts = BlockArnoldiOptions {
            seed,
            ..BlockArnoldiOptions::default()
        };
        let mut arn = BlockArnoldiState::start(&start, None, opts)?;
        for _ in 0..strategy.init_cycle_length {
            if !arn.step(family.matrix())? {
                break;
            }
            report.count_block(l);
            if arn.is_exhausted() {
                break;
            }
        }
        report.replacements.extend_from_slice(arn.replacements());
        let s0e1: Vec<C64> = arn.s0().col(0).to_vec();
        let mut x = family.initial_guess().clone();
        let mut r = r0.clone();
        let mut ok = true;
        for (i, &sigma) in family.shifts().iter().enumerate() {
            if norms[i] == 0.0 {
                continue;
            }
            let gamma = dot(&base, r0.col(i)) / bb;
            let hs = arn.shifted_hess(sigma);
            let mut g = vec![C64::default(); hs.n_rows()];
            for (q, v) in s0e1.iter().enumerate() {
                g[q] = gamma * v;
            }
            let y = match fom_coefficients(&hs, &g) {
                Ok((y, _)) => y,
                Err(Error::NearSingular { .. }) | Err(Error::SingularFactor { .. }) => {
                    ok = false;
                    break;
                }
                Err(e) => return Err(e),
            };
            let basis = arn.basis();
            for (c, yc) in y.iter().enumerate() {
                axpy(*yc, basis.col(c), x.col_mut(i));
            }
            let hy = hs.mul_vec(&y);
            for (q, hq) in hy.iter().enumerate() {
                axpy(-hq, basis.col(q), r.col_mut(i));
            }
        }
        if ok && !still_collinear(&r) {
            return Ok((x, r, report));
        }
        report.note(format!("fom-random-block attempt {attempt} left residuals collinear; reseeding"));
    }
    Err(Error::PersistentCollinearity { attempts: RESEEDS })
}
