//! Running one configured method over a problem, in shift groups where the
//! method calls for it, and flattening the per-group reports into one
//! instrumented history with method-wide counters.

use std::time::Instant;

use sbkrylov::{
    fom_restarted, gmres_restarted, read_dense_block, rgmres_baseline, rsbgmres, sbfom, sbgmres, sfom_simoncini,
    sgmres_frommer, BaseShift, DecollinearizeStrategy, DenseBlock, Provenance, RecycleConfig, RecycleSpace,
    RecycleUpdate, RitzSource, SolveReport, SolverConfig, StrategyKind, C64,
};

use crate::config::{ExperimentConfig, MethodName, MethodSpec, RecycleModeName, RitzSourceName, StrategyName};
use crate::error::HarnessError;
use crate::problem::Problem;

/// One row of the per-iteration history.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HistoryRow {
    pub method: String,
    pub shift: usize,
    pub cycle: usize,
    pub iteration: usize,
    pub matvecs: usize,
    pub block_matvecs: usize,
    pub resid_norm: f64,
    pub converged: bool,
}

/// A solve of a subset of the shifts.
#[derive(Clone, Debug)]
pub struct GroupReport {
    /// Global indices of the shifts in this group.
    pub indices: Vec<usize>,
    pub report: SolveReport,
    /// Matvecs spent outside the solver (recycle-space setup) before it ran.
    pub setup_matvecs: usize,
}

#[derive(Clone, Debug)]
pub struct MethodOutcome {
    pub label: String,
    pub name: MethodName,
    pub groups: Vec<GroupReport>,
    /// Solutions for every shift, zero where a group failed.
    pub solution: DenseBlock,
    pub error: Option<String>,
    pub seconds: f64,
}

impl MethodOutcome {
    /// History rows with counters accumulated across groups.
    pub fn rows(&self) -> Vec<HistoryRow> {
        let mut rows = Vec::new();
        let (mut mv, mut bmv) = (0, 0);
        for g in &self.groups {
            mv += g.setup_matvecs;
            for rec in &g.report.history {
                rows.push(HistoryRow {
                    method: self.label.clone(),
                    shift: g.indices[rec.shift],
                    cycle: rec.cycle,
                    iteration: rec.iteration,
                    matvecs: mv + rec.matvecs,
                    block_matvecs: bmv + rec.block_matvecs,
                    resid_norm: rec.resid_norm,
                    converged: rec.converged,
                });
            }
            mv += g.report.matvec_count;
            bmv += g.report.block_matvec_count;
        }
        rows
    }

    pub fn converged(&self, n_shifts: usize) -> Vec<bool> {
        let mut out = vec![false; n_shifts];
        for g in &self.groups {
            for (j, &i) in g.indices.iter().enumerate() {
                out[i] = g.report.converged[j];
            }
        }
        out
    }

    pub fn replacements(&self) -> usize {
        self.groups.iter().map(|g| g.report.replacements.len()).sum()
    }

    pub fn notes(&self) -> Vec<String> {
        self.groups.iter().flat_map(|g| g.report.notes.iter().cloned()).collect()
    }
}

pub fn solver_config(spec: &MethodSpec, base_seed: u64) -> SolverConfig {
    SolverConfig {
        cycle_length: spec.cycle_length,
        tolerance: spec.tolerance,
        max_cycles: spec.max_cycles,
        seed: spec.seed.unwrap_or(base_seed),
        absolute: spec.absolute,
        ..SolverConfig::default()
    }
}

pub fn strategy(spec: &MethodSpec, seed: u64) -> DecollinearizeStrategy {
    let kind = match spec.strategy {
        StrategyName::RandomX0 => StrategyKind::RandomX0,
        StrategyName::GmresCycle => StrategyKind::GmresCycle,
        StrategyName::FomRandomBlock => StrategyKind::FomRandomBlock,
    };
    DecollinearizeStrategy::new(kind, spec.init_cycle_length, seed)
}

pub fn recycle_config(cfg: &ExperimentConfig, spec: &MethodSpec, seed: u64) -> RecycleConfig {
    let update = match spec.recycle_mode.or(cfg.recycle.mode) {
        Some(RecycleModeName::RitzLargest) => RecycleUpdate::RitzLargest,
        Some(RecycleModeName::RitzSmallest) => RecycleUpdate::RitzSmallest,
        Some(RecycleModeName::HarmonicRitzSmallest) => RecycleUpdate::HarmonicRitzSmallest,
        Some(RecycleModeName::Keep) => RecycleUpdate::Keep,
        None if spec.name == MethodName::Rgmres => RecycleUpdate::HarmonicRitzSmallest,
        None => RecycleUpdate::RitzLargest,
    };
    RecycleConfig {
        k: spec.recycle_k.unwrap_or(cfg.recycle.k),
        update,
        source: match cfg.recycle.source {
            RitzSourceName::Hessenberg => RitzSource::Hessenberg,
            RitzSourceName::Augmented => RitzSource::Augmented,
        },
        strategy: strategy(spec, seed),
    }
}

fn solver_err(label: &str, shifts: &[usize], e: impl std::fmt::Display) -> String {
    format!("{label} (shifts {shifts:?}): {e}")
}

/// Initial recycle space from `[recycle] initial_space`, if any, with the
/// matvecs spent computing its image.
pub fn initial_space(cfg: &ExperimentConfig, problem: &Problem) -> Result<(RecycleSpace, usize), HarnessError> {
    match &cfg.recycle.initial_space {
        None => Ok((RecycleSpace::empty(problem.n()), 0)),
        Some(path) => {
            let u = read_dense_block(path).map_err(|e| match e {
                sbkrylov::Error::Io(source) => HarnessError::Io {
                    path: path.clone(),
                    source,
                },
                other => HarnessError::Config(format!("{}: {other}", path.display())),
            })?;
            let space = RecycleSpace::new(&problem.matrix, &u, Provenance::Initial)
                .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
            Ok((space, u.n_cols()))
        }
    }
}

fn store(outcome: &mut MethodOutcome, indices: Vec<usize>, x: &DenseBlock, report: SolveReport, setup_matvecs: usize) {
    for (j, &i) in indices.iter().enumerate() {
        outcome.solution.set_col(i, x.col(j));
    }
    outcome.groups.push(GroupReport {
        indices,
        report,
        setup_matvecs,
    });
}

pub(crate) fn groups_of(l: usize, size: usize) -> Vec<Vec<usize>> {
    (0..l).collect::<Vec<_>>().chunks(size).map(<[usize]>::to_vec).collect()
}

/// Runs `spec` on every shift of `problem`. Solver errors end the method
/// and are returned in the outcome; config errors are returned as `Err`.
pub fn run_method(
    cfg: &ExperimentConfig,
    spec: &MethodSpec,
    problem: &Problem,
    seed: u64,
) -> Result<MethodOutcome, HarnessError> {
    let start = Instant::now();
    let label = spec.label();
    let scfg = solver_config(spec, seed);
    let n = problem.n();
    let l = problem.shifts.len();
    let mut outcome = MethodOutcome {
        label: label.clone(),
        name: spec.name,
        groups: Vec::new(),
        solution: DenseBlock::zeros(n, l),
        error: None,
        seconds: 0.0,
    };
    match spec.name {
        MethodName::Sbgmres | MethodName::Sbfom | MethodName::Rsbgmres => {
            let (mut space, mut setup) = if spec.name == MethodName::Rsbgmres {
                initial_space(cfg, problem)?
            } else {
                (RecycleSpace::empty(n), 0)
            };
            for (g, indices) in groups_of(l, cfg.group_size).into_iter().enumerate() {
                let family = problem.subfamily(&indices)?;
                let sseed = sbkrylov::random::derive_seed(scfg.seed, g as u64);
                let strat = strategy(spec, sseed);
                let gcfg = scfg.clone().with_seed(sseed);
                let result = match spec.name {
                    MethodName::Sbgmres => sbgmres(&family, &gcfg, &strat),
                    MethodName::Sbfom => sbfom(&family, &gcfg, &strat),
                    _ => rsbgmres(&family, &gcfg, &space, &recycle_config(cfg, spec, sseed)).map(|(x, r, s)| {
                        space = s;
                        (x, r)
                    }),
                };
                match result {
                    Ok((x, report)) => store(&mut outcome, indices, &x, report, std::mem::take(&mut setup)),
                    Err(e) => {
                        outcome.error = Some(solver_err(&label, &indices, e));
                        break;
                    }
                }
            }
        }
        MethodName::Gmres | MethodName::Fom | MethodName::Rgmres => {
            let mut space = RecycleSpace::empty(n);
            let mut setup = 0;
            if spec.name == MethodName::Rgmres {
                (space, setup) = initial_space(cfg, problem)?;
            }
            let rcfg = recycle_config(cfg, spec, scfg.seed);
            for i in 0..l {
                let shifted = match problem.matrix.shifted(problem.shifts[i]) {
                    Ok(a) => a,
                    Err(e) => {
                        outcome.error = Some(solver_err(&label, &[i], e));
                        break;
                    }
                };
                let b = problem.rhs.col(i);
                let x0 = vec![C64::default(); n];
                let result = match spec.name {
                    MethodName::Gmres => gmres_restarted(&shifted, b, &x0, &scfg),
                    MethodName::Fom => fom_restarted(&shifted, b, &x0, &scfg),
                    _ => {
                        // the space was built for the previous matrix
                        if !space.is_empty() {
                            match space.rebase(&shifted) {
                                Ok(s) => {
                                    setup += s.k();
                                    space = s;
                                }
                                Err(e) => {
                                    outcome.error = Some(solver_err(&label, &[i], e));
                                    break;
                                }
                            }
                        }
                        rgmres_baseline(&shifted, b, &x0, &scfg, &space, &rcfg).map(|(x, r, s)| {
                            space = s;
                            (x, r)
                        })
                    }
                };
                match result {
                    Ok((x, mut report)) => {
                        report.shifts = vec![problem.shifts[i]];
                        let x = DenseBlock::from_col_major(n, 1, x).expect("length n");
                        store(&mut outcome, vec![i], &x, report, std::mem::take(&mut setup));
                    }
                    Err(e) => {
                        outcome.error = Some(solver_err(&label, &[i], e));
                        break;
                    }
                }
            }
        }
        MethodName::Sgmres | MethodName::Sfom => {
            let family = problem.family()?;
            let result = if spec.name == MethodName::Sgmres {
                sgmres_frommer(&family, &scfg, BaseShift::SmallestModulus)
            } else {
                sfom_simoncini(&family, &scfg)
            };
            match result {
                Ok((x, report)) => store(&mut outcome, (0..l).collect(), &x, report, 0),
                Err(e) => outcome.error = Some(solver_err(&label, &(0..l).collect::<Vec<_>>(), e)),
            }
        }
    }
    outcome.seconds = start.elapsed().as_secs_f64();
    Ok(outcome)
}
