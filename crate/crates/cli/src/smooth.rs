//! Smooth-parameter protocol: solve a few systems, use their solutions as
//! the recycle space, and solve the rest with rsbGMRES against a plain
//! sbGMRES baseline.

use std::fmt::Write as _;
use std::fs;
use std::time::Instant;

use sbkrylov::random::derive_seed;
use sbkrylov::{
    gmres_restarted, rsbgmres, sbgmres, DenseBlock, RecycleConfig, RecycleSpace, RecycleUpdate, SolveReport,
    SolverConfig, C64,
};

use crate::config::{ExperimentConfig, RhsMode, SeedMethod};
use crate::error::HarnessError;
use crate::methods::{groups_of, solver_config, strategy, GroupReport, HistoryRow, MethodOutcome};
use crate::problem::{build_problem, Problem};
use crate::run::{manifest_config_echo, manifest_header, write_csv, write_text, HISTORY_FILE, MANIFEST_FILE};
use crate::stats::{numerical_rank, singular_values};

pub const SYSTEMS_FILE: &str = "smooth.csv";
pub const SMOOTH_SUMMARY_FILE: &str = "smooth_summary.txt";
pub const SINGULAR_FILE: &str = "singular_values.csv";

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SystemRow {
    pub shift: usize,
    pub sigma: f64,
    /// `seed` or `recycled`.
    pub role: String,
    pub group: usize,
    /// Iterations to converge with the recycle space (seed solves: the
    /// seed method's count).
    pub iterations: usize,
    pub converged: bool,
    /// Iterations of plain sbGMRES on the same group.
    pub baseline_iterations: usize,
    pub baseline_converged: bool,
}

#[derive(Debug)]
pub struct SmoothResult {
    pub systems: Vec<SystemRow>,
    pub seed_indices: Vec<usize>,
    /// Mean iterations over the non-seed systems.
    pub mean_recycled: f64,
    pub mean_baseline: f64,
    /// Reference solutions of every system, in shift order.
    pub reference_solutions: DenseBlock,
    pub singular_values: Vec<f64>,
    pub dimension: usize,
    pub rank_threshold: f64,
}

fn iterations(report: &SolveReport, j: usize) -> (usize, bool) {
    match report.iterations_to_converge(j) {
        Some(it) => (it, true),
        None => (report.iterations, false),
    }
}

fn solve_groups(
    problem: &Problem,
    indices: &[usize],
    group_size: usize,
    cfg: &SolverConfig,
    mut solve: impl FnMut(&sbkrylov::ShiftedFamily, &SolverConfig) -> sbkrylov::Result<(DenseBlock, SolveReport)>,
) -> Result<Vec<GroupReport>, HarnessError> {
    let mut out = Vec::new();
    for (g, chunk) in groups_of(indices.len(), group_size).into_iter().enumerate() {
        let idx: Vec<usize> = chunk.iter().map(|&c| indices[c]).collect();
        let family = problem.subfamily(&idx)?;
        let gcfg = cfg.clone().with_seed(derive_seed(cfg.seed, g as u64));
        let (_, report) = solve(&family, &gcfg).map_err(|e| HarnessError::Solver(format!("shifts {idx:?}: {e}")))?;
        out.push(GroupReport {
            indices: idx,
            report,
            setup_matvecs: 0,
        });
    }
    Ok(out)
}

fn outcome(label: &str, groups: Vec<GroupReport>, n: usize, l: usize) -> MethodOutcome {
    MethodOutcome {
        label: label.to_string(),
        name: crate::config::MethodName::Sbgmres,
        groups,
        solution: DenseBlock::zeros(n, l),
        error: None,
        seconds: 0.0,
    }
}

pub fn run_smooth(cfg: &ExperimentConfig) -> Result<SmoothResult, HarnessError> {
    cfg.validate()?;
    if cfg.shifts.interval.is_none() {
        return Err(HarnessError::Config("smooth-param needs shifts drawn from shifts.interval".into()));
    }
    if cfg.rhs.mode != RhsMode::SmoothParameter {
        return Err(HarnessError::Config("smooth-param needs rhs.mode = \"smooth-parameter\"".into()));
    }
    let start = Instant::now();
    let sp = &cfg.smooth;
    let spec = &cfg.methods[0];
    let scfg = solver_config(spec, cfg.seed);
    let problem = build_problem(cfg)?;
    let (n, l) = (problem.n(), problem.shifts.len());
    let n_seed = sp.n_seed.min(l);
    let seed_indices: Vec<usize> = (0..n_seed).collect();
    let rest: Vec<usize> = (n_seed..l).collect();
    let strat = strategy(spec, cfg.seed);

    // seed solves
    let mut seed_groups = Vec::new();
    let mut seed_x = DenseBlock::zeros(n, n_seed);
    match sp.seed_method {
        SeedMethod::Sbgmres => {
            for (g, chunk) in groups_of(n_seed, sp.group_size).into_iter().enumerate() {
                let family = problem.subfamily(&chunk)?;
                let gcfg = scfg.clone().with_seed(derive_seed(scfg.seed, g as u64));
                let (x, report) = sbgmres(&family, &gcfg, &strat)
                    .map_err(|e| HarnessError::Solver(format!("seed shifts {chunk:?}: {e}")))?;
                for (j, &i) in chunk.iter().enumerate() {
                    seed_x.set_col(i, x.col(j));
                }
                seed_groups.push(GroupReport {
                    indices: chunk,
                    report,
                    setup_matvecs: 0,
                });
            }
        }
        SeedMethod::Gmres => {
            for i in 0..n_seed {
                let shifted = problem
                    .matrix
                    .shifted(problem.shifts[i])
                    .map_err(|e| HarnessError::Solver(e.to_string()))?;
                let (x, report) = gmres_restarted(&shifted, problem.rhs.col(i), &vec![C64::default(); n], &scfg)
                    .map_err(|e| HarnessError::Solver(format!("seed shift {i}: {e}")))?;
                seed_x.set_col(i, &x);
                seed_groups.push(GroupReport {
                    indices: vec![i],
                    report,
                    setup_matvecs: 0,
                });
            }
        }
    }

    let space = RecycleSpace::from_solutions(&problem.matrix, &seed_x)
        .map_err(|e| HarnessError::Solver(format!("solution space: {e}")))?;
    let rcfg = RecycleConfig {
        k: space.k(),
        update: RecycleUpdate::Keep,
        strategy: strat.clone(),
        ..RecycleConfig::default()
    };
    let mut recycled = solve_groups(&problem, &rest, sp.group_size, &scfg, |f, c| {
        rsbgmres(f, c, &space, &rcfg).map(|(x, r, _)| (x, r))
    })?;
    if let Some(first) = recycled.first_mut() {
        first.setup_matvecs = space.k();
    }
    let baseline = solve_groups(&problem, &rest, sp.group_size, &scfg, |f, c| sbgmres(f, c, &strat))?;

    let mut systems = Vec::with_capacity(l);
    for (g, grp) in seed_groups.iter().enumerate() {
        for (j, &i) in grp.indices.iter().enumerate() {
            let (it, ok) = iterations(&grp.report, j);
            systems.push(SystemRow {
                shift: i,
                sigma: problem.shifts[i].re,
                role: "seed".into(),
                group: g,
                iterations: it,
                converged: ok,
                baseline_iterations: it,
                baseline_converged: ok,
            });
        }
    }
    for (g, (rg, bg)) in recycled.iter().zip(&baseline).enumerate() {
        for (j, &i) in rg.indices.iter().enumerate() {
            let (it, ok) = iterations(&rg.report, j);
            let (bit, bok) = iterations(&bg.report, j);
            systems.push(SystemRow {
                shift: i,
                sigma: problem.shifts[i].re,
                role: "recycled".into(),
                group: g,
                iterations: it,
                converged: ok,
                baseline_iterations: bit,
                baseline_converged: bok,
            });
        }
    }
    let rest_rows: Vec<&SystemRow> = systems.iter().filter(|s| s.role == "recycled").collect();
    let mean = |f: fn(&SystemRow) -> usize| {
        if rest_rows.is_empty() {
            0.0
        } else {
            rest_rows.iter().map(|r| f(r) as f64).sum::<f64>() / rest_rows.len() as f64
        }
    };
    let mean_recycled = mean(|r| r.iterations);
    let mean_baseline = mean(|r| r.baseline_iterations);

    // reference solutions for the subspace dimension
    let mut ref_cfg = scfg.clone();
    ref_cfg.tolerance = sp.reference_tolerance;
    ref_cfg.max_cycles = ref_cfg.max_cycles.max(1000);
    let all: Vec<usize> = (0..l).collect();
    let mut reference = DenseBlock::zeros(n, l);
    let mut reference_notes = Vec::new();
    for (g, chunk) in groups_of(l, sp.group_size).into_iter().enumerate() {
        let idx: Vec<usize> = chunk.iter().map(|&c| all[c]).collect();
        let family = problem.subfamily(&idx)?;
        let gcfg = ref_cfg.clone().with_seed(derive_seed(ref_cfg.seed, g as u64));
        let (x, report) = sbgmres(&family, &gcfg, &strat)
            .map_err(|e| HarnessError::Solver(format!("reference shifts {idx:?}: {e}")))?;
        if !report.all_converged() {
            reference_notes.push(format!("reference group {g} did not reach {}", sp.reference_tolerance));
        }
        for (j, &i) in idx.iter().enumerate() {
            reference.set_col(i, x.col(j));
        }
    }
    let sv = singular_values(&reference);
    let dimension = numerical_rank(&sv, sp.rank_threshold);

    // artifacts
    let out_dir = cfg.output_dir.clone();
    fs::create_dir_all(&out_dir).map_err(HarnessError::io(&out_dir))?;
    write_csv(&out_dir.join(SYSTEMS_FILE), &systems)?;
    let history: Vec<HistoryRow> = [
        outcome("seed", seed_groups, n, l),
        outcome("rsbgmres", recycled, n, l),
        outcome("sbgmres-baseline", baseline, n, l),
    ]
    .iter()
    .flat_map(MethodOutcome::rows)
    .collect();
    write_csv(&out_dir.join(HISTORY_FILE), &history)?;
    #[derive(serde::Serialize)]
    struct SvRow {
        index: usize,
        value: f64,
    }
    let sv_rows: Vec<SvRow> = sv.iter().enumerate().map(|(index, &value)| SvRow { index, value }).collect();
    write_csv(&out_dir.join(SINGULAR_FILE), &sv_rows)?;

    let mut text = String::new();
    let _ = writeln!(text, "systems = {l}");
    let _ = writeln!(text, "seed systems = {n_seed} ({:?})", sp.seed_method);
    let _ = writeln!(text, "recycle space dimension = {}", space.k());
    let _ = writeln!(text, "mean iterations, recycled = {mean_recycled}");
    let _ = writeln!(text, "mean iterations, no augmentation = {mean_baseline}");
    if mean_baseline > 0.0 {
        let _ = writeln!(text, "ratio = {}", mean_recycled / mean_baseline);
    }
    let _ = writeln!(
        text,
        "solution subspace dimension = {dimension} (singular values > {} sigma_1)",
        sp.rank_threshold
    );
    for note in &reference_notes {
        let _ = writeln!(text, "note: {note}");
    }
    write_text(&out_dir.join(SMOOTH_SUMMARY_FILE), &text)?;

    let mut manifest = manifest_header(cfg, "smooth-param", &problem);
    let _ = writeln!(manifest, "n_seed = {n_seed}");
    let _ = writeln!(manifest, "smooth_group_size = {}", sp.group_size);
    let _ = writeln!(manifest, "seed_method = {:?}", sp.seed_method);
    let _ = writeln!(manifest, "reference_tolerance = {}", sp.reference_tolerance);
    let _ = writeln!(manifest, "rank_threshold = {}", sp.rank_threshold);
    let _ = writeln!(manifest, "seconds = {:.3}", start.elapsed().as_secs_f64());
    manifest.push_str(&manifest_config_echo(cfg));
    write_text(&out_dir.join(MANIFEST_FILE), &manifest)?;

    Ok(SmoothResult {
        systems,
        seed_indices,
        mean_recycled,
        mean_baseline,
        reference_solutions: reference,
        singular_values: sv,
        dimension,
        rank_threshold: sp.rank_threshold,
    })
}
