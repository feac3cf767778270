//! Repeated solves of one method with different random seeds, for the
//! spread of matvec counts caused by the random choices in the method.

use std::fmt::Write as _;
use std::fs;

use sbkrylov::random::derive_seed;

use crate::config::{ExperimentConfig, StrategyName};
use crate::error::HarnessError;
use crate::methods::run_method;
use crate::problem::build_problem;
use crate::run::{manifest_config_echo, manifest_header, write_csv, write_text, MANIFEST_FILE};
use crate::stats::{caption, histogram, moments, Moments};

pub const TRIALS_FILE: &str = "trials.csv";
pub const HISTOGRAM_FILE: &str = "histogram.csv";
pub const STATS_FILE: &str = "stats.txt";

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrialRow {
    pub trial: usize,
    pub seed: u64,
    pub matvecs: usize,
    pub block_matvecs: usize,
    /// Block products for block methods, single products otherwise.
    pub applications: usize,
    pub converged: bool,
    pub error: String,
}

#[derive(Clone, Debug, serde::Serialize)]
struct BinRow {
    lower: f64,
    upper: f64,
    count: usize,
}

#[derive(Debug)]
pub struct VariabilityResult {
    pub method: String,
    pub trials: Vec<TrialRow>,
    /// Over converged trials only.
    pub moments: Option<Moments>,
    pub excluded: usize,
}

pub fn run_variability(cfg: &ExperimentConfig, trials: usize) -> Result<VariabilityResult, HarnessError> {
    cfg.validate()?;
    if trials < 2 {
        return Err(HarnessError::Config(format!("variability needs at least 2 trials, got {trials}")));
    }
    let spec = &cfg.methods[0];
    if !matches!(spec.strategy, StrategyName::FomRandomBlock | StrategyName::RandomX0) {
        return Err(HarnessError::Config(format!(
            "method {}: variability needs strategy \"fom-random-block\" or \"random-x0\"",
            spec.label()
        )));
    }
    let problem = build_problem(cfg)?;
    let out_dir = cfg.output_dir.clone();
    fs::create_dir_all(&out_dir).map_err(HarnessError::io(&out_dir))?;

    let mut rows = Vec::with_capacity(trials);
    let mut seconds = 0.0;
    for t in 0..trials {
        let seed = if cfg.variability.same_seed {
            cfg.seed
        } else {
            derive_seed(cfg.seed, t as u64)
        };
        let mut tspec = spec.clone();
        tspec.seed = Some(seed);
        let outcome = run_method(cfg, &tspec, &problem, seed)?;
        seconds += outcome.seconds;
        let hist = outcome.rows();
        let matvecs = hist.iter().map(|r| r.matvecs).max().unwrap_or(0);
        let block_matvecs = hist.iter().map(|r| r.block_matvecs).max().unwrap_or(0);
        let converged = outcome.error.is_none() && outcome.converged(problem.shifts.len()).iter().all(|&c| c);
        rows.push(TrialRow {
            trial: t,
            seed,
            matvecs,
            block_matvecs,
            applications: if spec.name.is_block() { block_matvecs } else { matvecs },
            converged,
            error: outcome.error.unwrap_or_default(),
        });
    }
    let good: Vec<f64> = rows.iter().filter(|r| r.converged).map(|r| r.applications as f64).collect();
    let excluded = rows.len() - good.len();
    let m = moments(&good);

    write_csv(&out_dir.join(TRIALS_FILE), &rows)?;
    let bins: Vec<BinRow> = histogram(&good, cfg.variability.bins)
        .into_iter()
        .map(|(lower, upper, count)| BinRow { lower, upper, count })
        .collect();
    write_csv(&out_dir.join(HISTOGRAM_FILE), &bins)?;
    let mut text = String::new();
    let _ = writeln!(text, "Histogram of matvec counts for different runs ({}, {} trials)", spec.label(), trials);
    match &m {
        Some(m) => {
            let _ = writeln!(text, "{}", caption(m));
        }
        None => {
            let _ = writeln!(text, "no trial converged");
        }
    }
    if excluded > 0 {
        let _ = writeln!(text, "{excluded} trial(s) did not converge and are excluded");
    }
    write_text(&out_dir.join(STATS_FILE), &text)?;

    let mut manifest = manifest_header(cfg, "variability", &problem);
    let _ = writeln!(manifest, "method = {}", spec.label());
    let _ = writeln!(manifest, "trials = {trials}");
    let _ = writeln!(manifest, "same_seed = {}", cfg.variability.same_seed);
    let _ = writeln!(manifest, "excluded = {excluded}");
    let _ = writeln!(manifest, "seconds = {seconds:.3}");
    manifest.push_str(&manifest_config_echo(cfg));
    write_text(&out_dir.join(MANIFEST_FILE), &manifest)?;

    Ok(VariabilityResult {
        method: spec.label(),
        trials: rows,
        moments: m,
        excluded,
    })
}
