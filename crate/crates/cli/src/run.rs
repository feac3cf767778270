//! The `run` protocol: every configured method on one problem, with the
//! history CSV, relative-residual CSV, summary table and manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::{ExperimentConfig, MethodName};
use crate::error::HarnessError;
use crate::methods::{run_method, HistoryRow, MethodOutcome};
use crate::problem::{build_problem, Problem};

pub const HISTORY_FILE: &str = "history.csv";
pub const RELATIVE_FILE: &str = "relative.csv";
pub const SUMMARY_FILE: &str = "summary.txt";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const MANIFEST_FILE: &str = "manifest.txt";

/// Command-line overrides applied on top of a loaded config.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub methods: Vec<String>,
    pub multiplier: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) -> Result<(), HarnessError> {
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(m) = self.multiplier {
            cfg.block_cost_multiplier = m;
        }
        if !self.methods.is_empty() {
            for name in &self.methods {
                if MethodName::parse(name).is_none() && !cfg.methods.iter().any(|m| m.label() == *name) {
                    return Err(HarnessError::Config(format!("--method {name}: no such method")));
                }
            }
            cfg.methods
                .retain(|m| self.methods.iter().any(|s| *s == m.label() || *s == m.name.as_str()));
            if cfg.methods.is_empty() {
                return Err(HarnessError::Config("--method filter selected no configured method".into()));
            }
        }
        cfg.validate()
    }
}

/// One line of the summary table; every number comes from the history rows.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SummaryRow {
    pub method: String,
    pub block: bool,
    pub matvecs: usize,
    pub block_matvecs: usize,
    pub block_matvecs_scaled: f64,
    /// Operator applications: block products for block methods, single
    /// products otherwise.
    pub applications: usize,
    /// Single-product equivalent cost: `block_matvecs × multiplier` for
    /// block methods, `matvecs` otherwise.
    pub cost: f64,
    pub converged: usize,
    pub shifts: usize,
    pub status: String,
}

pub fn summarize(rows: &[HistoryRow], label: &str, block: bool, multiplier: f64, n_shifts: usize, error: Option<&str>) -> SummaryRow {
    let mine: Vec<&HistoryRow> = rows.iter().filter(|r| r.method == label).collect();
    let matvecs = mine.iter().map(|r| r.matvecs).max().unwrap_or(0);
    let block_matvecs = mine.iter().map(|r| r.block_matvecs).max().unwrap_or(0);
    let mut last = vec![false; n_shifts];
    for r in &mine {
        last[r.shift] = r.converged;
    }
    let converged = last.iter().filter(|&&c| c).count();
    let scaled = block_matvecs as f64 * multiplier;
    let status = match error {
        Some(e) => format!("failed: {e}"),
        None if converged == n_shifts => "converged".to_string(),
        None => "not converged".to_string(),
    };
    SummaryRow {
        method: label.to_string(),
        block,
        matvecs,
        block_matvecs,
        block_matvecs_scaled: scaled,
        applications: if block { block_matvecs } else { matvecs },
        cost: if block { scaled } else { matvecs as f64 },
        converged,
        shifts: n_shifts,
        status,
    }
}

#[derive(Debug)]
pub struct RunResult {
    pub problem: Problem,
    pub outcomes: Vec<MethodOutcome>,
    pub summary: Vec<SummaryRow>,
    pub out_dir: PathBuf,
}

impl RunResult {
    /// True when every method finished without error and solved every shift.
    pub fn success(&self) -> bool {
        self.summary.iter().all(|s| s.status == "converged")
    }

    pub fn summary_for(&self, label: &str) -> Option<&SummaryRow> {
        self.summary.iter().find(|s| s.method == label)
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    fs::write(path, text).map_err(HarnessError::io(path))
}

pub fn write_csv<T: serde::Serialize>(path: &Path, rows: &[T]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path).map_err(HarnessError::csv(path))?;
    for r in rows {
        w.serialize(r).map_err(HarnessError::csv(path))?;
    }
    w.flush().map_err(HarnessError::io(path))
}

pub fn read_csv<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, HarnessError> {
    let mut r = csv::Reader::from_path(path).map_err(HarnessError::csv(path))?;
    r.deserialize().collect::<Result<_, _>>().map_err(HarnessError::csv(path))
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RelativeRow {
    pub method: String,
    pub group: usize,
    pub iteration: usize,
    pub shift: usize,
    pub rel_resid: f64,
    /// `‖R‖_F / ‖B‖_F` over the group at this iteration.
    pub joint_rel_frobenius: f64,
}

/// Per-shift relative residuals and the group's joint Frobenius relative
/// residual, iteration by iteration. Shifts without a record at an
/// iteration contribute their latest norm to the joint value.
pub fn relative_rows(outcome: &MethodOutcome) -> Vec<RelativeRow> {
    let mut out = Vec::new();
    for (g, group) in outcome.groups.iter().enumerate() {
        let rep = &group.report;
        let b_sq: f64 = rep.rhs_norms.iter().map(|b| b * b).sum();
        let mut current = rep.initial_residual_norms.clone();
        let hist = &rep.history;
        let mut start = 0;
        while start < hist.len() {
            let it = hist[start].iteration;
            let mut end = start;
            while end < hist.len() && hist[end].iteration == it {
                current[hist[end].shift] = hist[end].resid_norm;
                end += 1;
            }
            let r_sq: f64 = current.iter().map(|r| r * r).sum();
            let joint = if b_sq > 0.0 { (r_sq / b_sq).sqrt() } else { r_sq.sqrt() };
            for rec in &hist[start..end] {
                let b = rep.rhs_norms[rec.shift];
                out.push(RelativeRow {
                    method: outcome.label.clone(),
                    group: g,
                    iteration: it,
                    shift: group.indices[rec.shift],
                    rel_resid: if b > 0.0 { rec.resid_norm / b } else { rec.resid_norm },
                    joint_rel_frobenius: joint,
                });
            }
            start = end;
        }
    }
    out
}

pub fn format_summary(rows: &[SummaryRow], multiplier: f64) -> String {
    let scaled_head = format!("Block matvecs x {multiplier}");
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<16} {:>10} {:>14} {:>22} {:>14} {:>12}  {}",
        "Method", "Matvecs", "Block matvecs", scaled_head, "Applications", "Converged", "Status"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:<16} {:>10} {:>14} {:>22} {:>14} {:>12}  {}",
            r.method,
            r.matvecs,
            r.block_matvecs,
            format!("{}", (r.block_matvecs_scaled * 1e6).round() / 1e6),
            r.applications,
            format!("{}/{}", r.converged, r.shifts),
            r.status
        );
    }
    s
}

pub(crate) fn manifest_header(cfg: &ExperimentConfig, command: &str, problem: &Problem) -> String {
    let mut m = String::new();
    let _ = writeln!(m, "tool = sbkrylov-harness");
    let _ = writeln!(m, "version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(m, "command = {command}");
    let _ = writeln!(m, "seed = {}", cfg.seed);
    let _ = writeln!(m, "problem = {}", problem.description);
    let _ = writeln!(m, "n = {}", problem.n());
    let _ = writeln!(m, "nnz = {}", problem.matrix.nnz());
    let _ = writeln!(m, "shift_count = {}", problem.shifts.len());
    let shifts: Vec<String> = problem.shifts.iter().map(|s| format!("{}{:+}i", s.re, s.im)).collect();
    let _ = writeln!(m, "shifts = {}", shifts.join(" "));
    let _ = writeln!(m, "rhs_mode = {:?}", cfg.rhs.mode);
    let _ = writeln!(m, "block_cost_multiplier = {}", cfg.block_cost_multiplier);
    let _ = writeln!(m, "group_size = {}", cfg.group_size);
    m
}

pub(crate) fn manifest_config_echo(cfg: &ExperimentConfig) -> String {
    let mut m = String::new();
    for line in cfg.source.lines() {
        let _ = writeln!(m, "config = {line}");
    }
    m
}

fn manifest_method(outcome: &MethodOutcome, cfg: &ExperimentConfig) -> String {
    let p = format!("method.{}", outcome.label);
    let spec = cfg.methods.iter().find(|m| m.label() == outcome.label);
    let mut m = String::new();
    let _ = writeln!(m, "{p}.name = {}", outcome.name.as_str());
    if let Some(spec) = spec {
        let _ = writeln!(m, "{p}.seed = {}", spec.seed.unwrap_or(cfg.seed));
        let _ = writeln!(m, "{p}.cycle_length = {}", spec.cycle_length);
        let _ = writeln!(m, "{p}.tolerance = {}", spec.tolerance);
    }
    let _ = writeln!(m, "{p}.error = {}", outcome.error.as_deref().unwrap_or("none"));
    let mv: usize = outcome.groups.iter().map(|g| g.report.matvec_count + g.setup_matvecs).sum();
    let bmv: usize = outcome.groups.iter().map(|g| g.report.block_matvec_count).sum();
    let _ = writeln!(m, "{p}.matvecs = {mv}");
    let _ = writeln!(m, "{p}.block_matvecs = {bmv}");
    let _ = writeln!(m, "{p}.replacements = {}", outcome.replacements());
    if outcome.name.is_block() {
        // block products times their widths against the single-product total
        let in_blocks: usize = outcome
            .groups
            .iter()
            .map(|g| g.report.block_matvec_count * g.indices.len())
            .sum();
        let _ = writeln!(m, "{p}.matvecs_in_block_products = {in_blocks}");
        let _ = writeln!(m, "{p}.matvecs_outside_block_products = {}", mv as i64 - in_blocks as i64);
        let holds = mv == in_blocks;
        let _ = writeln!(m, "{p}.block_identity_holds = {holds}");
    }
    let _ = writeln!(m, "{p}.seconds = {:.3}", outcome.seconds);
    for note in outcome.notes() {
        let _ = writeln!(m, "{p}.note = {note}");
    }
    m
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunResult, HarnessError> {
    cfg.validate()?;
    let problem = build_problem(cfg)?;
    let out_dir = cfg.output_dir.clone();
    fs::create_dir_all(&out_dir).map_err(HarnessError::io(&out_dir))?;
    let mut outcomes = Vec::new();
    for spec in &cfg.methods {
        outcomes.push(run_method(cfg, spec, &problem, cfg.seed)?);
    }
    let rows: Vec<HistoryRow> = outcomes.iter().flat_map(MethodOutcome::rows).collect();
    let relative: Vec<_> = outcomes.iter().flat_map(relative_rows).collect();
    let l = problem.shifts.len();
    let summary: Vec<SummaryRow> = outcomes
        .iter()
        .map(|o| summarize(&rows, &o.label, o.name.is_block(), cfg.block_cost_multiplier, l, o.error.as_deref()))
        .collect();

    write_csv(&out_dir.join(HISTORY_FILE), &rows)?;
    write_csv(&out_dir.join(RELATIVE_FILE), &relative)?;
    write_csv(&out_dir.join(SUMMARY_CSV), &summary)?;
    write_text(&out_dir.join(SUMMARY_FILE), &format_summary(&summary, cfg.block_cost_multiplier))?;
    let mut manifest = manifest_header(cfg, "run", &problem);
    for o in &outcomes {
        manifest.push_str(&manifest_method(o, cfg));
    }
    manifest.push_str(&manifest_config_echo(cfg));
    write_text(&out_dir.join(MANIFEST_FILE), &manifest)?;

    Ok(RunResult {
        problem,
        outcomes,
        summary,
        out_dir,
    })
}
