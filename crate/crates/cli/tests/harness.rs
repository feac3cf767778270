use std::path::Path;
use std::process::Command;

use sbkrylov_harness::methods::HistoryRow;
use sbkrylov_harness::run::{read_csv, HISTORY_FILE, SUMMARY_CSV};
use sbkrylov_harness::variability::{TrialRow, TRIALS_FILE};
use sbkrylov_harness::{run_experiment, run_smooth, run_variability, ExperimentConfig, SummaryRow};

fn config(out: &Path, body: &str) -> String {
    format!(
        r#"
seed = 4
output_dir = "{}"

[problem]
kind = "convection-diffusion"
grid = 10
convection = 5.0

[shifts]
values = [0.0, 0.5, 2.0]

{body}
"#,
        out.display()
    )
}

fn load(out: &Path, body: &str) -> ExperimentConfig {
    ExperimentConfig::from_toml(&config(out, body)).unwrap()
}

#[test]
fn single_vector_history_has_one_row_per_product() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = load(dir.path(), "[rhs]\nmode = \"unrelated-random\"\n\n[[methods]]\nname = \"gmres\"\ncycle_length = 10\n");
    let res = run_experiment(&cfg).unwrap();
    assert!(res.success());
    let rows: Vec<HistoryRow> = read_csv(&dir.path().join(HISTORY_FILE)).unwrap();
    let summary = res.summary_for("gmres").unwrap();
    assert_eq!(rows.len(), summary.matvecs);
    assert_eq!(summary.block_matvecs, 0);
    let text = std::fs::read_to_string(dir.path().join(HISTORY_FILE)).unwrap();
    assert_eq!(text.lines().count(), rows.len() + 1);
}

#[test]
fn unit_multiplier_leaves_block_counts_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = load(dir.path(), "[rhs]\nmode = \"unrelated-random\"\n\n[[methods]]\nname = \"sbgmres\"\ncycle_length = 10\n");
    cfg.block_cost_multiplier = 1.0;
    let res = run_experiment(&cfg).unwrap();
    let s = res.summary_for("sbgmres").unwrap();
    assert_eq!(s.block_matvecs_scaled, s.block_matvecs as f64);
    assert_eq!(s.cost, s.block_matvecs as f64);
    assert_eq!(s.matvecs, 3 * s.block_matvecs);
}

#[test]
fn summary_is_rederivable_from_the_history() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"
[rhs]
mode = "unrelated-random"

[[methods]]
name = "sbgmres"
cycle_length = 8

[[methods]]
name = "sbfom"
cycle_length = 8

[[methods]]
name = "rsbgmres"
cycle_length = 8

[[methods]]
name = "gmres"
cycle_length = 8

[[methods]]
name = "rgmres"
cycle_length = 8
"#;
    let cfg = load(dir.path(), body);
    let res = run_experiment(&cfg).unwrap();
    let rows: Vec<HistoryRow> = read_csv(&dir.path().join(HISTORY_FILE)).unwrap();
    let summary: Vec<SummaryRow> = read_csv(&dir.path().join(SUMMARY_CSV)).unwrap();
    assert_eq!(summary.len(), 5);
    for s in &summary {
        let mine: Vec<&HistoryRow> = rows.iter().filter(|r| r.method == s.method).collect();
        let last = mine.last().unwrap();
        assert_eq!(s.matvecs, last.matvecs, "{}", s.method);
        assert_eq!(s.block_matvecs, last.block_matvecs, "{}", s.method);
        // counters only grow
        assert!(mine.windows(2).all(|w| w[0].matvecs <= w[1].matvecs));
        let mut done = std::collections::BTreeSet::new();
        for r in &mine {
            if r.converged {
                done.insert(r.shift);
            }
        }
        assert_eq!(s.converged, done.len(), "{}", s.method);
        let want = if s.block { s.block_matvecs } else { s.matvecs };
        assert_eq!(s.applications, want);
        let cost = if s.block { s.block_matvecs as f64 * 3.3 } else { s.matvecs as f64 };
        assert!((s.cost - cost).abs() <= 1e-9 * cost.max(1.0));
        assert_eq!(res.summary_for(&s.method).unwrap(), s);
    }
}

#[test]
fn same_seed_trials_have_no_spread() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"
[rhs]
mode = "shared-random"

[variability]
same_seed = true

[[methods]]
name = "sbfom"
cycle_length = 10
strategy = "fom-random-block"
"#;
    let cfg = load(dir.path(), body);
    let res = run_variability(&cfg, 2).unwrap();
    let m = res.moments.unwrap();
    assert_eq!(m.std_dev, 0.0);
    assert_eq!(res.trials[0].applications, res.trials[1].applications);
}

#[test]
fn variability_statistics_match_the_trial_table() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"
[rhs]
mode = "shared-random"

[[methods]]
name = "sbfom"
cycle_length = 6
strategy = "fom-random-block"
"#;
    let cfg = load(dir.path(), body);
    let res = run_variability(&cfg, 50).unwrap();
    let rows: Vec<TrialRow> = read_csv(&dir.path().join(TRIALS_FILE)).unwrap();
    assert_eq!(rows.len(), 50);
    let v: Vec<f64> = rows.iter().filter(|r| r.converged).map(|r| r.applications as f64).collect();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let m = res.moments.unwrap();
    assert!((m.mean - mean).abs() <= 1e-12 * mean);
    assert!((m.std_dev - var.sqrt()).abs() <= 1e-12 * mean);
    assert!(m.std_dev > 0.0, "fifty random initial blocks gave identical counts");
    let mut sorted = v.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = sorted.len();
    let median = if k % 2 == 1 { sorted[k / 2] } else { 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]) };
    assert_eq!(m.median, median);
}

#[test]
fn seeding_every_system_leaves_nothing_to_solve() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        r#"
seed = 2
output_dir = "{}"

[problem]
kind = "convection-diffusion"
grid = 8

[shifts]
interval = [1.0, 2.0]
count = 6

[rhs]
mode = "smooth-parameter"

[smooth]
n_seed = 6

[[methods]]
name = "sbgmres"
cycle_length = 20
"#,
        dir.path().display()
    );
    let res = run_smooth(&ExperimentConfig::from_toml(&text).unwrap()).unwrap();
    assert_eq!(res.seed_indices.len(), 6);
    assert!(res.systems.iter().all(|s| s.role == "seed"));
    assert_eq!(res.mean_recycled, 0.0);
}

fn bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_sbkrylov")).args(args).output().unwrap()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&["run", "--config", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "seed = \"x\"\n").unwrap();
    assert_eq!(bin(&["run", "--config", bad.to_str().unwrap()]).status.code(), Some(1));

    let ok = dir.path().join("ok.toml");
    let body = "[rhs]\nmode = \"unrelated-random\"\n\n[[methods]]\nname = \"sbgmres\"\ncycle_length = 10\n";
    std::fs::write(&ok, config(&dir.path().join("ok"), body)).unwrap();
    let out = bin(&["run", "--config", ok.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("sbgmres"));

    // one short cycle cannot converge
    let short = dir.path().join("short.toml");
    let body = "[rhs]\nmode = \"unrelated-random\"\n\n[[methods]]\nname = \"gmres\"\ncycle_length = 2\nmax_cycles = 1\n";
    std::fs::write(&short, config(&dir.path().join("short"), body)).unwrap();
    assert_eq!(bin(&["run", "--config", short.to_str().unwrap()]).status.code(), Some(2));

    // collinear-only baselines on unrelated right-hand sides
    let sg = dir.path().join("sg.toml");
    let body = "[rhs]\nmode = \"unrelated-random\"\n\n[[methods]]\nname = \"sgmres\"\n";
    std::fs::write(&sg, config(&dir.path().join("sg"), body)).unwrap();
    assert_eq!(bin(&["run", "--config", sg.to_str().unwrap()]).status.code(), Some(2));

    let out = bin(&["inspect", "--config", ok.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("100"));
}

#[test]
fn overrides_change_output_and_methods() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.toml");
    let body = r#"
[rhs]
mode = "unrelated-random"

[[methods]]
name = "sbgmres"
cycle_length = 10

[[methods]]
name = "gmres"
cycle_length = 10
"#;
    std::fs::write(&path, config(&dir.path().join("unused"), body)).unwrap();
    let out_dir = dir.path().join("over");
    let out = bin(&[
        "run",
        "--config",
        path.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--method",
        "gmres",
        "--multiplier",
        "2.0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let summary: Vec<SummaryRow> = read_csv(&out_dir.join(SUMMARY_CSV)).unwrap();
    assert_eq!(summary.len(), 1);
    assert_eq!(summary[0].method, "gmres");
    assert!(!dir.path().join("unused").exists());
}
