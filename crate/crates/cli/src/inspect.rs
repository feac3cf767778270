//! `inspect`: describe the problem a config defines without solving it.

use std::fmt::Write as _;

use sbkrylov::shifted::collinearity_sines;

use crate::config::ExperimentConfig;
use crate::error::HarnessError;
use crate::problem::build_problem;

pub fn inspect(cfg: &ExperimentConfig) -> Result<String, HarnessError> {
    cfg.validate()?;
    let p = build_problem(cfg)?;
    let a = &p.matrix;
    let mut s = String::new();
    let _ = writeln!(s, "problem = {}", p.description);
    let _ = writeln!(s, "n = {}", p.n());
    let _ = writeln!(s, "nnz = {}", a.nnz());
    let _ = writeln!(s, "frobenius_norm = {}", a.frobenius_norm());
    let _ = writeln!(s, "shift_count = {}", p.shifts.len());
    let (lo, hi) = p
        .shifts
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), z| (lo.min(z.norm()), hi.max(z.norm())));
    let _ = writeln!(s, "shift_modulus_range = [{lo}, {hi}]");
    let norms: Vec<f64> = p.rhs.columns().map(sbkrylov::dense::norm2).collect();
    let (bmin, bmax) = norms
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &b| (lo.min(b), hi.max(b)));
    let _ = writeln!(s, "rhs_norm_range = [{bmin}, {bmax}]");
    let largest_sine = collinearity_sines(&p.rhs)
        .into_iter()
        .map(|(_, _, sine)| sine)
        .fold(0.0f64, f64::max);
    let _ = writeln!(s, "rhs_largest_pairwise_sine = {largest_sine}");
    let _ = writeln!(s, "rhs_collinear = {}", largest_sine <= sbkrylov::shifted::COLLINEAR_TOL);
    let _ = writeln!(
        s,
        "methods = {}",
        cfg.methods.iter().map(|m| m.label()).collect::<Vec<_>>().join(" ")
    );
    Ok(s)
}
