//! Solver configuration and per-iteration instrumentation.

use crate::arnoldi::Replacement;
use crate::error::{Error, Result};
use crate::recycle::Provenance;
use crate::C64;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Arnoldi steps per cycle (`m`).
    pub cycle_length: usize,
    /// Convergence tolerance `ε`.
    pub tolerance: f64,
    pub max_cycles: usize,
    pub seed: u64,
    /// Test `‖r‖ ≤ ε` instead of `‖r‖ ≤ ε ‖b‖`.
    pub absolute: bool,
    /// Relative tolerance for flagging dependent block Arnoldi columns.
    pub dependency_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cycle_length: 20,
            tolerance: 1e-8,
            max_cycles: 200,
            seed: 0,
            absolute: false,
            dependency_tol: 1e-10,
        }
    }
}

impl SolverConfig {
    pub fn new(cycle_length: usize, tolerance: f64, max_cycles: usize) -> Self {
        Self {
            cycle_length,
            tolerance,
            max_cycles,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.cycle_length == 0 {
            return Err(Error::InvalidConfig("cycle_length must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_cycles == 0 {
            return Err(Error::InvalidConfig("max_cycles must be at least 1".into()));
        }
        if !(self.dependency_tol > 0.0) {
            return Err(Error::InvalidConfig("dependency_tol must be positive".into()));
        }
        Ok(())
    }

    /// Residual norm below which a system with right-hand side norm
    /// `b_norm` counts as solved.
    pub fn threshold(&self, b_norm: f64) -> f64 {
        if self.absolute {
            self.tolerance
        } else {
            self.tolerance * b_norm
        }
    }
}

/// One residual-norm sample: shift `shift`, after iteration `iteration`
/// (1-based, counted across cycles) of cycle `cycle` (1-based). Counters
/// are cumulative for the whole solve.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub shift: usize,
    pub cycle: usize,
    pub iteration: usize,
    pub matvecs: usize,
    pub block_matvecs: usize,
    pub resid_norm: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub method: String,
    pub shifts: Vec<C64>,
    pub rhs_norms: Vec<f64>,
    pub initial_residual_norms: Vec<f64>,
    pub history: Vec<IterationRecord>,
    pub matvec_count: usize,
    pub block_matvec_count: usize,
    pub iterations: usize,
    pub cycles: usize,
    pub converged: Vec<bool>,
    /// Residual norms carried by the recurrences at the end of the solve.
    pub final_residual_norms: Vec<f64>,
    /// `‖bᵢ − (A + σᵢ I) xᵢ‖` recomputed at the end of the solve.
    pub true_residual_norms: Vec<f64>,
    pub replacements: Vec<Replacement>,
    pub recycle_provenance: Option<Provenance>,
    pub notes: Vec<String>,
}

impl SolveReport {
    pub fn new(method: &str, shifts: &[C64], rhs_norms: Vec<f64>) -> Self {
        let l = shifts.len();
        Self {
            method: method.to_string(),
            shifts: shifts.to_vec(),
            rhs_norms,
            initial_residual_norms: vec![0.0; l],
            history: Vec::new(),
            matvec_count: 0,
            block_matvec_count: 0,
            iterations: 0,
            cycles: 0,
            converged: vec![false; l],
            final_residual_norms: vec![0.0; l],
            true_residual_norms: vec![0.0; l],
            replacements: Vec::new(),
            recycle_provenance: None,
            notes: Vec::new(),
        }
    }

    pub fn n_shifts(&self) -> usize {
        self.shifts.len()
    }

    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }

    /// Counts one application of `A` to a block of `width` columns.
    pub fn count_block(&mut self, width: usize) {
        self.block_matvec_count += 1;
        self.matvec_count += width;
    }

    pub fn count_single(&mut self) {
        self.matvec_count += 1;
    }

    /// Appends one record for `shift` at the current counters.
    pub fn record(&mut self, shift: usize, cycle: usize, iteration: usize, resid_norm: f64, converged: bool) {
        self.history.push(IterationRecord {
            shift,
            cycle,
            iteration,
            matvecs: self.matvec_count,
            block_matvecs: self.block_matvec_count,
            resid_norm,
            converged,
        });
    }

    /// Residual norms for `shift`, one per iteration.
    pub fn residual_history(&self, shift: usize) -> Vec<f64> {
        self.history
            .iter()
            .filter(|r| r.shift == shift)
            .map(|r| r.resid_norm)
            .collect()
    }

    /// First iteration at which `shift` met the tolerance, `Some(0)` when it
    /// was solved before any iteration.
    pub fn iterations_to_converge(&self, shift: usize) -> Option<usize> {
        if !self.converged[shift] {
            return None;
        }
        self.history
            .iter()
            .find(|r| r.shift == shift && r.converged)
            .map(|r| r.iteration)
            .or(Some(0))
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn validation() {
        assert!(SolverConfig::default().validate().is_ok());
        assert!(SolverConfig::new(0, 1e-8, 1).validate().is_err());
        assert!(SolverConfig::new(5, 0.0, 1).validate().is_err());
        assert!(SolverConfig::new(5, f64::NAN, 1).validate().is_err());
    }

    #[test]
    fn counters_are_cumulative_in_records() {
        let mut r = SolveReport::new("t", &[c64(0.0), c64(1.0)], vec![1.0, 1.0]);
        r.count_block(2);
        r.record(0, 1, 1, 0.5, false);
        r.count_block(2);
        r.record(0, 1, 2, 0.1, true);
        assert_eq!(r.history[1].matvecs, 4);
        assert_eq!(r.history[1].block_matvecs, 2);
        assert_eq!(r.residual_history(0), vec![0.5, 0.1]);
    }
}
