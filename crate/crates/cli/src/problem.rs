//! Problem assembly: matrix, shifts and right-hand sides from a config.

use std::sync::Arc;

use rand::Rng;
use sbkrylov::generate::laplacian_min_eigenvalue;
use sbkrylov::random::{derive_seed, rng, unit_columns, unit_vector};
use sbkrylov::{c64, DenseBlock, ShiftedFamily, SparseMatrix, C64};

use crate::config::{ExperimentConfig, ProblemSpec, RhsMode};
use crate::error::HarnessError;

/// Stream indices below keep the matrix, shift and right-hand-side draws
/// independent of each other.
const SHIFT_STREAM: u64 = 1;
const RHS_STREAM: u64 = 2;

#[derive(Clone, Debug)]
pub struct Problem {
    pub matrix: Arc<SparseMatrix>,
    pub shifts: Vec<C64>,
    pub rhs: DenseBlock,
    pub description: String,
}

impl Problem {
    pub fn n(&self) -> usize {
        self.matrix.n_rows()
    }

    pub fn family(&self) -> Result<ShiftedFamily, HarnessError> {
        ShiftedFamily::new(self.matrix.clone(), self.shifts.clone(), self.rhs.clone())
            .map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// Subfamily of the given shift indices.
    pub fn subfamily(&self, indices: &[usize]) -> Result<ShiftedFamily, HarnessError> {
        let cols: Vec<Vec<C64>> = indices.iter().map(|&i| self.rhs.col(i).to_vec()).collect();
        let rhs = DenseBlock::from_columns(self.n(), &cols).map_err(|e| HarnessError::Config(e.to_string()))?;
        let shifts = indices.iter().map(|&i| self.shifts[i]).collect();
        ShiftedFamily::new(self.matrix.clone(), shifts, rhs).map_err(|e| HarnessError::Config(e.to_string()))
    }
}

pub fn load_matrix(spec: &ProblemSpec) -> Result<(SparseMatrix, String), HarnessError> {
    match spec {
        ProblemSpec::ConvectionDiffusion { grid, convection } => {
            let a = sbkrylov::generate_convection_diffusion(*grid, *convection)
                .map_err(|e| HarnessError::Config(format!("problem: {e}")))?;
            Ok((a, format!("convection-diffusion grid={grid} convection={convection}")))
        }
        ProblemSpec::MatrixMarket { path } => {
            let a = sbkrylov::read_matrix_market(path).map_err(|e| match e {
                sbkrylov::Error::Io(source) => HarnessError::Io {
                    path: path.clone(),
                    source,
                },
                other => HarnessError::Config(format!("{}: {other}", path.display())),
            })?;
            if !a.is_square() {
                return Err(HarnessError::Config(format!("{}: matrix is not square", path.display())));
            }
            Ok((a, format!("matrix-market {}", path.display())))
        }
    }
}

pub fn build_shifts(cfg: &ExperimentConfig) -> Vec<C64> {
    let spec = &cfg.shifts;
    let mut shifts: Vec<C64> = if let Some(values) = &spec.values {
        let imag = spec.imag.clone().unwrap_or_else(|| vec![0.0; values.len()]);
        values.iter().zip(imag).map(|(&re, im)| C64::new(re, im)).collect()
    } else {
        let [lo, hi] = spec.interval.expect("validated");
        let mut g = rng(derive_seed(cfg.seed, SHIFT_STREAM));
        (0..spec.count.expect("validated"))
            .map(|_| c64(if hi > lo { g.random_range(lo..hi) } else { lo }))
            .collect()
    };
    if spec.scale_to_spectrum {
        if let ProblemSpec::ConvectionDiffusion { grid, .. } = cfg.problem {
            let s = laplacian_min_eigenvalue(grid);
            shifts.iter_mut().for_each(|v| *v *= s);
        }
    }
    shifts
}

/// `b(σ)_j = sin(σ j π / n)`, `j = 1..n`.
pub fn smooth_rhs(sigma: f64, n: usize) -> Vec<C64> {
    (1..=n)
        .map(|j| c64((sigma * j as f64 * std::f64::consts::PI / n as f64).sin()))
        .collect()
}

pub fn build_rhs(cfg: &ExperimentConfig, n: usize, shifts: &[C64]) -> Result<DenseBlock, HarnessError> {
    let l = shifts.len();
    let seed = derive_seed(cfg.seed, RHS_STREAM);
    match cfg.rhs.mode {
        RhsMode::SharedRandom => {
            let b = unit_vector(&mut rng(seed), n);
            DenseBlock::from_columns(n, &vec![b; l]).map_err(|e| HarnessError::Config(e.to_string()))
        }
        RhsMode::UnrelatedRandom => Ok(unit_columns(&mut rng(seed), n, l)),
        RhsMode::SmoothParameter => {
            let cols: Vec<Vec<C64>> = shifts.iter().map(|s| smooth_rhs(s.re, n)).collect();
            DenseBlock::from_columns(n, &cols).map_err(|e| HarnessError::Config(e.to_string()))
        }
        RhsMode::FromFile => {
            let path = cfg.rhs.path.as_ref().expect("validated");
            let b = sbkrylov::read_dense_block(path).map_err(|e| match e {
                sbkrylov::Error::Io(source) => HarnessError::Io {
                    path: path.clone(),
                    source,
                },
                other => HarnessError::Config(format!("{}: {other}", path.display())),
            })?;
            if b.n_rows() != n {
                return Err(HarnessError::Config(format!(
                    "{}: {} rows, matrix has {n}",
                    path.display(),
                    b.n_rows()
                )));
            }
            match b.n_cols() {
                1 => DenseBlock::from_columns(n, &vec![b.col(0).to_vec(); l])
                    .map_err(|e| HarnessError::Config(e.to_string())),
                c if c == l => Ok(b),
                c => Err(HarnessError::Config(format!(
                    "{}: {c} columns, expected 1 or {l}",
                    path.display()
                ))),
            }
        }
    }
}

pub fn build_problem(cfg: &ExperimentConfig) -> Result<Problem, HarnessError> {
    let (a, description) = load_matrix(&cfg.problem)?;
    let shifts = build_shifts(cfg);
    let rhs = build_rhs(cfg, a.n_rows(), &shifts)?;
    Ok(Problem {
        matrix: Arc::new(a),
        shifts,
        rhs,
        description,
    })
}
