use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::HarnessError;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// The text the config was parsed from, echoed into the manifest.
    #[serde(skip)]
    pub source: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default = "default_multiplier")]
    pub block_cost_multiplier: f64,
    /// Largest number of shifts solved together by the block methods.
    #[serde(default = "default_group_size")]
    pub group_size: usize,
    pub problem: ProblemSpec,
    pub shifts: ShiftSpec,
    pub rhs: RhsSpec,
    pub methods: Vec<MethodSpec>,
    #[serde(default)]
    pub recycle: RecycleSpec,
    #[serde(default)]
    pub variability: VariabilitySpec,
    #[serde(default)]
    pub smooth: SmoothSpec,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn default_multiplier() -> f64 {
    3.3
}

fn default_group_size() -> usize {
    8
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProblemSpec {
    ConvectionDiffusion {
        grid: usize,
        #[serde(default)]
        convection: f64,
    },
    MatrixMarket {
        path: PathBuf,
    },
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftSpec {
    /// Real parts of explicit shifts.
    pub values: Option<Vec<f64>>,
    /// Imaginary parts, matched to `values`.
    pub imag: Option<Vec<f64>>,
    /// Draw `count` shifts uniformly from this real interval.
    pub interval: Option<[f64; 2]>,
    pub count: Option<usize>,
    /// Multiply the shifts by the smallest eigenvalue of the generated
    /// operator's diffusion part.
    #[serde(default)]
    pub scale_to_spectrum: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhsMode {
    SharedRandom,
    UnrelatedRandom,
    SmoothParameter,
    FromFile,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RhsSpec {
    pub mode: RhsMode,
    pub path: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    Sbgmres,
    Sbfom,
    Rsbgmres,
    Gmres,
    Fom,
    Rgmres,
    Sgmres,
    Sfom,
}

impl MethodName {
    pub fn as_str(self) -> &'static str {
        match self {
            MethodName::Sbgmres => "sbgmres",
            MethodName::Sbfom => "sbfom",
            MethodName::Rsbgmres => "rsbgmres",
            MethodName::Gmres => "gmres",
            MethodName::Fom => "fom",
            MethodName::Rgmres => "rgmres",
            MethodName::Sgmres => "sgmres",
            MethodName::Sfom => "sfom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            MethodName::Sbgmres,
            MethodName::Sbfom,
            MethodName::Rsbgmres,
            MethodName::Gmres,
            MethodName::Fom,
            MethodName::Rgmres,
            MethodName::Sgmres,
            MethodName::Sfom,
        ]
        .into_iter()
        .find(|m| m.as_str() == s)
    }

    /// Methods whose operator applications are block products.
    pub fn is_block(self) -> bool {
        matches!(self, MethodName::Sbgmres | MethodName::Sbfom | MethodName::Rsbgmres)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyName {
    RandomX0,
    GmresCycle,
    FomRandomBlock,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    pub name: MethodName,
    /// Column label in the outputs; defaults to the method name.
    pub label: Option<String>,
    #[serde(default = "default_cycle_length")]
    pub cycle_length: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_max_cycles")]
    pub max_cycles: usize,
    #[serde(default)]
    pub absolute: bool,
    pub seed: Option<u64>,
    #[serde(default = "default_strategy")]
    pub strategy: StrategyName,
    #[serde(default = "default_init_cycle_length")]
    pub init_cycle_length: usize,
    /// Overrides `[recycle] mode` for this method.
    pub recycle_mode: Option<RecycleModeName>,
    /// Overrides `[recycle] k` for this method.
    pub recycle_k: Option<usize>,
}

fn default_cycle_length() -> usize {
    50
}

fn default_tolerance() -> f64 {
    1e-8
}

fn default_max_cycles() -> usize {
    200
}

fn default_strategy() -> StrategyName {
    StrategyName::GmresCycle
}

fn default_init_cycle_length() -> usize {
    10
}

impl MethodSpec {
    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.name.as_str().to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecycleModeName {
    RitzLargest,
    RitzSmallest,
    HarmonicRitzSmallest,
    Keep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RitzSourceName {
    Hessenberg,
    Augmented,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecycleSpec {
    #[serde(default = "default_k")]
    pub k: usize,
    pub mode: Option<RecycleModeName>,
    #[serde(default = "default_source")]
    pub source: RitzSourceName,
    pub initial_space: Option<PathBuf>,
}

fn default_k() -> usize {
    10
}

fn default_source() -> RitzSourceName {
    RitzSourceName::Hessenberg
}

impl Default for RecycleSpec {
    fn default() -> Self {
        Self {
            k: default_k(),
            mode: None,
            source: default_source(),
            initial_space: None,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariabilitySpec {
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Reuse the base seed for every trial.
    #[serde(default)]
    pub same_seed: bool,
    #[serde(default = "default_bins")]
    pub bins: usize,
}

fn default_trials() -> usize {
    50
}

fn default_bins() -> usize {
    10
}

impl Default for VariabilitySpec {
    fn default() -> Self {
        Self {
            trials: default_trials(),
            same_seed: false,
            bins: default_bins(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedMethod {
    Sbgmres,
    Gmres,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothSpec {
    #[serde(default = "default_n_seed")]
    pub n_seed: usize,
    #[serde(default = "default_smooth_group")]
    pub group_size: usize,
    #[serde(default = "default_seed_method")]
    pub seed_method: SeedMethod,
    /// Relative singular-value threshold for the solution-subspace
    /// dimension.
    #[serde(default = "default_rank_threshold")]
    pub rank_threshold: f64,
    /// Tolerance of the reference solves used for the dimension report.
    #[serde(default = "default_reference_tolerance")]
    pub reference_tolerance: f64,
}

fn default_n_seed() -> usize {
    10
}

fn default_smooth_group() -> usize {
    10
}

fn default_seed_method() -> SeedMethod {
    SeedMethod::Sbgmres
}

fn default_rank_threshold() -> f64 {
    1e-10
}

fn default_reference_tolerance() -> f64 {
    1e-13
}

impl Default for SmoothSpec {
    fn default() -> Self {
        Self {
            n_seed: default_n_seed(),
            group_size: default_smooth_group(),
            seed_method: default_seed_method(),
            rank_threshold: default_rank_threshold(),
            reference_tolerance: default_reference_tolerance(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let mut cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.source = text.to_string();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            HarnessError::Config(msg) => HarnessError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.methods.is_empty() {
            return bad("at least one [[methods]] entry is required".into());
        }
        if !(self.block_cost_multiplier > 0.0) {
            return bad(format!("block_cost_multiplier must be positive, got {}", self.block_cost_multiplier));
        }
        if self.group_size == 0 {
            return bad("group_size must be at least 1".into());
        }
        match (&self.shifts.values, &self.shifts.interval) {
            (Some(v), None) if !v.is_empty() => {
                if let Some(im) = &self.shifts.imag {
                    if im.len() != v.len() {
                        return bad(format!("shifts.imag has {} entries, shifts.values has {}", im.len(), v.len()));
                    }
                }
            }
            (None, Some(iv)) => {
                if !(iv[0] <= iv[1]) || self.shifts.count.unwrap_or(0) == 0 {
                    return bad("shifts.interval needs lo ≤ hi and a positive shifts.count".into());
                }
            }
            _ => return bad("give either a non-empty shifts.values or shifts.interval with shifts.count".into()),
        }
        if self.shifts.scale_to_spectrum && !matches!(self.problem, ProblemSpec::ConvectionDiffusion { .. }) {
            return bad("shifts.scale_to_spectrum needs a generated problem".into());
        }
        if self.rhs.mode == RhsMode::FromFile && self.rhs.path.is_none() {
            return bad("rhs.mode = \"from-file\" needs rhs.path".into());
        }
        for m in &self.methods {
            if m.cycle_length == 0 || m.max_cycles == 0 || m.init_cycle_length == 0 {
                return bad(format!("method {}: cycle lengths and max_cycles must be positive", m.label()));
            }
            if !(m.tolerance > 0.0) {
                return bad(format!("method {}: tolerance must be positive", m.label()));
            }
        }
        let mut labels: Vec<String> = self.methods.iter().map(MethodSpec::label).collect();
        labels.sort();
        labels.dedup();
        if labels.len() != self.methods.len() {
            return bad("method labels must be distinct (set `label` to run a method twice)".into());
        }
        if self.smooth.n_seed == 0 || self.smooth.group_size == 0 {
            return bad("smooth.n_seed and smooth.group_size must be positive".into());
        }
        if self.variability.bins == 0 {
            return bad("variability.bins must be positive".into());
        }
        Ok(())
    }
}
