use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sbkrylov_harness::{inspect, run_experiment, run_smooth, run_variability, ExperimentConfig, HarnessError, Overrides};

#[derive(Parser)]
#[command(name = "sbkrylov", version, about = "Shifted block Krylov experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured method and write histories and a summary.
    Run(Common),
    /// Repeat the first method with different seeds.
    Variability {
        #[command(flatten)]
        common: Common,
        /// Number of trials (defaults to `[variability] trials`).
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Seed a few systems, recycle their solutions for the rest.
    SmoothParam(Common),
    /// Describe the configured problem without solving.
    Inspect(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Restrict to these methods (name or label); repeatable.
    #[arg(long = "method")]
    methods: Vec<String>,
    #[arg(long)]
    multiplier: Option<f64>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig, HarnessError> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        Overrides {
            out: self.out.clone(),
            seed: self.seed,
            methods: self.methods.clone(),
            multiplier: self.multiplier,
        }
        .apply(&mut cfg)?;
        Ok(cfg)
    }
}

fn execute(cli: Cli) -> Result<bool, HarnessError> {
    match cli.command {
        Command::Run(c) => {
            let cfg = c.load()?;
            let res = run_experiment(&cfg)?;
            print!("{}", std::fs::read_to_string(res.out_dir.join(sbkrylov_harness::run::SUMMARY_FILE)).unwrap_or_default());
            for o in &res.outcomes {
                if let Some(e) = &o.error {
                    eprintln!("error: {e}");
                }
            }
            Ok(res.success())
        }
        Command::Variability { common, trials } => {
            let cfg = common.load()?;
            let res = run_variability(&cfg, trials.unwrap_or(cfg.variability.trials))?;
            match &res.moments {
                Some(m) => println!("{}: {}", res.method, sbkrylov_harness::stats::caption(m)),
                None => println!("{}: no trial converged", res.method),
            }
            Ok(res.excluded == 0)
        }
        Command::SmoothParam(c) => {
            let cfg = c.load()?;
            let res = run_smooth(&cfg)?;
            println!(
                "mean iterations: recycled {} vs no augmentation {}; solution subspace dimension {}",
                res.mean_recycled, res.mean_baseline, res.dimension
            );
            Ok(res.systems.iter().all(|s| s.converged))
        }
        Command::Inspect(c) => {
            let cfg = c.load()?;
            print!("{}", inspect(&cfg)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
