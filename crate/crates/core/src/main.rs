use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chlo_sv::io::{run_fit, run_oracle, run_simulate, run_study, RunConfig};
use chlo_sv::{Error, ModelVariant};

#[derive(Parser)]
#[command(name = "chlo-sv", version, about = "Stochastic volatility from open/high/low/close bars")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Filter a bar file and write per-period posterior summaries.
    Fit(Common),
    /// Simulate one synthetic bar file.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        periods: Option<usize>,
    },
    /// Run the four-model comparison on synthetic datasets.
    Study {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        datasets: Option<usize>,
        #[arg(long)]
        periods: Option<usize>,
    },
    /// Check the closed-form densities against simulated paths.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        paths: Option<usize>,
    },
}

/// Flags shared by every subcommand; each overrides the config file.
#[derive(Args)]
struct Common {
    /// Flat TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_model)]
    model: Option<ModelVariant>,
    #[arg(long)]
    particles: Option<usize>,
    #[arg(long)]
    discount: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Latent path (simulate) or per-dataset metrics (study).
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Condition each bar on its own open instead of the previous close.
    #[arg(long)]
    weekend_effect: bool,
    /// Reject bars whose extremes violate the OHLC ordering.
    #[arg(long)]
    strict: bool,
}

fn parse_model(s: &str) -> Result<ModelVariant, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Common {
    fn resolve(&self) -> chlo_sv::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.model {
            cfg.model = v;
        }
        if let Some(v) = self.particles {
            cfg.particles = v;
        }
        if let Some(v) = self.discount {
            cfg.discount = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = &self.input {
            cfg.input = Some(v.clone());
        }
        if let Some(v) = &self.output {
            cfg.output = Some(v.clone());
        }
        if let Some(v) = &self.truth {
            cfg.truth = Some(v.clone());
        }
        cfg.weekend_effect |= self.weekend_effect;
        cfg.strict |= self.strict;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> chlo_sv::Result<()> {
    match cli.command {
        Command::Fit(common) => {
            run_fit(&common.resolve()?)?;
        }
        Command::Simulate { common, periods } => {
            let mut cfg = common.resolve()?;
            if let Some(n) = periods {
                cfg.n_periods = n;
            }
            run_simulate(&cfg)?;
        }
        Command::Study {
            common,
            datasets,
            periods,
        } => {
            let mut cfg = common.resolve()?;
            if let Some(n) = datasets {
                cfg.n_datasets = n;
            }
            if let Some(n) = periods {
                cfg.n_periods = n;
            }
            run_study(&cfg)?;
        }
        Command::Oracle { common, paths } => {
            let mut cfg = common.resolve()?;
            if let Some(n) = paths {
                cfg.oracle_paths = n;
            }
            let rows = run_oracle(&cfg)?;
            let worst = rows.iter().map(|r| r.z_score().abs()).fold(0.0, f64::max);
            log::info!("{} boxes, largest |z| = {worst:.2}", rows.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let cat = e.category();
            eprintln!("error ({cat:?}): {e}");
            ExitCode::from(cat.exit_code() as u8)
        }
    }
}
