mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

/// Winding-number statistics of parametric chiral random matrices.
///
/// Exit status: 0 on success, 1 on a runtime error, 2 on a usage or
/// configuration error, 3 when a comparison verdict fails.
#[derive(Debug, Parser)]
#[command(name = "chiral-winding", version)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// TOML configuration file; flags below override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Model file, or `builtin:NAME` for trig, fig3, crossing, plane-wave, constant.
    #[arg(long, global = true)]
    model: Option<String>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Full-scale run for reproduce-fig3 (n = 1500, 10000 samples).
    #[arg(long, global = true)]
    full: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and canonicalize a model; report Berry phase, residuals and curves.
    Validate,
    /// Trace the parallelism curves and write them as CSV.
    Curves,
    /// Evaluate a closed-form quantity (see the [analytic] config section).
    Analytic {
        #[arg(long)]
        quantity: Option<String>,
        /// Comma-separated angles.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        points: Option<Vec<f64>>,
        /// Comma-separated sources for gen-func.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        sources: Option<Vec<f64>>,
    },
    /// Monte Carlo estimate (see the [mc] config section).
    Mc {
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        method: Option<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        points: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        sources: Option<Vec<f64>>,
    },
    /// Compare a Monte Carlo artifact with an analytic artifact.
    Compare {
        #[arg(long)]
        estimate: PathBuf,
        #[arg(long)]
        prediction: PathBuf,
    },
    /// Winding-number histogram, moments and Gaussian verdict for the
    /// two-term model.
    #[command(name = "reproduce-fig3")]
    ReproduceFig3,
}

fn build_config(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = match &cli.common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let c = &cli.common;
    if let Some(m) = &c.model {
        cfg.run.model = Some(m.clone());
    }
    if c.n.is_some() {
        cfg.run.n = c.n;
    }
    if c.samples.is_some() {
        cfg.run.samples = c.samples;
    }
    if let Some(s) = c.seed {
        cfg.run.seed = s;
    }
    if let Some(o) = &c.out {
        cfg.run.out = o.clone();
    }
    if let Some(w) = c.workers {
        cfg.run.workers = w;
    }
    cfg.run.full |= c.full;
    match &cli.command {
        Command::Analytic { quantity, points, sources } => {
            if let Some(q) = quantity {
                cfg.analytic.quantity = q.clone();
            }
            if let Some(p) = points {
                cfg.analytic.points = p.clone();
            }
            if let Some(s) = sources {
                cfg.analytic.sources = s.clone();
            }
        }
        Command::Mc { kind, method, points, sources } => {
            if let Some(k) = kind {
                cfg.mc.kind = k.clone();
            }
            if let Some(m) = method {
                cfg.mc.method = m.clone();
            }
            if let Some(p) = points {
                cfg.mc.points = p.clone();
            }
            if let Some(s) = sources {
                cfg.mc.sources = s.clone();
            }
        }
        _ => {}
    }
    cfg.check()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::Validate => commands::validate(&cfg),
        Command::Curves => commands::curves(&cfg),
        Command::Analytic { .. } => commands::analytic(&cfg),
        Command::Mc { .. } => commands::mc(&cfg),
        Command::Compare { estimate, prediction } => commands::compare(&cfg, estimate, prediction),
        Command::ReproduceFig3 => commands::reproduce_fig3(&cfg),
    };
    match result {
        Ok(commands::Outcome::Pass) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Fail) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
