//! `twinbeam`: simulate, analyse and reconstruct two-mode squeezed light.

mod commands;
mod config;
mod error;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use twinbeam_core::RecordFormat;

use config::{RunConfig, ScheduleKind, StateKind};
use error::{CliError, Result};

#[derive(Parser)]
#[command(name = "twinbeam", version, about = "Entangled-beam homodyne simulation, EPR criteria and heralded-state tomography")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file or directory, depending on the subcommand.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Print the effective configuration as TOML and exit.
    #[arg(long, global = true)]
    dump_config: bool,
    #[arg(long, global = true, value_enum)]
    state: Option<StateKind>,
    /// Squeezing parameter for `--state tmss`.
    #[arg(long, global = true)]
    r: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Bin,
}

#[derive(Subcommand)]
enum Command {
    /// Generate homodyne records.
    Simulate {
        #[arg(long, value_enum)]
        schedule: Option<ScheduleKind>,
    },
    /// Duan and Reid–Drummond criteria from records or from the model.
    Criteria {
        input: Option<PathBuf>,
        /// Evaluate on the configured covariance matrix instead of records.
        #[arg(long)]
        analytic: bool,
    },
    /// Weight scanned records by `q_b² − c` into conditioned histograms.
    Condition {
        input: PathBuf,
        /// Keep one histogram per `θ_a` segment and test phase uniformity.
        #[arg(long)]
        per_phase: bool,
    },
    /// Fock diagonal and Wigner function from conditioned histograms.
    Reconstruct {
        input: PathBuf,
        /// Detection efficiency to correct the Fock diagonal for.
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        n_max: Option<usize>,
        /// Also write SVG figures.
        #[arg(long)]
        plot: bool,
    },
    /// Exact model predictions: criteria and conditioned photon statistics.
    Oracle,
    /// SVG figures from histogram, Wigner and Fock files.
    Plot {
        #[arg(long)]
        histogram: Option<PathBuf>,
        #[arg(long)]
        wigner: Option<PathBuf>,
        #[arg(long)]
        fock: Option<PathBuf>,
    },
}

fn effective_config(cli: &Cli) -> Result<RunConfig> {
    let c = &cli.common;
    let mut config = match &c.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = c.seed {
        config.seed = seed;
    }
    if let Some(kind) = c.state {
        config.state.kind = kind;
    }
    if let Some(r) = c.r {
        config.state.r = r;
    }
    match &cli.command {
        Some(Command::Simulate { schedule: Some(s) }) => config.run.schedule = *s,
        Some(Command::Reconstruct { n_max: Some(n), .. }) => config.tomography.n_max = *n,
        _ => {}
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<()> {
    let config = effective_config(&cli)?;
    if cli.common.dump_config {
        print!("{}", config.to_toml());
        return Ok(());
    }
    if let Some(n) = cli.common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("threads: {e}")))?;
    }
    let Some(command) = &cli.command else {
        return Err(CliError::Config("a subcommand is required unless --dump-config is given".into()));
    };
    let out = cli.common.out.clone();
    match command {
        Command::Simulate { .. } => {
            let format = match cli.common.format {
                Some(Format::Bin) => RecordFormat::Binary,
                _ => RecordFormat::Csv,
            };
            commands::simulate(&config, config.run.schedule, out, format)
        }
        Command::Criteria { input, analytic } => commands::criteria(&config, input.as_deref(), *analytic, out),
        Command::Condition { input, per_phase } => commands::condition(&config, input, *per_phase, out),
        Command::Reconstruct { input, eta, plot, .. } => commands::reconstruct(&config, input, *eta, *plot, out),
        Command::Oracle => commands::oracle(&config, out),
        Command::Plot { histogram, wigner, fock } => {
            commands::plot(histogram.as_deref(), wigner.as_deref(), fock.as_deref(), out)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("twinbeam: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
