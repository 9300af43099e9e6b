mod commands;
mod config;
mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{config_error, one_line, ConfigError, OutputFormat, RunConfig};

#[derive(Parser)]
#[command(name = "iterasym", version, about = "Asymptotics of slowly and geometrically converging iterations")]
struct Cli {
    /// TOML file with default settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Working precision in bits (also ITERASYM_PRECISION).
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Digits to print.
    #[arg(long, global = true)]
    digits: Option<u32>,
    #[arg(long, value_enum, global = true)]
    format: Option<OutputFormat>,
    /// Also write the JSON result to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the asymptotic expansion of x_k around a parabolic fixed point.
    Expand {
        #[arg(long)]
        map: Option<String>,
        /// Highest power k^(-cutoff/2) to solve for.
        #[arg(long)]
        cutoff: Option<u32>,
        /// Taylor degree of the map (default cutoff + 2).
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Iterate a map and sample the orbit at checkpoints.
    Orbit {
        #[arg(long)]
        map: Option<String>,
        #[arg(long)]
        x0: Option<String>,
        /// e.g. `1..10` or `1e4,1e5,1e6`.
        #[arg(long)]
        checkpoints: Option<String>,
    },
    /// Recover the free constant C from a series and an orbit.
    Extract {
        #[arg(long)]
        series: Option<PathBuf>,
        #[arg(long)]
        orbit: Option<PathBuf>,
    },
    /// Limit of u_k / rho^k for a geometrically converging iteration.
    Rate {
        #[arg(long)]
        map: Option<String>,
        #[arg(long)]
        u0: Option<String>,
    },
    /// Dottie's number, truncated.
    Dottie,
    /// Recompute the published constants and report digit agreement.
    Reproduce {
        /// Shorter orbits and lower targets.
        #[arg(long)]
        fast: bool,
        /// Include per-entry runtimes (makes the output nondeterministic).
        #[arg(long)]
        timings: bool,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let file = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    let mut flags = RunConfig {
        digits: cli.digits,
        precision_bits: cli.precision,
        output: cli.format,
        out: cli.out,
        ..Default::default()
    };
    match &cli.command {
        Command::Expand { map, cutoff, degree } => {
            flags.map = map.clone();
            flags.cutoff = *cutoff;
            flags.degree = *degree;
        }
        Command::Orbit { map, x0, checkpoints } => {
            flags.map = map.clone();
            flags.x0 = x0.clone();
            flags.checkpoints = checkpoints.clone().map(config::Checkpoints::Text);
        }
        Command::Extract { series, orbit } => {
            flags.series = series.clone();
            flags.orbit = orbit.clone();
        }
        Command::Rate { map, u0 } => {
            flags.map = map.clone();
            flags.u0 = u0.clone();
        }
        Command::Dottie => {}
        Command::Reproduce { fast, timings } => {
            flags.fast = fast.then_some(true);
            flags.timings = timings.then_some(true);
        }
    }
    let cfg = file.overlay(flags);
    match cli.command {
        Command::Expand { .. } => commands::expand(&cfg),
        Command::Orbit { .. } => commands::orbit(&cfg),
        Command::Extract { .. } => commands::extract(&cfg),
        Command::Rate { .. } => commands::rate(&cfg),
        Command::Dottie => commands::dottie_cmd(&cfg),
        Command::Reproduce { .. } => {
            let profile = reproduce::Profile { fast: cfg.fast.unwrap_or(false), prec: cfg.precision_or(256)? };
            let report = reproduce::reproduce(profile, cfg.timings.unwrap_or(false));
            commands::emit(&cfg, &report.to_text(), &report)?;
            if report.passed() {
                Ok(())
            } else {
                let missed: Vec<_> = report.entries.iter().filter(|e| !e.pass).map(|e| e.label.as_str()).collect();
                Err(Missed(missed.join(", ")).into())
            }
        }
    }
}

/// `reproduce` fell short of some targets.
#[derive(Debug)]
struct Missed(String);

impl std::fmt::Display for Missed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "targets missed: {}", self.0)
    }
}

impl std::error::Error for Missed {}

/// 2 for bad input or configuration, 3 for numerical failures.
fn exit_status(e: &anyhow::Error) -> (u8, &'static str) {
    if e.downcast_ref::<ConfigError>().is_some() {
        return (2, "config");
    }
    if e.downcast_ref::<Missed>().is_some() {
        return (3, "numeric");
    }
    match e.downcast_ref::<iterasym::Error>() {
        Some(iterasym::Error::Parse(_) | iterasym::Error::Format(_) | iterasym::Error::Json(_)) => (2, "config"),
        Some(_) => (3, "numeric"),
        None => (2, "config"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = config_error(one_line(&e.to_string()).trim_start_matches("error: ").to_string());
            eprintln!("error: config: {err}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (code, kind) = exit_status(&e);
            eprintln!("error: {kind}: {}", one_line(&format!("{e:#}")));
            ExitCode::from(code)
        }
    }
}
