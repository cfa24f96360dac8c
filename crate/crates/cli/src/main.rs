use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use hwmlab_core::harness::config::{RunConfig, Subcommand};
use hwmlab_core::harness::run;
use hwmlab_core::Error;

/// Numerical experiments for the half-wave maps equation on the torus.
#[derive(Debug, Parser)]
#[command(name = "hwmlab", version)]
struct Cli {
    #[arg(value_enum)]
    subcommand: Command,
    /// TOML file of key = value settings; absent keys take the subcommand defaults.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed from the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the output directory from the config file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Identities,
    Operators,
    Inequalities,
    Simulate,
    Gronwall,
    Strichartz,
}

impl From<Command> for Subcommand {
    fn from(c: Command) -> Self {
        match c {
            Command::Identities => Subcommand::Identities,
            Command::Operators => Subcommand::Operators,
            Command::Inequalities => Subcommand::Inequalities,
            Command::Simulate => Subcommand::Simulate,
            Command::Gronwall => Subcommand::Gronwall,
            Command::Strichartz => Subcommand::Strichartz,
        }
    }
}

const EXIT_FAILED_CHECKS: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let sub = Subcommand::from(cli.subcommand);

    let mut cfg = match RunConfig::from_file(sub, &cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("hwmlab {sub}: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.to_string_lossy().into_owned();
    }

    let output = match run(&cfg) {
        Ok(o) => o,
        Err(e @ Error::Config(_)) => {
            eprintln!("hwmlab {sub}: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(e) => {
            eprintln!("hwmlab {sub}: run failed: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    };
    let dir = PathBuf::from(&cfg.out_dir);
    if let Err(e) = output.write_to(&dir) {
        eprintln!("hwmlab {sub}: cannot write {}: {e}", dir.display());
        return ExitCode::from(EXIT_RUNTIME);
    }

    for r in &output.report.results {
        println!("{} {}", if r.pass { "PASS" } else { "FAIL" }, r.name);
    }
    let report = &output.report;
    println!("{sub}: {} ({} checks, report in {})", if report.pass { "pass" } else { "FAIL" }, report.results.len(), dir.display());
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED_CHECKS)
    }
}
