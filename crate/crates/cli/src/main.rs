mod commands;
mod config;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use commands::{Ctx, Failure};
use config::{ConfigError, Loaded};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Berry,
    Protocol,
    Readout,
    Cat,
    Feasibility,
    Sweep,
}

/// Berry phases of a trapped ion driven around a squeezing loop.
#[derive(Debug, Parser)]
#[command(name = "berryion", version)]
struct Cli {
    command: Command,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads for independent runs.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Also render an SVG chart next to each CSV.
    #[arg(long)]
    svg: bool,
}

fn run(cli: Cli) -> Result<(), Failure> {
    if cli.workers == 0 {
        return Err(ConfigError { message: "--workers must be at least 1".into(), line: None }.into());
    }
    let src = std::fs::read_to_string(&cli.config).map_err(|e| ConfigError {
        message: format!("cannot read {}: {e}", cli.config.display()),
        line: None,
    })?;
    let loaded = Loaded::parse(&src)?;
    std::fs::create_dir_all(&cli.out)?;
    let ctx = Ctx { loaded, out: cli.out, workers: cli.workers, svg: cli.svg };
    match cli.command {
        Command::Berry => commands::berry(&ctx),
        Command::Protocol => commands::protocol(&ctx),
        Command::Readout => commands::readout(&ctx),
        Command::Cat => commands::cat(&ctx),
        Command::Feasibility => commands::feasibility(&ctx),
        Command::Sweep => commands::sweep(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let f = Failure::Config(ConfigError { message: e.render().to_string().trim().to_owned(), line: None });
            eprintln!("{}", f.to_json());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(f.exit_code())
        }
    }
}
