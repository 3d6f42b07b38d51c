use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod table;

use commands::{CompareArgs, ConvergeArgs, FieldMapArgs, NodeArgs, Output};
use config::{Format, OutputArgs};

/// Induced velocity of a circular vortex arc: exact, asymptotic and quadrature evaluators.
#[derive(Debug, Parser)]
#[command(name = "glie", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Velocity components over a grid of field points.
    FieldMap(FieldMapArgs),
    /// Asymptotic series of F(λ, k) with its remainder bracket against quadrature.
    Converge(ConvergeArgs),
    /// Binormal velocity from lia, glie, local and oracle, with deviations and ln(1/ε) fits.
    Compare(CompareArgs),
    /// Filament node velocity with mutual friction.
    NodeVelocity(NodeArgs),
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(e) => write!(f, "output error: {e}"),
        }
    }
}

fn write_output(out: &Output, args: &OutputArgs) -> Result<(), CliError> {
    let sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(File::create(path).map_err(CliError::Io)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = BufWriter::new(sink);
    match args.format {
        Format::Csv => out.table.write_csv(&mut w),
        Format::Json => out.table.write_json(&mut w, out.metadata.clone()),
    }
    .and_then(|_| w.flush())
    .map_err(CliError::Io)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let (out, args) = match &cli.command {
        Command::FieldMap(a) => (commands::field_map(a)?, &a.output),
        Command::Converge(a) => (commands::converge(a)?, &a.output),
        Command::Compare(a) => (commands::compare(a)?, &a.output),
        Command::NodeVelocity(a) => (commands::node_velocity(a)?, &a.output),
    };
    write_output(&out, args)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("glie: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
