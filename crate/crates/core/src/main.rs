use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use distant_wells::scenario::{self, Format, Kind, ScenarioConfig};

#[derive(Parser)]
#[command(
    name = "distant-wells",
    version,
    about = "Particles in two distant wells coupled through a continuum"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Wide-band master-equation trajectory.
    Evolve(RunArgs),
    /// Asymptotic probabilities and density matrix for aligned levels.
    Asymptotic(RunArgs),
    /// Dwell time from the closed form and from a fitted decay.
    Dwell(RunArgs),
    /// Discretized-reservoir oracle against the master equation.
    OracleCompare(RunArgs),
    /// Asymptotic many-electron states.
    Fermions(RunArgs),
    /// Boson emission distribution.
    Bosons(RunArgs),
    /// Summary statistics over a parameter grid.
    Sweep(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted. A `.manifest.json` sidecar is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Run twice and fail unless the outputs are byte-identical.
    #[arg(long)]
    seedless: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Evolve(a) => (Kind::Evolve, a),
        Command::Asymptotic(a) => (Kind::Asymptotic, a),
        Command::Dwell(a) => (Kind::Dwell, a),
        Command::OracleCompare(a) => (Kind::OracleCompare, a),
        Command::Fermions(a) => (Kind::Fermions, a),
        Command::Bosons(a) => (Kind::Bosons, a),
        Command::Sweep(a) => (Kind::Sweep, a),
    };
    match run(kind, &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(kind: Kind, args: &RunArgs) -> distant_wells::Result<()> {
    let cfg = ScenarioConfig::from_path(&args.config)?;
    let format = match args.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let rendered = if args.seedless {
        scenario::run_checked(kind, &cfg, format)?
    } else {
        scenario::run(kind, &cfg, format)?
    };
    match &args.out {
        Some(path) => scenario::write_outputs(&rendered, path)?,
        None => std::io::stdout().write_all(rendered.body.as_bytes())?,
    }
    Ok(())
}
