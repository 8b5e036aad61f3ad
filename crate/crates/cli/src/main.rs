use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use choreo_core::Convention;

mod classify;
mod design;
mod error;
mod fmt;
mod plot;
mod scan;
mod simulate;
mod spectrum;

use error::CliError;

#[derive(Parser)]
#[command(name = "choreo", version, about = "Normal modes, resonances and choreographies of dihedral n-body oscillators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print stiffness eigenvalues, frequencies and degeneracies of a scenario.
    Spectrum {
        scenario: String,
    },
    /// Classify the motion of a scenario; the exit status encodes the category.
    Classify(ClassifyArgs),
    /// Write a trajectory as CSV.
    Simulate(SimulateArgs),
    /// Find couplings whose sector frequencies have the given ratios.
    Design(DesignArgs),
    /// Classify every cell of a coupling grid described by a TOML request.
    Scan {
        request: String,
        /// Output map; `.json` selects JSON, anything else CSV.
        #[arg(long)]
        out: String,
    },
    /// Render a trajectory CSV as SVG.
    Plot(PlotArgs),
}

#[derive(Args)]
pub struct ClassifyArgs {
    pub scenario: String,
    /// Trace residual tolerance relative to the configuration diameter.
    #[arg(long, default_value_t = choreo_core::traces::PRINTED_EPS_REL)]
    pub eps: f64,
    /// Relative tolerance when matching frequency ratios to fractions.
    #[arg(long)]
    pub commensurability_tol: Option<f64>,
    #[arg(long)]
    pub max_denominator: Option<u64>,
    /// Relative sector energy below which a sector counts as inactive.
    #[arg(long)]
    pub active_tol: Option<f64>,
    /// Samples per period for the trace analysis.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Also write the machine-readable report to this file.
    #[arg(long)]
    pub json: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Analytic,
    Verlet,
    Both,
}

#[derive(Args)]
pub struct SimulateArgs {
    pub scenario: String,
    #[arg(long)]
    pub t_end: f64,
    /// Time step; defaults to the minimal period over 10⁴.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, value_enum, default_value_t = Engine::Analytic)]
    pub engine: Engine,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    pub out: Option<String>,
    /// Add momentum columns `px1, py1, ...`.
    #[arg(long)]
    pub momenta: bool,
    /// Write every k-th step.
    #[arg(long, default_value_t = 1)]
    pub every: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    ListedOnce,
    DoubleSum,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::ListedOnce => Convention::ListedOnce,
            ConventionArg::DoubleSum => Convention::DoubleSum,
        }
    }
}

#[derive(Args)]
pub struct DesignArgs {
    #[arg(long)]
    pub n: usize,
    /// Frequency ratios `m1:m2:...`, one per internal sector.
    #[arg(long)]
    pub ratios: String,
    #[arg(long, value_enum, default_value_t = ConventionArg::ListedOnce)]
    pub convention: ConventionArg,
}

#[derive(Args)]
pub struct PlotArgs {
    pub trajectory: String,
    /// Classification report (JSON, or `classify` output with a fenced block)
    /// used to color particles by trace block.
    #[arg(long)]
    pub partition: Option<String>,
    #[arg(long)]
    pub out: String,
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Spectrum { scenario } => spectrum::run(&scenario),
        Command::Classify(args) => classify::run(&args),
        Command::Simulate(args) => simulate::run(&args),
        Command::Design(args) => design::run(&args),
        Command::Scan { request, out } => scan::run(&request, &out),
        Command::Plot(args) => plot::run(&args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
