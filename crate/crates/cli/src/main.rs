//! `wq`: build, run, verify and benchmark the N-Queens circuits.
//!
//! Exit codes: 0 success, 1 oracle mismatch, 2 usage error, 3 resource limit.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wqueens::simulator::{SimConfig, SimError, DEFAULT_MAX_BRANCHES};
use wqueens::wstate::WStrategy;
use wqueens::{Algorithm, BoardLayout, ColumnGate, PipelineOptions};

mod commands;

/// Largest board accepted without `--force`.
const DEFAULT_N_MAX: usize = 8;

#[derive(Parser)]
#[command(
    name = "wq",
    version,
    about = "N-Queens quantum circuits on an exact sparse simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and run one circuit, print the solutions it finds.
    Solve(SolveArgs),
    /// Print a circuit in text form, or its statistics.
    Circuit(CircuitArgs),
    /// Check every algorithm against the classical solver for n = 1..n-max.
    Verify(VerifyArgs),
    /// Tabulate circuit size and exact-run time.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Pipeline,
    Direct,
    Backtracking,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Pipeline => Algorithm::Pipeline,
            AlgorithmArg::Direct => Algorithm::Direct,
            AlgorithmArg::Backtracking => Algorithm::Backtracking,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Shots,
}

#[derive(Clone, Copy, ValueEnum)]
enum ColumnGateArg {
    Cx,
    Cz,
}

#[derive(Clone, Copy, ValueEnum)]
enum WStrategyArg {
    Chain,
    Tree,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    n: i64,
    #[arg(long, value_enum, default_value = "pipeline")]
    algorithm: AlgorithmArg,
    #[arg(long, value_enum, default_value = "cx")]
    column_gate: ColumnGateArg,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    dynamic: bool,
    #[arg(long, value_enum, default_value = "chain")]
    w_strategy: WStrategyArg,
    /// Allow boards larger than the default maximum.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, env = "WQ_MAX_BRANCHES")]
    max_branches: Option<usize>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    build: BuildArgs,
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    #[arg(long, default_value_t = 4096)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct CircuitArgs {
    #[command(flatten)]
    build: BuildArgs,
    /// Print gate histogram and depth instead of the circuit.
    #[arg(long)]
    stats: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 5)]
    n_max: i64,
    #[arg(long)]
    force: bool,
    #[command(flatten)]
    run: RunArgs,
    /// Test hook: drop one controlled gate from this algorithm's circuits.
    #[arg(long, value_enum, hide = true)]
    inject_fault: Option<AlgorithmArg>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 5)]
    n_max: i64,
    #[arg(long)]
    force: bool,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Mismatch(String),
    #[error(transparent)]
    Resource(SimError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Mismatch(_) | Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Resource(_) => 3,
        }
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::ResourceLimit { .. } => Failure::Resource(e),
            other => Failure::Mismatch(other.to_string()),
        }
    }
}

fn board_size(n: i64, force: bool) -> Result<usize, Failure> {
    if n < 1 {
        return Err(Failure::Usage(format!("--n must be at least 1, got {n}")));
    }
    let n = n as usize;
    if n > DEFAULT_N_MAX && !force {
        return Err(Failure::Usage(format!(
            "--n {n} exceeds {DEFAULT_N_MAX}; pass --force to run it anyway"
        )));
    }
    Ok(n)
}

impl BuildArgs {
    fn layout(&self) -> Result<BoardLayout, Failure> {
        let n = board_size(self.n, self.force)?;
        BoardLayout::new(n).map_err(|e| Failure::Usage(e.to_string()))
    }

    fn options(&self) -> PipelineOptions {
        PipelineOptions {
            column_gate: match self.column_gate {
                ColumnGateArg::Cx => ColumnGate::Cx,
                ColumnGateArg::Cz => ColumnGate::Cz,
            },
            dynamic: self.dynamic,
            w_strategy: match self.w_strategy {
                WStrategyArg::Chain => WStrategy::Chain,
                WStrategyArg::Tree => WStrategy::Tree,
            },
        }
    }
}

impl RunArgs {
    fn config(&self) -> SimConfig {
        SimConfig {
            max_branches: self.max_branches.unwrap_or(DEFAULT_MAX_BRANCHES),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(args) => commands::solve(args),
        Command::Circuit(args) => commands::circuit(args),
        Command::Verify(args) => commands::verify(args),
        Command::Bench(args) => commands::bench(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("wq: {e}");
            ExitCode::from(e.code())
        }
    }
}
