use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use mfnps::report::{
    build_table, compare, render_comparison, render_energy, render_oracle, render_table,
    EnergyQuery, EnergyRecord, OutputFormat, ORACLE_TOLERANCE,
};
use mfnps::{oracle_energy, SchemeKind, SolverConfig, Status};

const EXIT_NO_CONVERGENCE: u8 = 2;
const EXIT_INVALID_INPUT: u8 = 3;

/// Anharmonic oscillator levels from the Morse–Feshbach nonlinear series.
#[derive(Debug, Parser)]
#[command(name = "mfnps", version)]
struct Cli {
    /// Output format: table, csv or json.
    #[arg(long, global = true, env = "MFNPS_FORMAT", default_value = "table")]
    format: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one level at one series order.
    Energy(QueryArgs),
    /// Regenerate one of the reference tables (1, 2, 3, 5, 6, 7, 8, 9).
    Table {
        #[arg(long)]
        id: u8,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Reference level from direct diagonalization.
    Oracle {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, default_value_t = 0)]
        state: usize,
        #[arg(long, default_value_t = ORACLE_TOLERANCE)]
        tolerance: f64,
    },
    /// Series energy against the diagonalization reference.
    Compare(QueryArgs),
}

#[derive(Debug, Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 1e-14)]
    tolerance: f64,
    #[arg(long, default_value_t = 500)]
    max_iterations: usize,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
        }
    }
}

#[derive(Debug, Args)]
struct QueryArgs {
    #[arg(long, allow_negative_numbers = true)]
    lambda: f64,
    #[arg(long, default_value_t = 0)]
    state: usize,
    #[arg(long, default_value_t = 15)]
    order: usize,
    /// chain:<k>, var1 or var2.
    #[arg(long, default_value = "chain:1")]
    scheme: SchemeKind,
    /// Use the n = 0 splitting parameters for every state.
    #[arg(long)]
    ground_params: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

impl QueryArgs {
    fn query(&self) -> EnergyQuery {
        EnergyQuery {
            scheme: self.scheme,
            lambda: self.lambda,
            state_n: self.state,
            order_k: self.order,
            ground_params: self.ground_params,
        }
    }
}

fn status_code(status: Status) -> ExitCode {
    match status {
        Status::Converged => ExitCode::SUCCESS,
        Status::NoConvergence | Status::SmallDenominator => ExitCode::from(EXIT_NO_CONVERGENCE),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let format: OutputFormat = cli.format.parse()?;
    match cli.command {
        Command::Energy(args) => {
            let sol = args.query().solve(&args.solver.config())?;
            print!(
                "{}",
                render_energy(&EnergyRecord::from_solution(&sol), format)?
            );
            Ok(status_code(sol.status))
        }
        Command::Table { id, solver } => {
            let report = build_table(id, &solver.config())?;
            print!("{}", render_table(&report, format)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle {
            lambda,
            state,
            tolerance,
        } => {
            let e = oracle_energy(lambda, state, tolerance)?;
            print!("{}", render_oracle(lambda, state, e, format)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare(args) => {
            let (cmp, status) = compare(&args.query(), &args.solver.config())?;
            print!("{}", render_comparison(&cmp, format)?);
            Ok(status_code(status))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID_INPUT
            } else {
                0
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INVALID_INPUT)
        }
    }
}
