//! Command-line driver for transit frequency setting: build and solve the
//! planning models, evaluate and compare schedules, sweep parameters, reduce
//! demand supports, synthesize demand, and exchange models with external
//! solvers.
//!
//! Failures print one machine-readable JSON line on stdout and exit nonzero:
//! 2 for a bad flag combination, 1 for everything else.

use clap::{Parser, Subcommand};

use freqset::commands::{
    compare, evaluate, export_lp, gen_demand, import_solution, reduce, solve, sweep, CliError,
};

#[derive(Parser)]
#[command(
    name = "freqset",
    version,
    about = "Frequency setting for a single transit line: nominal, crowding, stochastic, and robust planning models with an embedded exact solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a model and solve it with the embedded solver.
    Solve(solve::SolveArgs),
    /// Evaluate a fixed schedule over demand scenarios.
    Evaluate(evaluate::EvaluateArgs),
    /// Compare two schedules over the same scenarios.
    Compare(compare::CompareArgs),
    /// Re-solve along a parameter grid (gamma, omega, or gamma-u).
    Sweep(sweep::SweepArgs),
    /// Shrink the demand support (positive support or mean threshold).
    Reduce(reduce::ReduceArgs),
    /// Draw synthetic Poisson demand scenarios.
    GenDemand(gen_demand::GenDemandArgs),
    /// Write the model in LP format for an external solver.
    ExportLp(export_lp::ExportLpArgs),
    /// Read an external solver's solution back and recover the schedule.
    ImportSolution(import_solution::ImportSolutionArgs),
}

fn dispatch(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Solve(args) => solve::run(args),
        Command::Evaluate(args) => evaluate::run(args),
        Command::Compare(args) => compare::run(args),
        Command::Sweep(args) => sweep::run(args),
        Command::Reduce(args) => reduce::run(args),
        Command::GenDemand(args) => gen_demand::run(args),
        Command::ExportLp(args) => export_lp::run(args),
        Command::ImportSolution(args) => import_solution::run(args),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(error) = dispatch(&cli.command) {
        let payload = serde_json::json!({
            "error": { "kind": error.kind(), "detail": error.to_string() }
        });
        println!("{payload}");
        std::process::exit(error.exit_code());
    }
}
