//! `solve`: build the requested model, run the embedded solver, and write
//! the schedule plus a solve report. Wall-clock time goes only into the log
//! file so every other output is byte-reproducible.

use clap::Args;
use serde::Serialize;

use freqset_core::formulate::extract_schedule;
use freqset_core::milp::{solve, Solution, SolveStatus};

use crate::commands::{
    build_model, schedule_summary, CliError, CommonArgs, ManifestDto, ModelArgs, ReductionDto,
    ScheduleSummary, Workspace,
};
use crate::config::ConfigEcho;
use crate::files::save_schedule;
use crate::report::{format_gap, write_json, write_text};
use crate::files;

#[derive(Args, Clone, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Serialize)]
struct SolverBlock {
    status: &'static str,
    objective: f64,
    best_bound: f64,
    gap_absolute: f64,
    gap: String,
    nodes: u64,
    lp_iterations: u64,
}

#[derive(Serialize)]
struct SolveReport {
    config: ConfigEcho,
    model: ManifestDto,
    solver: SolverBlock,
    schedule: ScheduleSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    reduction: Option<ReductionDto>,
}

pub fn status_str(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Optimal => "optimal",
        SolveStatus::FeasibleLimit => "feasible_limit",
        SolveStatus::NoSolutionLimit => "no_solution_limit",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::Unbounded => "unbounded",
    }
}

/// Maps a finished search to the command outcome: schedules exist only for
/// feasible outcomes.
pub fn require_incumbent(solution: &Solution) -> Result<(), CliError> {
    match solution.status {
        SolveStatus::Optimal | SolveStatus::FeasibleLimit => Ok(()),
        SolveStatus::NoSolutionLimit => Err(CliError::Solve(
            "search limit reached before any feasible schedule was found".to_string(),
        )),
        SolveStatus::Infeasible => Err(CliError::Solve("the model is infeasible".to_string())),
        SolveStatus::Unbounded => Err(CliError::Solve("the model is unbounded".to_string())),
    }
}

pub fn run(args: &SolveArgs) -> Result<(), CliError> {
    let workspace = Workspace::open(&args.common, args.model.overrides())?;
    let (built, context) = build_model(&workspace, &args.model)?;

    let started = std::time::Instant::now();
    let solution =
        solve(&built.model, &workspace.resolved.limits).map_err(|e| CliError::Solve(e.to_string()))?;
    let wall = started.elapsed().as_secs_f64();
    require_incumbent(&solution)?;

    let schedule =
        extract_schedule(&built, &solution.values).map_err(|e| CliError::Solve(e.to_string()))?;

    let mut echo = workspace.echo("solve", Some(args.model.model), &args.common.instance);
    for (role, path) in &context.echo_inputs {
        echo = echo.with_input(role, path);
    }
    let report = SolveReport {
        config: echo,
        model: ManifestDto::from(&built.manifest),
        solver: SolverBlock {
            status: status_str(solution.status),
            objective: solution.objective,
            best_bound: solution.best_bound,
            gap_absolute: solution.gap,
            gap: format_gap(solution.status, solution.objective, solution.gap),
            nodes: solution.nodes,
            lp_iterations: solution.lp_iterations,
        },
        schedule: schedule_summary(&schedule, &workspace.instance),
        reduction: context.reduction.as_ref().map(ReductionDto::from),
    };

    save_schedule(&workspace.out("schedule.json"), &schedule, &workspace.instance)?;
    files::save_solution(&workspace.out("solution.csv"), &built.model, &solution.values)?;
    write_json(&workspace.out("solve.json"), &report)?;
    let log = format!(
        "model: {}\nstatus: {}\nobjective: {}\nbest_bound: {}\ngap_absolute: {}\nnodes: {}\nlp_iterations: {}\nwall_seconds: {wall:.3}\n",
        args.model.model.as_str(),
        report.solver.status,
        solution.objective,
        solution.best_bound,
        solution.gap,
        solution.nodes,
        solution.lp_iterations,
    );
    write_text(&workspace.out("solve.log"), &log)?;

    println!(
        "solve: {} objective {} ({}, {} nodes) -> {}",
        args.model.model.as_str(),
        solution.objective,
        report.solver.status,
        solution.nodes,
        workspace.out("solve.json").display()
    );
    Ok(())
}
