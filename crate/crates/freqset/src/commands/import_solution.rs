//! `import-solution`: read externally solved variable values, check them
//! against the rebuilt model, and recover the schedule. Variables absent
//! from the file default to zero (external solvers commonly omit zeros).

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use freqset_core::formulate::extract_schedule;

use crate::commands::{
    build_model, schedule_summary, CliError, CommonArgs, ManifestDto, ModelArgs, ScheduleSummary,
    Workspace,
};
use crate::config::ConfigEcho;
use crate::files::{load_solution, save_schedule};
use crate::report::write_json;

#[derive(Args, Clone, Debug)]
pub struct ImportSolutionArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Solution CSV (`variable,value`) from the external solver.
    #[arg(long)]
    pub solution: PathBuf,
    /// Feasibility tolerance for the imported point.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Serialize)]
struct ImportReport {
    config: ConfigEcho,
    model: ManifestDto,
    objective: f64,
    /// Variables the file supplied; the rest defaulted to zero.
    provided_variables: usize,
    schedule: ScheduleSummary,
}

pub fn run(args: &ImportSolutionArgs) -> Result<(), CliError> {
    let workspace = Workspace::open(&args.common, args.model.overrides())?;
    let (built, context) = build_model(&workspace, &args.model)?;

    let pairs = load_solution(&args.solution)?;
    let mut values = vec![0.0; built.model.num_vars()];
    for (name, value) in &pairs {
        let id = built.model.var_by_name(name).ok_or_else(|| {
            CliError::Evaluate(format!("solution names unknown variable {name:?}"))
        })?;
        values[id.index()] = *value;
    }

    let violations = built
        .model
        .check_solution(&values, args.tol)
        .map_err(|e| CliError::Evaluate(e.to_string()))?;
    if !violations.is_empty() {
        let first = violations
            .iter()
            .take(3)
            .map(|v| format!("{v}"))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(CliError::Evaluate(format!(
            "imported point violates {} constraint(s)/bound(s) at tolerance {}: {first}",
            violations.len(),
            args.tol
        )));
    }

    let schedule =
        extract_schedule(&built, &values).map_err(|e| CliError::Evaluate(e.to_string()))?;
    save_schedule(&workspace.out("schedule.json"), &schedule, &workspace.instance)?;

    let mut echo =
        workspace.echo("import-solution", Some(args.model.model), &args.common.instance);
    for (role, path) in &context.echo_inputs {
        echo = echo.with_input(role, path);
    }
    let echo = echo.with_input("solution", &args.solution);
    let report = ImportReport {
        config: echo,
        model: ManifestDto::from(&built.manifest),
        objective: built.model.objective_value(&values),
        provided_variables: pairs.len(),
        schedule: schedule_summary(&schedule, &workspace.instance),
    };
    write_json(&workspace.out("import-solution.json"), &report)?;

    println!(
        "import-solution: objective {} from {} values -> {}",
        report.objective,
        report.provided_variables,
        workspace.out("import-solution.json").display()
    );
    Ok(())
}
