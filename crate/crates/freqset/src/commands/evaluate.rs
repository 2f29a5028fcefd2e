//! `evaluate`: fix a schedule, assign each scenario's passengers optimally,
//! and report waiting / in-vehicle / unsatisfied / crowding metrics per
//! scenario plus their means.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use freqset_core::demand::DemandScenario;
use freqset_core::evaluate::{assign_passengers, pattern_crowded_fractions, AssignmentOutcome};
use freqset_core::{Schedule, TransitInstance};

use crate::commands::{schedule_summary, CliError, CommonArgs, ScheduleSummary, Workspace};
use crate::config::{CliOverrides, ConfigEcho};
use crate::files::{load_scenario_input, load_schedule};
use crate::report::{write_csv, write_json};
use crate::workers::par_map;

#[derive(Args, Clone, Debug)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Schedule to evaluate (JSON).
    #[arg(long)]
    pub schedule: PathBuf,
    /// Scenario CSV file or directory of them.
    #[arg(long)]
    pub scenarios: PathBuf,
    /// Evaluate only this scenario id.
    #[arg(long)]
    pub scenario_id: Option<String>,
}

/// Metrics of one scenario under the fixed schedule.
#[derive(Clone, Debug, Serialize)]
pub struct EvaluationRow {
    pub scenario_id: String,
    pub total_objective: f64,
    /// Mean waiting minutes over satisfied passengers.
    pub avg_wait_minutes: f64,
    /// Mean in-vehicle minutes over satisfied passengers.
    pub avg_in_vehicle_minutes: f64,
    pub unsatisfied_fraction: f64,
    /// Fraction of each pattern's dispatched running time that is crowded.
    pub crowded_time_fraction: BTreeMap<String, f64>,
    /// Crowded running time over all dispatched running time.
    pub crowded_fraction_overall: f64,
    pub total_demand: f64,
    pub served: f64,
    pub unserved: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MeanBlock {
    pub total_objective: f64,
    pub avg_wait_minutes: f64,
    pub avg_in_vehicle_minutes: f64,
    pub unsatisfied_fraction: f64,
    pub crowded_fraction_overall: f64,
}

#[derive(Serialize)]
struct EvaluateReport {
    config: ConfigEcho,
    schedule: ScheduleSummary,
    per_scenario: Vec<EvaluationRow>,
    mean: MeanBlock,
}

pub fn evaluation_row(
    instance: &TransitInstance,
    schedule: &Schedule,
    scenario: &DemandScenario,
    outcome: &AssignmentOutcome,
) -> EvaluationRow {
    let line = instance.line();
    let fractions = pattern_crowded_fractions(instance, schedule, &outcome.segment_loads);
    EvaluationRow {
        scenario_id: scenario.id().to_string(),
        total_objective: outcome.objective,
        avg_wait_minutes: outcome.avg_wait,
        avg_in_vehicle_minutes: outcome.avg_travel,
        unsatisfied_fraction: outcome.unsat_frac,
        crowded_time_fraction: fractions
            .iter()
            .enumerate()
            .map(|(p, &f)| (line.pattern(p).id().to_string(), f))
            .collect(),
        crowded_fraction_overall: outcome.crowded_frac,
        total_demand: outcome.total_demand,
        served: outcome.served,
        unserved: outcome.unserved,
    }
}

fn mean_block(rows: &[EvaluationRow]) -> MeanBlock {
    let n = rows.len().max(1) as f64;
    MeanBlock {
        total_objective: rows.iter().map(|r| r.total_objective).sum::<f64>() / n,
        avg_wait_minutes: rows.iter().map(|r| r.avg_wait_minutes).sum::<f64>() / n,
        avg_in_vehicle_minutes: rows.iter().map(|r| r.avg_in_vehicle_minutes).sum::<f64>() / n,
        unsatisfied_fraction: rows.iter().map(|r| r.unsatisfied_fraction).sum::<f64>() / n,
        crowded_fraction_overall: rows.iter().map(|r| r.crowded_fraction_overall).sum::<f64>() / n,
    }
}

pub fn run(args: &EvaluateArgs) -> Result<(), CliError> {
    let workspace = Workspace::open(&args.common, CliOverrides::default())?;
    let schedule = load_schedule(&args.schedule, &workspace.instance)?;
    let mut scenarios = load_scenario_input(&args.scenarios)?;
    if let Some(id) = &args.scenario_id {
        scenarios.retain(|s| s.id() == *id);
        if scenarios.is_empty() {
            return Err(CliError::Usage(format!(
                "scenario id {id:?} not found in {}",
                args.scenarios.display()
            )));
        }
    }

    let instance = &workspace.instance;
    let outcomes = par_map(&scenarios, workspace.resolved.workers, |scenario| {
        assign_passengers(instance, &schedule, &scenario.demand_map())
    });
    let mut rows = Vec::with_capacity(scenarios.len());
    for (scenario, outcome) in scenarios.iter().zip(outcomes) {
        let outcome = outcome.map_err(|e| {
            CliError::Evaluate(format!("scenario {:?}: {e}", scenario.id()))
        })?;
        rows.push(evaluation_row(instance, &schedule, scenario, &outcome));
    }

    let echo = workspace
        .echo("evaluate", None, &args.common.instance)
        .with_input("schedule", &args.schedule)
        .with_input("scenarios", &args.scenarios);
    let report = EvaluateReport {
        config: echo,
        schedule: schedule_summary(&schedule, instance),
        mean: mean_block(&rows),
        per_scenario: rows,
    };

    write_json(&workspace.out("evaluate.json"), &report)?;
    let csv_rows = report
        .per_scenario
        .iter()
        .map(|r| {
            vec![
                r.scenario_id.clone(),
                r.total_objective.to_string(),
                r.avg_wait_minutes.to_string(),
                r.avg_in_vehicle_minutes.to_string(),
                r.unsatisfied_fraction.to_string(),
                r.crowded_fraction_overall.to_string(),
                r.served.to_string(),
                r.unserved.to_string(),
            ]
        })
        .chain(std::iter::once(vec![
            "mean".to_string(),
            report.mean.total_objective.to_string(),
            report.mean.avg_wait_minutes.to_string(),
            report.mean.avg_in_vehicle_minutes.to_string(),
            report.mean.unsatisfied_fraction.to_string(),
            report.mean.crowded_fraction_overall.to_string(),
            String::new(),
            String::new(),
        ]));
    write_csv(
        &workspace.out("evaluate.csv"),
        &[
            "scenario_id",
            "total_objective",
            "avg_wait_minutes",
            "avg_in_vehicle_minutes",
            "unsatisfied_fraction",
            "crowded_fraction_overall",
            "served",
            "unserved",
        ],
        csv_rows,
    )?;

    println!(
        "evaluate: {} scenarios, mean wait {:.3} min, mean unsatisfied {:.4} -> {}",
        report.per_scenario.len(),
        report.mean.avg_wait_minutes,
        report.mean.unsatisfied_fraction,
        workspace.out("evaluate.json").display()
    );
    Ok(())
}
