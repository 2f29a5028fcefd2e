//! `compare`: evaluate two schedules over the same scenario set and report
//! paired waiting-time / in-vehicle-time changes, means, and win counts.

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use freqset_core::evaluate::{compare_schedules, percent_decrease, EvalStats};

use crate::commands::{schedule_summary, CliError, CommonArgs, ScheduleSummary, Workspace};
use crate::config::{CliOverrides, ConfigEcho};
use crate::files::load_schedule;
use crate::report::{write_csv, write_json};

#[derive(Args, Clone, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Schedule whose improvement is measured (JSON).
    #[arg(long)]
    pub candidate: PathBuf,
    /// Schedule compared against (JSON).
    #[arg(long)]
    pub baseline: PathBuf,
    /// Scenario CSV file or directory of them.
    #[arg(long)]
    pub scenarios: PathBuf,
}

#[derive(Clone, Debug, Serialize)]
struct StatsDto {
    objective: f64,
    avg_wait_minutes: f64,
    avg_in_vehicle_minutes: f64,
    unsatisfied_fraction: f64,
    served: f64,
}

impl From<&EvalStats> for StatsDto {
    fn from(s: &EvalStats) -> Self {
        StatsDto {
            objective: s.objective,
            avg_wait_minutes: s.avg_wait,
            avg_in_vehicle_minutes: s.avg_travel,
            unsatisfied_fraction: s.unsat_frac,
            served: s.served,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
struct ComparisonRow {
    scenario_id: String,
    probability: f64,
    candidate: StatsDto,
    baseline: StatsDto,
    /// Positive percentages mean the candidate is better (smaller).
    wait_decrease_pct: f64,
    travel_decrease_pct: f64,
}

#[derive(Serialize)]
struct CompareReport {
    config: ConfigEcho,
    candidate_schedule: ScheduleSummary,
    baseline_schedule: ScheduleSummary,
    per_scenario: Vec<ComparisonRow>,
    /// Probability-weighted means over the scenario set.
    mean_candidate: StatsDto,
    mean_baseline: StatsDto,
    wait_decrease_pct: f64,
    travel_decrease_pct: f64,
    wins_wait: usize,
    wins_travel: usize,
    wins_both: usize,
    scenario_count: usize,
}

pub fn run(args: &CompareArgs) -> Result<(), CliError> {
    let workspace = Workspace::open(&args.common, CliOverrides::default())?;
    let instance = &workspace.instance;
    let candidate = load_schedule(&args.candidate, instance)?;
    let baseline = load_schedule(&args.baseline, instance)?;
    let set = super::load_scenario_set(&args.scenarios)?;

    let comparison = compare_schedules(instance, &candidate, &baseline, &set)
        .map_err(|e| CliError::Evaluate(e.to_string()))?;

    let per_scenario: Vec<ComparisonRow> = comparison
        .per_scenario
        .iter()
        .map(|s| ComparisonRow {
            scenario_id: s.scenario_id.clone(),
            probability: s.probability,
            candidate: StatsDto::from(&s.candidate),
            baseline: StatsDto::from(&s.baseline),
            wait_decrease_pct: percent_decrease(s.baseline.avg_wait, s.candidate.avg_wait),
            travel_decrease_pct: percent_decrease(s.baseline.avg_travel, s.candidate.avg_travel),
        })
        .collect();

    let echo = workspace
        .echo("compare", None, &args.common.instance)
        .with_input("candidate", &args.candidate)
        .with_input("baseline", &args.baseline)
        .with_input("scenarios", &args.scenarios);
    let report = CompareReport {
        config: echo,
        candidate_schedule: schedule_summary(&candidate, instance),
        baseline_schedule: schedule_summary(&baseline, instance),
        scenario_count: per_scenario.len(),
        per_scenario,
        mean_candidate: StatsDto::from(&comparison.mean_candidate),
        mean_baseline: StatsDto::from(&comparison.mean_baseline),
        wait_decrease_pct: comparison.wait_decrease_pct,
        travel_decrease_pct: comparison.travel_decrease_pct,
        wins_wait: comparison.wins_wait,
        wins_travel: comparison.wins_travel,
        wins_both: comparison.wins_both,
    };

    write_json(&workspace.out("compare.json"), &report)?;
    let csv_rows = report
        .per_scenario
        .iter()
        .map(|r| {
            vec![
                r.scenario_id.clone(),
                r.candidate.avg_wait_minutes.to_string(),
                r.baseline.avg_wait_minutes.to_string(),
                r.wait_decrease_pct.to_string(),
                r.candidate.avg_in_vehicle_minutes.to_string(),
                r.baseline.avg_in_vehicle_minutes.to_string(),
                r.travel_decrease_pct.to_string(),
                r.candidate.unsatisfied_fraction.to_string(),
                r.baseline.unsatisfied_fraction.to_string(),
            ]
        })
        .chain(std::iter::once(vec![
            "mean".to_string(),
            report.mean_candidate.avg_wait_minutes.to_string(),
            report.mean_baseline.avg_wait_minutes.to_string(),
            report.wait_decrease_pct.to_string(),
            report.mean_candidate.avg_in_vehicle_minutes.to_string(),
            report.mean_baseline.avg_in_vehicle_minutes.to_string(),
            report.travel_decrease_pct.to_string(),
            report.mean_candidate.unsatisfied_fraction.to_string(),
            report.mean_baseline.unsatisfied_fraction.to_string(),
        ]));
    write_csv(
        &workspace.out("compare.csv"),
        &[
            "scenario_id",
            "candidate_wait",
            "baseline_wait",
            "wait_decrease_pct",
            "candidate_travel",
            "baseline_travel",
            "travel_decrease_pct",
            "candidate_unsatisfied",
            "baseline_unsatisfied",
        ],
        csv_rows,
    )?;

    println!(
        "compare: wait {:+.2}% travel {:+.2}% (wins {}/{}/{} of {}) -> {}",
        report.wait_decrease_pct,
        report.travel_decrease_pct,
        report.wins_wait,
        report.wins_travel,
        report.wins_both,
        report.scenario_count,
        workspace.out("compare.json").display()
    );
    Ok(())
}
