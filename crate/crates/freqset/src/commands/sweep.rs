//! `sweep`: re-solve the model along a parameter grid (γ, ω, or Γ) and
//! tabulate objectives and evaluation metrics per point. A Γ sweep can
//! additionally evaluate every solved schedule over a scenario set and
//! report waiting/in-vehicle changes against a reference and a baseline
//! schedule — the robustness-versus-conservatism table.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use freqset_core::demand::ScenarioSet;
use freqset_core::evaluate::{
    assign_passengers, percent_decrease, sweep_gamma, sweep_omega, sweep_uncertainty, SweepOutcome,
    SweepRow,
};
use freqset_core::milp::SolveStatus;
use freqset_core::{Schedule, TransitInstance};

use crate::commands::{load_single_scenario, load_stats_input, CliError, CommonArgs, Workspace};
use crate::config::{CliOverrides, ConfigEcho, ModelKind};
use crate::files::load_schedule;
use crate::report::{format_gap, svg_line_chart, write_csv, write_json, write_text, Series};

/// Which parameter the grid walks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepParam {
    /// Journey weight γ (nominal model).
    Gamma,
    /// Crowding weight ω (crowding model).
    Omega,
    /// Uncertainty budget Γ (robust model).
    GammaU,
}

impl SweepParam {
    fn as_str(self) -> &'static str {
        match self {
            SweepParam::Gamma => "gamma",
            SweepParam::Omega => "omega",
            SweepParam::GammaU => "gamma_u",
        }
    }

    fn model(self) -> ModelKind {
        match self {
            SweepParam::Gamma => ModelKind::Nominal,
            SweepParam::Omega => ModelKind::Crowding,
            SweepParam::GammaU => ModelKind::Robust,
        }
    }
}

#[derive(Args, Clone, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Parameter to sweep.
    #[arg(long, value_enum)]
    pub param: SweepParam,
    /// Grid values, comma separated (kept in the given order).
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<f64>,
    /// Scenario CSV holding the demand realization (gamma, omega sweeps).
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Scenario id to use when the file holds several.
    #[arg(long)]
    pub scenario_id: Option<String>,
    /// Scenario CSV file or directory (gamma-u sweeps: μ/σ source).
    #[arg(long)]
    pub scenarios: Option<PathBuf>,
    /// Demand-statistics CSV (gamma-u sweeps).
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// Evaluate each solved schedule over these scenarios (file or dir).
    #[arg(long)]
    pub eval_scenarios: Option<PathBuf>,
    /// Schedule whose evaluation fills the first comparison column.
    #[arg(long, requires = "eval_scenarios")]
    pub reference_schedule: Option<PathBuf>,
    /// Schedule whose evaluation fills the second comparison column.
    #[arg(long, requires = "eval_scenarios")]
    pub baseline_schedule: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
struct SweepRowDto {
    param: f64,
    objective: f64,
    solve_gap: f64,
    gap: String,
    total_wait: f64,
    total_travel: f64,
    penalty: f64,
    avg_wait: f64,
    avg_travel: f64,
    unsatisfied_fraction: f64,
    crowded_time: f64,
    crowded_fraction: f64,
    num_dispatches: usize,
    dispatches_per_pattern: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, Serialize)]
struct FailureDto {
    param: f64,
    reason: String,
}

/// Mean evaluation of one schedule over the evaluation scenarios.
#[derive(Clone, Copy, Debug, Serialize)]
struct EvalMeans {
    avg_wait_minutes: f64,
    avg_in_vehicle_minutes: f64,
    unsatisfied_fraction: f64,
}

#[derive(Clone, Debug, Serialize)]
struct TableRow {
    param: f64,
    avg_wait_minutes: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    wait_vs_reference_pct: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wait_vs_baseline_pct: Option<f64>,
    avg_in_vehicle_minutes: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    travel_vs_reference_pct: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    travel_vs_baseline_pct: Option<f64>,
    gap: String,
}

#[derive(Serialize)]
struct SweepReport {
    config: ConfigEcho,
    param: &'static str,
    model: &'static str,
    rows: Vec<SweepRowDto>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    failures: Vec<FailureDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reference: Option<EvalMeans>,
    #[serde(skip_serializing_if = "Option::is_none")]
    baseline: Option<EvalMeans>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    table: Vec<TableRow>,
}

fn row_dto(row: &SweepRow, instance: &TransitInstance, gap_limit: f64) -> SweepRowDto {
    let line = instance.line();
    let status =
        if row.solve_gap <= gap_limit { SolveStatus::Optimal } else { SolveStatus::FeasibleLimit };
    SweepRowDto {
        param: row.param,
        objective: row.objective,
        solve_gap: row.solve_gap,
        gap: format_gap(status, row.objective, row.solve_gap),
        total_wait: row.total_wait,
        total_travel: row.total_travel,
        penalty: row.penalty,
        avg_wait: row.avg_wait,
        avg_travel: row.avg_travel,
        unsatisfied_fraction: row.unsat_frac,
        crowded_time: row.crowded_time,
        crowded_fraction: row.crowded_frac,
        num_dispatches: row.schedule.num_dispatches(),
        dispatches_per_pattern: row
            .pattern_dispatches
            .iter()
            .enumerate()
            .filter(|&(_, &n)| n > 0)
            .map(|(p, &n)| (line.pattern(p).id().to_string(), n))
            .collect(),
    }
}

/// Probability-weighted evaluation means of a schedule over a scenario set.
fn eval_means(
    instance: &TransitInstance,
    schedule: &Schedule,
    set: &ScenarioSet,
    label: &str,
) -> Result<EvalMeans, CliError> {
    let mut wait = 0.0;
    let mut travel = 0.0;
    let mut unsat = 0.0;
    for (scenario, probability) in set.iter() {
        let outcome = assign_passengers(instance, schedule, &scenario.demand_map())
            .map_err(|e| CliError::Evaluate(format!("{label}, scenario {:?}: {e}", scenario.id())))?;
        wait += probability * outcome.avg_wait;
        travel += probability * outcome.avg_travel;
        unsat += probability * outcome.unsat_frac;
    }
    Ok(EvalMeans {
        avg_wait_minutes: wait,
        avg_in_vehicle_minutes: travel,
        unsatisfied_fraction: unsat,
    })
}

pub fn run(args: &SweepArgs) -> Result<(), CliError> {
    let overrides = CliOverrides::default();
    let workspace = Workspace::open(&args.common, overrides)?;
    let instance = &workspace.instance;
    let limits = workspace.resolved.limits;

    if args.values.is_empty() {
        return Err(CliError::Usage("--values must name at least one grid point".to_string()));
    }

    let outcome: SweepOutcome = match args.param {
        SweepParam::Gamma | SweepParam::Omega => {
            let path = args.scenario.as_ref().ok_or_else(|| {
                CliError::Usage(format!(
                    "--scenario is required for a {} sweep",
                    args.param.as_str()
                ))
            })?;
            let scenario = load_single_scenario(path, args.scenario_id.as_deref())?;
            let demand = scenario.demand_map();
            if args.param == SweepParam::Gamma {
                sweep_gamma(instance, &demand, &args.values, &limits)
            } else {
                sweep_omega(instance, &demand, &args.values, &limits)
            }
        }
        SweepParam::GammaU => {
            let model_args = super::ModelArgs {
                model: ModelKind::Robust,
                scenario: None,
                scenario_id: None,
                scenarios: args.scenarios.clone(),
                stats: args.stats.clone(),
                gamma_u: None,
                epsilon: None,
            };
            let (stats, _) = load_stats_input(&model_args)?;
            sweep_uncertainty(instance, &stats, &args.values, &limits)
        }
    };

    // Optional evaluation pass: each solved schedule, plus the reference and
    // baseline schedules, over the same scenario set.
    let mut table = Vec::new();
    let mut reference = None;
    let mut baseline = None;
    if let Some(eval_path) = &args.eval_scenarios {
        let set = super::load_scenario_set(eval_path)?;
        reference = match &args.reference_schedule {
            Some(path) => Some(eval_means(instance, &load_schedule(path, instance)?, &set, "reference")?),
            None => None,
        };
        baseline = match &args.baseline_schedule {
            Some(path) => Some(eval_means(instance, &load_schedule(path, instance)?, &set, "baseline")?),
            None => None,
        };
        for row in &outcome.rows {
            let means = eval_means(instance, &row.schedule, &set, "swept schedule")?;
            let status = if row.solve_gap <= limits.gap {
                SolveStatus::Optimal
            } else {
                SolveStatus::FeasibleLimit
            };
            table.push(TableRow {
                param: row.param,
                avg_wait_minutes: means.avg_wait_minutes,
                wait_vs_reference_pct: reference.map(|r| {
                    percent_decrease(r.avg_wait_minutes, means.avg_wait_minutes)
                }),
                wait_vs_baseline_pct: baseline.map(|b| {
                    percent_decrease(b.avg_wait_minutes, means.avg_wait_minutes)
                }),
                avg_in_vehicle_minutes: means.avg_in_vehicle_minutes,
                travel_vs_reference_pct: reference.map(|r| {
                    percent_decrease(r.avg_in_vehicle_minutes, means.avg_in_vehicle_minutes)
                }),
                travel_vs_baseline_pct: baseline.map(|b| {
                    percent_decrease(b.avg_in_vehicle_minutes, means.avg_in_vehicle_minutes)
                }),
                gap: format_gap(status, row.objective, row.solve_gap),
            });
        }
    }

    let mut echo = workspace.echo("sweep", Some(args.param.model()), &args.common.instance);
    for (role, path) in [
        ("scenario", &args.scenario),
        ("scenarios", &args.scenarios),
        ("stats", &args.stats),
        ("eval_scenarios", &args.eval_scenarios),
        ("reference_schedule", &args.reference_schedule),
        ("baseline_schedule", &args.baseline_schedule),
    ] {
        if let Some(path) = path {
            echo = echo.with_input(role, path);
        }
    }

    let rows: Vec<SweepRowDto> =
        outcome.rows.iter().map(|r| row_dto(r, instance, limits.gap)).collect();
    let report = SweepReport {
        config: echo,
        param: args.param.as_str(),
        model: args.param.model().as_str(),
        rows,
        failures: outcome
            .failures
            .iter()
            .map(|f| FailureDto { param: f.param, reason: f.reason.clone() })
            .collect(),
        reference,
        baseline,
        table: table.clone(),
    };

    write_json(&workspace.out("sweep.json"), &report)?;
    write_csv(
        &workspace.out("sweep.csv"),
        &[
            "param",
            "objective",
            "gap",
            "total_wait",
            "total_travel",
            "penalty",
            "avg_wait",
            "avg_travel",
            "unsatisfied_fraction",
            "crowded_time",
            "crowded_fraction",
            "num_dispatches",
        ],
        report.rows.iter().map(|r| {
            vec![
                r.param.to_string(),
                r.objective.to_string(),
                r.gap.clone(),
                r.total_wait.to_string(),
                r.total_travel.to_string(),
                r.penalty.to_string(),
                r.avg_wait.to_string(),
                r.avg_travel.to_string(),
                r.unsatisfied_fraction.to_string(),
                r.crowded_time.to_string(),
                r.crowded_fraction.to_string(),
                r.num_dispatches.to_string(),
            ]
        }),
    )?;
    if !table.is_empty() {
        write_csv(
            &workspace.out("table.csv"),
            &[
                "param",
                "avg_wait_minutes",
                "wait_vs_reference_pct",
                "wait_vs_baseline_pct",
                "avg_in_vehicle_minutes",
                "travel_vs_reference_pct",
                "travel_vs_baseline_pct",
                "gap",
            ],
            table.iter().map(|r| {
                let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
                vec![
                    r.param.to_string(),
                    r.avg_wait_minutes.to_string(),
                    opt(r.wait_vs_reference_pct),
                    opt(r.wait_vs_baseline_pct),
                    r.avg_in_vehicle_minutes.to_string(),
                    opt(r.travel_vs_reference_pct),
                    opt(r.travel_vs_baseline_pct),
                    r.gap.clone(),
                ]
            }),
        )?;
    }
    let chart = svg_line_chart(
        &format!("objective vs {}", args.param.as_str()),
        args.param.as_str(),
        "objective",
        &[Series {
            name: "objective".to_string(),
            points: report.rows.iter().map(|r| (r.param, r.objective)).collect(),
        }],
    );
    write_text(&workspace.out("sweep.svg"), &chart)?;

    println!(
        "sweep: {} over {} points ({} failed) -> {}",
        args.param.as_str(),
        report.rows.len(),
        report.failures.len(),
        workspace.out("sweep.json").display()
    );
    Ok(())
}
