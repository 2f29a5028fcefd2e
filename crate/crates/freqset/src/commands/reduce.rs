//! `reduce`: shrink the demand support. Two modes:
//!
//! - positive-support (`--scenario`): keep the flows with positive demand in
//!   one realization; lossless for the deterministic models.
//! - epsilon-threshold (`--stats` or `--scenarios`): keep flows with mean
//!   demand above ε and certify the worst-case objective loss
//!   `Λ(ε) = 2·M·ℓ·f(ε)`.

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use freqset_core::demand::DemandScenario;
use freqset_core::downsize::{reduce_heuristic, reduction_curve};

use crate::commands::{CliError, CommonArgs, ModelArgs, ReductionDto, Workspace};
use crate::config::{CliOverrides, ConfigEcho, ModelKind};
use crate::files::{load_scenario_rows, save_scenarios, save_stats};
use crate::report::{write_csv, write_json};

#[derive(Args, Clone, Debug)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Demand-statistics CSV (epsilon-threshold mode).
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// Scenario CSV file or directory; statistics are derived from it
    /// (epsilon-threshold mode).
    #[arg(long)]
    pub scenarios: Option<PathBuf>,
    /// Single realization to reduce to its positive support.
    #[arg(long, conflicts_with_all = ["stats", "scenarios"])]
    pub scenario: Option<PathBuf>,
    /// Scenario id to use when the file holds several.
    #[arg(long)]
    pub scenario_id: Option<String>,
    /// Mean-demand threshold ε.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Extra thresholds to tabulate (loss-bound curve), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
struct CurvePoint {
    epsilon: f64,
    kept: usize,
    dropped: usize,
    lambda_bound: f64,
}

#[derive(Serialize)]
struct ReduceReport {
    config: ConfigEcho,
    #[serde(flatten)]
    reduction: ReductionDto,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    curve: Vec<CurvePoint>,
    /// File the reduced input was written to.
    output: String,
}

pub fn run(args: &ReduceArgs) -> Result<(), CliError> {
    let overrides = CliOverrides { epsilon: args.epsilon, ..CliOverrides::default() };
    let workspace = Workspace::open(&args.common, overrides)?;

    if let Some(path) = &args.scenario {
        return positive_support(args, &workspace, path);
    }

    let model_args = ModelArgs {
        model: ModelKind::Robust,
        scenario: None,
        scenario_id: None,
        scenarios: args.scenarios.clone(),
        stats: args.stats.clone(),
        gamma_u: None,
        epsilon: None,
    };
    let (stats, source) = super::load_stats_input(&model_args).map_err(|e| match e {
        CliError::Usage(_) => CliError::Usage(
            "reduce needs --stats or --scenarios (threshold mode) or --scenario (support mode)"
                .to_string(),
        ),
        other => other,
    })?;

    let epsilon = workspace.resolved.epsilon;
    let big_m = workspace.resolved.params.big_m;
    let report = reduce_heuristic(&stats, epsilon, big_m)
        .map_err(|e| CliError::Build(e.to_string()))?;
    let curve = if args.grid.is_empty() {
        Vec::new()
    } else {
        reduction_curve(&stats, &args.grid, big_m)
            .map_err(|e| CliError::Build(e.to_string()))?
            .into_iter()
            .map(|p| CurvePoint {
                epsilon: p.epsilon,
                kept: p.kept,
                dropped: p.dropped,
                lambda_bound: p.loss_bound,
            })
            .collect()
    };

    let output = "stats_reduced.csv";
    save_stats(&workspace.out(output), &report.kept)?;
    let echo = workspace
        .echo("reduce", None, &args.common.instance)
        .with_input("stats", &source);
    let doc = ReduceReport {
        config: echo,
        reduction: ReductionDto::from(&report),
        curve: curve.clone(),
        output: output.to_string(),
    };
    write_json(&workspace.out("reduce.json"), &doc)?;
    if !curve.is_empty() {
        write_csv(
            &workspace.out("reduce_curve.csv"),
            &["epsilon", "kept", "dropped", "lambda_bound"],
            curve.iter().map(|p| {
                vec![
                    p.epsilon.to_string(),
                    p.kept.to_string(),
                    p.dropped.to_string(),
                    p.lambda_bound.to_string(),
                ]
            }),
        )?;
    }

    println!(
        "reduce: kept {} of {} flows at epsilon {} (loss bound {}) -> {}",
        doc.reduction.reduced_flow_count,
        doc.reduction.original_flow_count,
        epsilon,
        doc.reduction.lambda_bound,
        workspace.out("reduce.json").display()
    );
    Ok(())
}

/// Positive-support mode: drops the zero rows of one realization. Lossless,
/// so the certified bound is zero.
fn positive_support(
    args: &ReduceArgs,
    workspace: &Workspace,
    path: &PathBuf,
) -> Result<(), CliError> {
    let rows = load_scenario_rows(path)?;
    let wanted: Box<dyn Fn(&str) -> bool> = match &args.scenario_id {
        Some(id) => Box::new(move |s: &str| s == id),
        None => Box::new(|_| true),
    };
    let mut original = 0usize;
    let mut kept_rows = Vec::new();
    for row in rows {
        if !wanted(&row.scenario_id) {
            continue;
        }
        original += 1;
        if row.count > 0 {
            kept_rows.push(row);
        }
    }
    if original == 0 {
        return Err(CliError::Usage(format!(
            "no matching scenario rows in {}",
            path.display()
        )));
    }
    let reduced = kept_rows.len();
    let mut by_id: std::collections::BTreeMap<String, Vec<(freqset_core::PassengerFlow, u64)>> =
        std::collections::BTreeMap::new();
    for row in kept_rows {
        by_id
            .entry(row.scenario_id.clone())
            .or_default()
            .push((freqset_core::PassengerFlow::new(row.origin, row.destination, row.period), row.count));
    }
    let scenarios: Vec<DemandScenario> =
        by_id.into_iter().map(|(id, counts)| DemandScenario::new(id, counts)).collect();

    let output = "scenario_reduced.csv";
    save_scenarios(&workspace.out(output), &scenarios)?;
    let echo = workspace
        .echo("reduce", None, &args.common.instance)
        .with_input("scenario", path);
    let doc = ReduceReport {
        config: echo,
        reduction: ReductionDto {
            mode: "positive-support",
            original_flow_count: original,
            reduced_flow_count: reduced,
            epsilon: 0.0,
            f_epsilon: original - reduced,
            ell: None,
            // Restricting to the positive support never changes the optimum.
            lambda_bound: 0.0,
        },
        curve: Vec::new(),
        output: output.to_string(),
    };
    write_json(&workspace.out("reduce.json"), &doc)?;
    println!(
        "reduce: kept {reduced} of {original} flow rows (positive support) -> {}",
        workspace.out("reduce.json").display()
    );
    Ok(())
}
