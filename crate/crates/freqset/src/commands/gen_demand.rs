//! `gen-demand`: draw synthetic demand scenarios — independent Poisson
//! counts at rate β·mean per flow — from a statistics file or from
//! statistics derived from historical scenarios. Fully determined by
//! (statistics, β, seed, count).

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use crate::commands::{CliError, CommonArgs, ModelArgs, Workspace};
use crate::config::{CliOverrides, ConfigEcho, ModelKind};
use crate::files::save_scenarios;
use crate::report::write_json;
use crate::synth::synth_scenarios;

#[derive(Args, Clone, Debug)]
pub struct GenDemandArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Demand-statistics CSV.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// Scenario CSV file or directory; statistics are derived from it.
    #[arg(long)]
    pub scenarios: Option<PathBuf>,
    /// Demand expansion factor β (rate = β · mean).
    #[arg(long)]
    pub beta: Option<f64>,
    /// PRNG seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of scenarios to draw.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Output file name inside the output directory.
    #[arg(long, default_value = "demand.csv")]
    pub file_name: String,
}

#[derive(Clone, Debug, Serialize)]
struct ScenarioSummary {
    id: String,
    flows: usize,
    total_demand: f64,
}

#[derive(Serialize)]
struct GenDemandReport {
    config: ConfigEcho,
    count: usize,
    output: String,
    scenarios: Vec<ScenarioSummary>,
}

pub fn run(args: &GenDemandArgs) -> Result<(), CliError> {
    let overrides =
        CliOverrides { beta: args.beta, seed: args.seed, ..CliOverrides::default() };
    let workspace = Workspace::open(&args.common, overrides)?;
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
        CliError::Usage(_) => {
            CliError::Usage("gen-demand needs --stats or --scenarios".to_string())
        }
        other => other,
    })?;
    if args.count == 0 {
        return Err(CliError::Usage("--count must be at least 1".to_string()));
    }

    let beta = workspace.resolved.beta;
    let seed = workspace.resolved.seed;
    let scenarios =
        synth_scenarios(&stats, beta, seed, args.count).map_err(|e| CliError::Build(e.to_string()))?;
    save_scenarios(&workspace.out(&args.file_name), &scenarios)?;

    let echo = workspace
        .echo("gen-demand", None, &args.common.instance)
        .with_input("stats", &source);
    let report = GenDemandReport {
        config: echo,
        count: args.count,
        output: args.file_name.clone(),
        scenarios: scenarios
            .iter()
            .map(|s| ScenarioSummary {
                id: s.id().to_string(),
                flows: s.num_flows(),
                total_demand: s.total_demand(),
            })
            .collect(),
    };
    write_json(&workspace.out("gen-demand.json"), &report)?;

    println!(
        "gen-demand: {} scenarios (beta {beta}, seed {seed}) -> {}",
        args.count,
        workspace.out(&args.file_name).display()
    );
    Ok(())
}
