//! Command implementations behind the `freqset` binary. Each submodule owns
//! one subcommand: its argument struct, its output files, and its report
//! shapes. Shared plumbing — config resolution, model building from files,
//! error-to-exit-code mapping — lives here.

pub mod compare;
pub mod evaluate;
pub mod export_lp;
pub mod gen_demand;
pub mod import_solution;
pub mod reduce;
pub mod solve;
pub mod sweep;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;
use thiserror::Error;

use freqset_core::demand::{DemandScenario, FlowStats, ScenarioSet};
use freqset_core::downsize::{reduce_heuristic, ReductionReport};
use freqset_core::formulate::{
    build_crowding, build_nominal, build_stochastic, BuiltModel, ModelManifest,
};
use freqset_core::robust::{build_robust_counterpart, BudgetUncertaintySet};
use freqset_core::TransitInstance;

use crate::config::{self, CliOverrides, ConfigDoc, ConfigEcho, ModelKind, Resolved};
use crate::files::{self, FileError, InstanceDoc};
use crate::report;
use crate::stats::demand_stats;

/// Why a command failed; carries the exit code and the machine-readable kind.
#[derive(Debug, Error)]
pub enum CliError {
    /// The flag combination is wrong (exit 2), e.g. a robust solve without Γ.
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    File(#[from] FileError),
    #[error("model build failed: {0}")]
    Build(String),
    #[error("solve failed: {0}")]
    Solve(String),
    #[error("evaluation failed: {0}")]
    Evaluate(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::File(e) => e.kind(),
            CliError::Build(_) => "build",
            CliError::Solve(_) => "solve",
            CliError::Evaluate(_) => "evaluate",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn usage(detail: impl Into<String>) -> CliError {
    CliError::Usage(detail.into())
}

/// Flags shared by every subcommand.
#[derive(Args, Clone, Debug)]
pub struct CommonArgs {
    /// Instance description (JSON).
    #[arg(long)]
    pub instance: PathBuf,
    /// Config file supplying parameter defaults (JSON).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory for all output files (created if missing).
    #[arg(long, default_value = "out")]
    pub output_dir: PathBuf,
    /// Waiting-versus-in-vehicle weight γ.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Unsatisfied-demand penalty M.
    #[arg(long)]
    pub big_m: Option<f64>,
    /// Crowding weight ω (crowding model only).
    #[arg(long)]
    pub omega: Option<f64>,
    /// Total dispatch budget B.
    #[arg(long)]
    pub budget: Option<f64>,
    /// Absolute optimality gap at which the search stops.
    #[arg(long)]
    pub gap: Option<f64>,
    /// Node limit for the search.
    #[arg(long)]
    pub max_nodes: Option<u64>,
    /// Wall-clock limit for the search, seconds.
    #[arg(long)]
    pub max_seconds: Option<f64>,
    /// Worker threads for evaluation fan-out (default: FREQSET_WORKERS, then
    /// the machine's parallelism).
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Inputs selecting which model to build and the demand feeding it.
#[derive(Args, Clone, Debug)]
pub struct ModelArgs {
    /// Model variant.
    #[arg(long, value_enum)]
    pub model: ModelKind,
    /// Scenario CSV holding one demand realization (nominal, crowding).
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Scenario id to use when the file holds several.
    #[arg(long)]
    pub scenario_id: Option<String>,
    /// Scenario CSV file or directory of them (stochastic; robust μ/σ source).
    #[arg(long)]
    pub scenarios: Option<PathBuf>,
    /// Demand-statistics CSV (robust).
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// Uncertainty budget Γ (robust; required there).
    #[arg(long)]
    pub gamma_u: Option<f64>,
    /// Drop flows with mean demand ≤ ε before building (robust).
    #[arg(long)]
    pub epsilon: Option<f64>,
}

impl ModelArgs {
    /// The parameter overrides these flags contribute to resolution.
    pub fn overrides(&self) -> CliOverrides {
        CliOverrides { gamma_u: self.gamma_u, epsilon: self.epsilon, ..CliOverrides::default() }
    }
}

/// An instance file loaded alongside its resolved run configuration.
pub struct Workspace {
    pub doc: InstanceDoc,
    pub instance: TransitInstance,
    pub resolved: Resolved,
    pub out_dir: PathBuf,
}

impl Workspace {
    /// Loads the instance, resolves parameters (flags > config file >
    /// instance > defaults), and creates the output directory.
    pub fn open(common: &CommonArgs, extra: CliOverrides) -> Result<Self, CliError> {
        let doc = files::load_instance_doc(&common.instance)?;
        let file_doc: Option<ConfigDoc> = match &common.config {
            Some(path) => Some(config::load_config_doc(path)?),
            None => None,
        };
        let cli = CliOverrides {
            gamma: common.gamma.or(extra.gamma),
            big_m: common.big_m.or(extra.big_m),
            omega: common.omega.or(extra.omega),
            budget: common.budget.or(extra.budget),
            gamma_u: extra.gamma_u,
            epsilon: extra.epsilon,
            beta: extra.beta,
            seed: extra.seed,
            gap: common.gap.or(extra.gap),
            max_nodes: common.max_nodes.or(extra.max_nodes),
            max_seconds: common.max_seconds.or(extra.max_seconds),
            workers: common.workers.or(extra.workers),
        };
        let resolved = config::resolve(&cli, file_doc.as_ref(), &doc, &common.instance)?;
        let instance = files::build_instance(&doc, resolved.params.clone(), &common.instance)?;
        report::ensure_dir(&common.output_dir)?;
        Ok(Workspace { doc, instance, resolved, out_dir: common.output_dir.clone() })
    }

    pub fn echo(&self, command: &str, model: Option<ModelKind>, instance_path: &Path) -> ConfigEcho {
        ConfigEcho::new(command, model, instance_path, &self.resolved, &self.doc)
    }

    pub fn out(&self, file: &str) -> PathBuf {
        self.out_dir.join(file)
    }
}

/// Loads the single scenario a deterministic model needs: the file's only
/// scenario, or the one named by `--scenario-id`.
pub fn load_single_scenario(
    path: &Path,
    scenario_id: Option<&str>,
) -> Result<DemandScenario, CliError> {
    let scenarios = files::load_scenarios(path)?;
    match scenario_id {
        Some(id) => scenarios
            .into_iter()
            .find(|s| s.id() == id)
            .ok_or_else(|| usage(format!("scenario id {id:?} not found in {}", path.display()))),
        None => match scenarios.len() {
            0 => Err(usage(format!("{} holds no scenarios", path.display()))),
            1 => Ok(scenarios.into_iter().next().unwrap()),
            n => Err(usage(format!(
                "{} holds {n} scenarios; pick one with --scenario-id",
                path.display()
            ))),
        },
    }
}

/// Loads a scenario set with uniform probabilities from a file or directory.
pub fn load_scenario_set(path: &Path) -> Result<ScenarioSet, CliError> {
    let scenarios = files::load_scenario_input(path)?;
    ScenarioSet::uniform(scenarios).map_err(|e| CliError::Build(e.to_string()))
}

/// Demand statistics for the robust model: from `--stats`, else derived from
/// `--scenarios`.
pub fn load_stats_input(args: &ModelArgs) -> Result<(FlowStats, PathBuf), CliError> {
    match (&args.stats, &args.scenarios) {
        (Some(path), _) => Ok((files::load_stats(path)?, path.clone())),
        (None, Some(path)) => {
            let set = load_scenario_set(path)?;
            let stats = demand_stats(&set).map_err(|e| CliError::Build(e.to_string()))?;
            Ok((stats, path.clone()))
        }
        (None, None) => Err(usage("the robust model needs --stats or --scenarios for μ/σ")),
    }
}

/// What fed the model build, for reports and downstream evaluation.
pub struct ModelContext {
    pub echo_inputs: Vec<(String, PathBuf)>,
    /// The statistics reduction applied before a robust build, if any.
    pub reduction: Option<ReductionReport>,
}

/// Builds the requested model from file inputs, enforcing per-kind flag
/// rules (robust requires Γ; ε and Γ are robust-only; deterministic kinds
/// take exactly one scenario).
pub fn build_model(
    workspace: &Workspace,
    args: &ModelArgs,
) -> Result<(BuiltModel, ModelContext), CliError> {
    let instance = &workspace.instance;
    let resolved = &workspace.resolved;
    // Only explicit flags are rejected on the wrong model; a shared config
    // file may carry Γ or ε for other runs without poisoning this one.
    if args.model != ModelKind::Robust {
        if args.gamma_u.is_some() {
            return Err(usage("--gamma-u applies only to the robust model"));
        }
        if args.epsilon.is_some() {
            return Err(usage(
                "--epsilon applies only to the robust model here; use the reduce command otherwise",
            ));
        }
    }
    match args.model {
        ModelKind::Nominal | ModelKind::Crowding => {
            let path = args.scenario.as_ref().ok_or_else(|| {
                usage(format!("--scenario is required for the {} model", args.model.as_str()))
            })?;
            let scenario = load_single_scenario(path, args.scenario_id.as_deref())?;
            let demand = scenario.demand_map();
            let built = if args.model == ModelKind::Nominal {
                build_nominal(instance, &demand)
            } else {
                build_crowding(instance, &demand)
            }
            .map_err(|e| CliError::Build(e.to_string()))?;
            Ok((built, ModelContext {
                echo_inputs: vec![("scenario".to_string(), path.clone())],
                reduction: None,
            }))
        }
        ModelKind::Stochastic => {
            let path = args
                .scenarios
                .as_ref()
                .ok_or_else(|| usage("--scenarios is required for the stochastic model"))?;
            let set = load_scenario_set(path)?;
            let built =
                build_stochastic(instance, &set).map_err(|e| CliError::Build(e.to_string()))?;
            Ok((built, ModelContext {
                echo_inputs: vec![("scenarios".to_string(), path.clone())],
                reduction: None,
            }))
        }
        ModelKind::Robust => {
            let gamma_u = resolved
                .gamma_u
                .ok_or_else(|| usage("the robust model requires --gamma-u"))?;
            let (mut stats, source) = load_stats_input(args)?;
            let mut reduction = None;
            if resolved.epsilon_explicit.is_some() {
                let report = reduce_heuristic(&stats, resolved.epsilon, resolved.params.big_m)
                    .map_err(|e| CliError::Build(e.to_string()))?;
                stats = report.kept.clone();
                reduction = Some(report);
            }
            let uset = BudgetUncertaintySet::from_stats(&stats, gamma_u)
                .map_err(|e| CliError::Build(e.to_string()))?;
            let built = build_robust_counterpart(instance, &uset)
                .map_err(|e| CliError::Build(e.to_string()))?;
            Ok((built, ModelContext {
                echo_inputs: vec![("stats".to_string(), source)],
                reduction,
            }))
        }
    }
}

/// Model-size block embedded in solve/export reports.
#[derive(Clone, Debug, Serialize)]
pub struct ManifestDto {
    pub variables: usize,
    pub constraints: usize,
    pub binaries: usize,
    pub x_vars: usize,
    pub y_vars: usize,
    pub z_vars: usize,
    pub lambda_vars: usize,
    pub eta_vars: usize,
    pub budget_mode: &'static str,
    pub scenarios: usize,
    pub flow_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub robust: Option<RobustManifestDto>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RobustManifestDto {
    pub support_size: usize,
    pub gamma_budget: f64,
    pub aux_vars: u64,
    pub aux_rows: u64,
    pub eta_eliminated: bool,
}

impl From<&ModelManifest> for ManifestDto {
    fn from(m: &ModelManifest) -> Self {
        ManifestDto {
            variables: m.variables,
            constraints: m.constraints,
            binaries: m.binaries,
            x_vars: m.x_vars,
            y_vars: m.y_vars,
            z_vars: m.z_vars,
            lambda_vars: m.lambda_vars,
            eta_vars: m.eta_vars,
            budget_mode: m.budget_mode.as_str(),
            scenarios: m.scenarios,
            flow_count: m.flow_count,
            robust: m.robust.as_ref().map(|r| RobustManifestDto {
                support_size: r.support_size,
                gamma_budget: r.gamma_budget,
                aux_vars: r.aux_vars,
                aux_rows: r.aux_rows,
                eta_eliminated: r.eta_eliminated,
            }),
        }
    }
}

/// Reduction block shared by the reduce command and robust solves.
#[derive(Clone, Debug, Serialize)]
pub struct ReductionDto {
    pub mode: &'static str,
    pub original_flow_count: usize,
    pub reduced_flow_count: usize,
    pub epsilon: f64,
    /// `f(ε)`: flows dropped by the threshold.
    pub f_epsilon: usize,
    /// `ℓ`: demand ceiling `max(mean + std)` over the original support.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<f64>,
    /// Certified worst-case objective loss `2·M·ℓ·f(ε)`.
    pub lambda_bound: f64,
}

impl From<&ReductionReport> for ReductionDto {
    fn from(r: &ReductionReport) -> Self {
        ReductionDto {
            mode: "epsilon-threshold",
            original_flow_count: r.kept.len() + r.dropped,
            reduced_flow_count: r.kept.len(),
            epsilon: r.epsilon,
            f_epsilon: r.dropped,
            ell: Some(r.ceiling),
            lambda_bound: r.loss_bound,
        }
    }
}

/// Per-pattern dispatch summary used in schedule blocks.
#[derive(Clone, Debug, Serialize)]
pub struct ScheduleSummary {
    pub num_dispatches: usize,
    pub total_cost: f64,
    pub active_patterns: Vec<String>,
    pub dispatches_per_pattern: BTreeMap<String, usize>,
}

pub fn schedule_summary(
    schedule: &freqset_core::Schedule,
    instance: &TransitInstance,
) -> ScheduleSummary {
    let line = instance.line();
    let mut per: BTreeMap<String, usize> = BTreeMap::new();
    for (p, _, _) in schedule.dispatches() {
        *per.entry(line.pattern(p).id().to_string()).or_insert(0) += 1;
    }
    ScheduleSummary {
        num_dispatches: schedule.num_dispatches(),
        total_cost: schedule.total_cost(instance),
        active_patterns: schedule.active_patterns().map(|p| line.pattern(p).id().to_string()).collect(),
        dispatches_per_pattern: per,
    }
}
