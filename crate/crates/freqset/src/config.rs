//! Run-configuration resolution and the echo block every report embeds.
//!
//! Precedence, highest first: command-line flags, config file (`--config`),
//! the instance file's own `params` block, built-in defaults. The resolved
//! values are echoed verbatim into every output file so a report alone
//! reconstructs its run.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use freqset_core::milp::SolveLimits;
use freqset_core::{BudgetRule, ModelParams};

use crate::files::{budget_rule, BudgetDoc, FileError, InstanceDoc, ParamsDoc};
use crate::workers;

pub const DEFAULT_GAMMA: f64 = 1.0;
pub const DEFAULT_BIG_M: f64 = 1e5;
pub const DEFAULT_OMEGA: f64 = 1e-5;
pub const DEFAULT_BUDGET: f64 = 20.0;
pub const DEFAULT_EPSILON: f64 = 0.05;
pub const DEFAULT_BETA: f64 = 1.0;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_GAP: f64 = 1e-6;

/// Which optimization model a command builds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ModelKind {
    /// Hard-capacity model with unsatisfied-demand penalties.
    Nominal,
    /// Nominal plus seat-comfort terms (crowding flags).
    Crowding,
    /// Expected cost over a demand-scenario set.
    Stochastic,
    /// Worst case over a budgeted demand-uncertainty set.
    Robust,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Nominal => "nominal",
            ModelKind::Crowding => "crowding",
            ModelKind::Stochastic => "stochastic",
            ModelKind::Robust => "robust",
        }
    }
}

/// Config-file document: the instance `params` fields plus run-level knobs.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigDoc {
    pub gamma: Option<f64>,
    pub big_m: Option<f64>,
    pub omega: Option<f64>,
    pub budget: Option<BudgetDoc>,
    pub gamma_u: Option<f64>,
    pub epsilon: Option<f64>,
    pub beta: Option<f64>,
    pub seed: Option<u64>,
    pub gap: Option<f64>,
    pub max_nodes: Option<u64>,
    pub max_seconds: Option<f64>,
    pub workers: Option<usize>,
}

pub fn load_config_doc(path: &Path) -> Result<ConfigDoc, FileError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| FileError::Io { path: path.display().to_string(), source: e })?;
    serde_json::from_str(&text)
        .map_err(|e| FileError::Json { path: path.display().to_string(), source: e })
}

/// Parameter overrides taken from command-line flags.
#[derive(Clone, Debug, Default)]
pub struct CliOverrides {
    pub gamma: Option<f64>,
    pub big_m: Option<f64>,
    pub omega: Option<f64>,
    /// Flags only carry a total budget; per-type budgets come from files.
    pub budget: Option<f64>,
    pub gamma_u: Option<f64>,
    pub epsilon: Option<f64>,
    pub beta: Option<f64>,
    pub seed: Option<u64>,
    pub gap: Option<f64>,
    pub max_nodes: Option<u64>,
    pub max_seconds: Option<f64>,
    pub workers: Option<usize>,
}

/// Everything a command needs after resolution.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub params: ModelParams,
    /// Uncertainty budget Γ, if any source supplied one.
    pub gamma_u: Option<f64>,
    pub epsilon: f64,
    /// Set only when a flag or config file named ε explicitly (solve applies
    /// the statistics reduction only then).
    pub epsilon_explicit: Option<f64>,
    pub beta: f64,
    pub seed: u64,
    pub limits: SolveLimits,
    pub workers: usize,
}

fn pick<T: Copy>(cli: Option<T>, file: Option<T>, instance: Option<T>, default: T) -> T {
    cli.or(file).or(instance).unwrap_or(default)
}

/// Resolves the instance-level parameters alone (no flags, no config file).
pub fn params_from_doc(
    params: Option<&ParamsDoc>,
    doc: &InstanceDoc,
    path: &Path,
) -> Result<ModelParams, FileError> {
    let budget = match params.and_then(|p| p.budget.as_ref()) {
        Some(b) => budget_rule(b, &doc.vehicle_types, path)?,
        None => BudgetRule::Total(DEFAULT_BUDGET),
    };
    Ok(ModelParams {
        gamma: params.and_then(|p| p.gamma).unwrap_or(DEFAULT_GAMMA),
        big_m: params.and_then(|p| p.big_m).unwrap_or(DEFAULT_BIG_M),
        omega: params.and_then(|p| p.omega).unwrap_or(DEFAULT_OMEGA),
        budget,
    })
}

/// Resolves the full run configuration against an instance document.
pub fn resolve(
    cli: &CliOverrides,
    file: Option<&ConfigDoc>,
    doc: &InstanceDoc,
    instance_path: &Path,
) -> Result<Resolved, FileError> {
    let inst = doc.params.as_ref();
    let file_budget = match file.and_then(|f| f.budget.as_ref()) {
        Some(b) => Some(budget_rule(b, &doc.vehicle_types, instance_path)?),
        None => None,
    };
    let inst_budget = match inst.and_then(|p| p.budget.as_ref()) {
        Some(b) => Some(budget_rule(b, &doc.vehicle_types, instance_path)?),
        None => None,
    };
    let budget = cli
        .budget
        .map(BudgetRule::Total)
        .or(file_budget)
        .or(inst_budget)
        .unwrap_or(BudgetRule::Total(DEFAULT_BUDGET));

    let params = ModelParams {
        gamma: pick(cli.gamma, file.and_then(|f| f.gamma), inst.and_then(|p| p.gamma), DEFAULT_GAMMA),
        big_m: pick(cli.big_m, file.and_then(|f| f.big_m), inst.and_then(|p| p.big_m), DEFAULT_BIG_M),
        omega: pick(cli.omega, file.and_then(|f| f.omega), inst.and_then(|p| p.omega), DEFAULT_OMEGA),
        budget,
    };
    let epsilon_explicit = cli.epsilon.or(file.and_then(|f| f.epsilon));
    Ok(Resolved {
        params,
        gamma_u: cli.gamma_u.or(file.and_then(|f| f.gamma_u)),
        epsilon: epsilon_explicit.unwrap_or(DEFAULT_EPSILON),
        epsilon_explicit,
        beta: pick(cli.beta, file.and_then(|f| f.beta), None, DEFAULT_BETA),
        seed: pick(cli.seed, file.and_then(|f| f.seed), None, DEFAULT_SEED),
        limits: SolveLimits {
            gap: pick(cli.gap, file.and_then(|f| f.gap), None, DEFAULT_GAP),
            max_nodes: cli.max_nodes.or(file.and_then(|f| f.max_nodes)),
            max_seconds: cli.max_seconds.or(file.and_then(|f| f.max_seconds)),
        },
        workers: workers::worker_count(cli.workers.or(file.and_then(|f| f.workers))),
    })
}

/// Budget in echo form: keyed by vehicle-type id when per-type.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetEcho {
    Total(f64),
    PerType(BTreeMap<String, f64>),
}

pub fn budget_echo(rule: &BudgetRule, doc: &InstanceDoc) -> BudgetEcho {
    match rule {
        BudgetRule::Total(b) => BudgetEcho::Total(*b),
        BudgetRule::PerType(per) => BudgetEcho::PerType(
            doc.vehicle_types.iter().zip(per).map(|(vt, &b)| (vt.id.clone(), b)).collect(),
        ),
    }
}

/// Fully resolved configuration, embedded in every report for provenance.
#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<&'static str>,
    pub instance: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<String>,
    pub gamma: f64,
    pub big_m: f64,
    pub omega: f64,
    pub budget: BudgetEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_u: Option<f64>,
    pub epsilon: f64,
    pub beta: f64,
    pub seed: u64,
    pub gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_nodes: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_seconds: Option<f64>,
    pub workers: usize,
}

impl ConfigEcho {
    pub fn new(
        command: &str,
        model: Option<ModelKind>,
        instance_path: &Path,
        resolved: &Resolved,
        doc: &InstanceDoc,
    ) -> Self {
        ConfigEcho {
            command: command.to_string(),
            model: model.map(ModelKind::as_str),
            instance: instance_path.display().to_string(),
            inputs: Vec::new(),
            gamma: resolved.params.gamma,
            big_m: resolved.params.big_m,
            omega: resolved.params.omega,
            budget: budget_echo(&resolved.params.budget, doc),
            gamma_u: resolved.gamma_u,
            epsilon: resolved.epsilon,
            beta: resolved.beta,
            seed: resolved.seed,
            gap: resolved.limits.gap,
            max_nodes: resolved.limits.max_nodes,
            max_seconds: resolved.limits.max_seconds,
            workers: resolved.workers,
        }
    }

    /// Records an input file under a role label, e.g. `scenario=path.csv`.
    pub fn with_input(mut self, role: &str, path: &Path) -> Self {
        self.inputs.push(format!("{role}={}", path.display()));
        self
    }
}
