//! Builders that turn an instance plus demand into a mixed-integer model.
//!
//! Three variants share one dispatch skeleton (pattern activation `y`,
//! dispatch binaries `x`, budget / exclusivity / activation-link / sparsity
//! rows):
//!
//! * **nominal** — boardings `λ` and unsatisfied demand `η` per flow, hard
//!   vehicle capacity, journey cost `wait + γ · in-vehicle` plus `M · η`;
//! * **crowding** — capacity splits at the seat count: loads above seats
//!   require a crowding flag `z ≤ x` whose seat-time is charged at `ω`;
//! * **stochastic** — one boarding/slack block per demand scenario over that
//!   scenario's own flow support, weighted by scenario probability, coupled
//!   through the shared dispatch variables.
//!
//! Capacity rows are emitted for *every* dispatch/segment/period combination
//! (not only those some passenger can use), so row counts depend only on the
//! instance shape, never on the demand realization. All time coefficients are
//! minutes.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::demand::ScenarioSet;
use crate::instance::{BudgetRule, RowSense, TransitInstance};
use crate::line::{
    earliest_departure, wait_time, FlowError, PassengerFlow, TransitLine,
};
use crate::milp::{MilpModel, ModelError, Sense, VarId};
use crate::schedule::Schedule;
use crate::time::{Minutes, TimeGrid};

/// One boarding variable: which flow it serves, on which dispatch.
#[derive(Clone, Debug)]
pub struct LambdaVar {
    pub id: VarId,
    /// Scenario index; 0 for the deterministic variants.
    pub scenario: usize,
    pub flow: PassengerFlow,
    pub pattern: usize,
    pub vehicle_type: usize,
    /// Departure period boarded.
    pub departure: usize,
    /// Waiting time until that departure, minutes.
    pub wait: f64,
    /// In-vehicle time origin → destination on that pattern, minutes.
    pub travel: f64,
}

/// Where every variable of a built model lives.
#[derive(Clone, Debug, Default)]
pub struct VarCatalog {
    /// Dispatch binaries keyed by (pattern, vehicle type, period).
    pub x: BTreeMap<(usize, usize, usize), VarId>,
    /// Pattern-activation binaries keyed by pattern.
    pub y: BTreeMap<usize, VarId>,
    /// Crowding flags keyed by (pattern, vehicle type, segment, period).
    pub z: BTreeMap<(usize, usize, usize, usize), VarId>,
    pub lambdas: Vec<LambdaVar>,
    /// Unsatisfied-demand slacks keyed by (scenario, flow).
    pub eta: BTreeMap<(usize, PassengerFlow), VarId>,
}

/// Budget shape recorded in the manifest.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BudgetMode {
    Total,
    PerType,
}

impl BudgetMode {
    pub fn as_str(self) -> &'static str {
        match self {
            BudgetMode::Total => "total",
            BudgetMode::PerType => "per_type",
        }
    }
}

/// Extra bookkeeping for the robust counterpart.
#[derive(Clone, Debug, PartialEq)]
pub struct RobustManifest {
    /// Flows in the uncertainty support (the `n` of the size formulas).
    pub support_size: usize,
    /// Uncertainty budget Γ.
    pub gamma_budget: f64,
    /// Dual/epigraph variables added on top of the nominal block.
    pub aux_vars: u64,
    /// Rows added on top of the nominal block.
    pub aux_rows: u64,
    /// The robust counterpart replaces `η` by worst-case terms folded into
    /// the epigraph; kept here so reports can say so explicitly.
    pub eta_eliminated: bool,
}

/// Size summary of a built model.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelManifest {
    pub variables: usize,
    pub constraints: usize,
    pub binaries: usize,
    pub x_vars: usize,
    pub y_vars: usize,
    pub z_vars: usize,
    pub lambda_vars: usize,
    pub eta_vars: usize,
    pub budget_mode: BudgetMode,
    pub scenarios: usize,
    /// Total (scenario, flow) pairs, i.e. demand-conservation rows.
    pub flow_count: usize,
    pub robust: Option<RobustManifest>,
}

/// A model plus the catalog and manifest needed to interpret its solution.
#[derive(Clone, Debug)]
pub struct BuiltModel {
    pub model: MilpModel,
    pub catalog: VarCatalog,
    pub manifest: ModelManifest,
}

/// Why a model could not be built.
#[derive(Clone, Debug, PartialEq)]
pub enum BuildError {
    Flow(FlowError),
    /// Demand values must be finite and nonnegative.
    BadDemand { flow: PassengerFlow, value: f64 },
    Model(ModelError),
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::Flow(e) => write!(f, "invalid flow: {e}"),
            BuildError::BadDemand { flow, value } => {
                write!(f, "demand for {flow} must be finite and >= 0, got {value}")
            }
            BuildError::Model(e) => write!(f, "internal model assembly error: {e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for BuildError {}

impl From<FlowError> for BuildError {
    fn from(e: FlowError) -> Self {
        BuildError::Flow(e)
    }
}

impl From<ModelError> for BuildError {
    fn from(e: ModelError) -> Self {
        BuildError::Model(e)
    }
}

/// Hard-capacity model: boardings obey crush capacity, unsatisfied demand is
/// penalized at `M`. Demand keys are the flow set; zero values are kept (the
/// flow then contributes fixed variables, not different model shape).
pub fn build_nominal(
    instance: &TransitInstance,
    demand: &BTreeMap<PassengerFlow, f64>,
) -> Result<BuiltModel, BuildError> {
    build(instance, &[(1.0, demand.clone())], false)
}

/// Seats-versus-crush-capacity model: loads above the seat count force the
/// crowding flag `z` on, and each crowded segment-period costs
/// `ω · segment minutes` on top of the nominal journey costs.
pub fn build_crowding(
    instance: &TransitInstance,
    demand: &BTreeMap<PassengerFlow, f64>,
) -> Result<BuiltModel, BuildError> {
    build(instance, &[(1.0, demand.clone())], true)
}

/// Expected-cost model over demand scenarios: one boarding/slack block per
/// scenario (over that scenario's flow support), shared dispatch decisions.
pub fn build_stochastic(
    instance: &TransitInstance,
    scenarios: &ScenarioSet,
) -> Result<BuiltModel, BuildError> {
    scenarios.validate(instance.line(), instance.grid())?;
    let blocks: Vec<(f64, BTreeMap<PassengerFlow, f64>)> =
        scenarios.iter().map(|(s, p)| (p, s.demand_map())).collect();
    build(instance, &blocks, false)
}

/// Geometry of one flow on one pattern: boarding access, ride time, occupied
/// segments, and the earliest departure the flow can catch.
#[derive(Clone, Debug)]
pub(crate) struct PatternOption {
    pub pattern: usize,
    pub access: Minutes,
    pub travel: Minutes,
    pub seg_start: usize,
    pub seg_end: usize,
    pub earliest: usize,
}

/// All pattern options of a flow (validated against the line and grid).
pub(crate) fn flow_options(
    line: &TransitLine,
    grid: &TimeGrid,
    flow: &PassengerFlow,
) -> Result<Vec<PatternOption>, FlowError> {
    flow.validate(line, grid)?;
    let o = line.stop_position(&flow.origin).expect("validated origin");
    let d = line.stop_position(&flow.destination).expect("validated destination");
    let mut out = Vec::new();
    for p in line.patterns_serving(o, d) {
        let pat = line.pattern(p);
        let access = pat.access_time(o).expect("pattern serves origin");
        let travel = pat.time_between(o, d).expect("pattern serves both");
        let segs = pat.segments_between(o, d).expect("pattern serves both");
        let earliest =
            earliest_departure(grid, access, flow.period).expect("flow period is on the grid");
        out.push(PatternOption {
            pattern: p,
            access,
            travel,
            seg_start: segs.start,
            seg_end: segs.end,
            earliest,
        });
    }
    Ok(out)
}

/// Dispatch skeleton shared by every variant: `y` and `x` variables plus
/// budget, one-type-per-slot, activation-link, sparsity, and user rows.
pub(crate) struct DispatchBlock {
    pub x: BTreeMap<(usize, usize, usize), VarId>,
    pub y: BTreeMap<usize, VarId>,
    pub budget_mode: BudgetMode,
}

pub(crate) fn add_dispatch_block(
    model: &mut MilpModel,
    instance: &TransitInstance,
) -> Result<DispatchBlock, ModelError> {
    let line = instance.line();
    let grid = instance.grid();
    let np = line.patterns().len();
    let nv = instance.vehicle_types().len();

    let mut y = BTreeMap::new();
    for p in 0..np {
        y.insert(p, model.add_binary(format!("y_p{p}"))?);
    }
    let mut x = BTreeMap::new();
    for p in 0..np {
        for v in 0..nv {
            for t in grid.periods() {
                x.insert((p, v, t), model.add_binary(format!("x_p{p}_v{v}_t{t}"))?);
            }
        }
    }

    let budget_mode = match instance.params().budget {
        BudgetRule::Total(limit) => {
            let terms: Vec<(VarId, f64)> = x
                .iter()
                .map(|(&(p, v, _), &id)| (id, instance.dispatch_cost(p, v)))
                .collect();
            model.add_constraint("budget", terms, Sense::Le, limit)?;
            BudgetMode::Total
        }
        BudgetRule::PerType(ref limits) => {
            for (v, &limit) in limits.iter().enumerate() {
                let terms: Vec<(VarId, f64)> = x
                    .iter()
                    .filter(|(&(_, xv, _), _)| xv == v)
                    .map(|(&(p, _, _), &id)| (id, instance.dispatch_cost(p, v)))
                    .collect();
                model.add_constraint(format!("budget_v{v}"), terms, Sense::Le, limit)?;
            }
            BudgetMode::PerType
        }
    };

    for p in 0..np {
        for t in grid.periods() {
            let terms: Vec<(VarId, f64)> = (0..nv).map(|v| (x[&(p, v, t)], 1.0)).collect();
            model.add_constraint(format!("single_type_p{p}_t{t}"), terms, Sense::Le, 1.0)?;
        }
    }
    for (&(p, v, t), &id) in &x {
        model.add_constraint(
            format!("sparsity_p{p}_v{v}_t{t}"),
            [(id, 1.0), (y[&p], -1.0)],
            Sense::Le,
            0.0,
        )?;
    }
    model.add_constraint(
        "pattern_cap",
        y.values().map(|&id| (id, 1.0)).collect::<Vec<_>>(),
        Sense::Le,
        line.max_active_patterns() as f64,
    )?;

    for row in instance.dispatch_rows() {
        let mut terms: Vec<(VarId, f64)> = Vec::new();
        for term in &row.terms {
            for (&(p, v, t), &id) in &x {
                let hit = term.pattern.map_or(true, |tp| tp == p)
                    && term.vehicle_type.map_or(true, |tv| tv == v)
                    && term.period.map_or(true, |tt| tt == t);
                if hit {
                    terms.push((id, term.coef));
                }
            }
        }
        let sense = match row.sense {
            RowSense::Le => Sense::Le,
            RowSense::Eq => Sense::Eq,
            RowSense::Ge => Sense::Ge,
        };
        model.add_constraint(format!("user_{}", row.name), terms, sense, row.rhs)?;
    }

    Ok(DispatchBlock { x, y, budget_mode })
}

/// Emits one hard-capacity row per (pattern, vehicle type, segment, period):
/// the boarding terms accumulated in `loads` at most crush capacity times the
/// dispatch flag. Rows without any possible boarding are still emitted.
pub(crate) fn add_capacity_rows(
    model: &mut MilpModel,
    instance: &TransitInstance,
    scenario_tag: Option<usize>,
    x: &BTreeMap<(usize, usize, usize), VarId>,
    loads: &BTreeMap<(usize, usize, usize, usize), Vec<(VarId, f64)>>,
) -> Result<(), ModelError> {
    let line = instance.line();
    for (p, pat) in line.patterns().iter().enumerate() {
        for (v, vt) in instance.vehicle_types().iter().enumerate() {
            for s in 0..pat.num_segments() {
                for tau in instance.grid().periods() {
                    let mut terms = loads.get(&(p, v, s, tau)).cloned().unwrap_or_default();
                    terms.push((x[&(p, v, tau)], -vt.max_capacity));
                    let name = match scenario_tag {
                        Some(e) => format!("cap_e{e}_p{p}_v{v}_s{s}_tau{tau}"),
                        None => format!("cap_p{p}_v{v}_s{s}_tau{tau}"),
                    };
                    model.add_constraint(name, terms, Sense::Le, 0.0)?;
                }
            }
        }
    }
    Ok(())
}

fn build(
    instance: &TransitInstance,
    blocks: &[(f64, BTreeMap<PassengerFlow, f64>)],
    crowding: bool,
) -> Result<BuiltModel, BuildError> {
    let line = instance.line();
    let grid = instance.grid();
    let params = instance.params();
    let nv = instance.vehicle_types().len();
    let stochastic = blocks.len() > 1;

    let mut model = MilpModel::new();
    let block = add_dispatch_block(&mut model, instance)?;

    let mut z = BTreeMap::new();
    if crowding {
        for (p, pat) in line.patterns().iter().enumerate() {
            for v in 0..nv {
                for s in 0..pat.num_segments() {
                    for tau in grid.periods() {
                        z.insert(
                            (p, v, s, tau),
                            model.add_binary(format!("z_p{p}_v{v}_s{s}_tau{tau}"))?,
                        );
                    }
                }
            }
        }
    }

    let mut lambdas: Vec<LambdaVar> = Vec::new();
    let mut eta: BTreeMap<(usize, PassengerFlow), VarId> = BTreeMap::new();
    let mut objective: Vec<(VarId, f64)> = Vec::new();
    // (scenario) → (p, v, seg, tau) → boarding terms riding that segment.
    let mut loads: Vec<BTreeMap<(usize, usize, usize, usize), Vec<(VarId, f64)>>> = Vec::new();
    // Conservation rows, assembled per flow then emitted in order.
    let mut conservation: Vec<(String, Vec<(VarId, f64)>, f64)> = Vec::new();

    for (e, (prob, demand)) in blocks.iter().enumerate() {
        let mut block_loads: BTreeMap<(usize, usize, usize, usize), Vec<(VarId, f64)>> =
            BTreeMap::new();
        for (flow, &u) in demand {
            if !u.is_finite() || u < 0.0 {
                return Err(BuildError::BadDemand { flow: flow.clone(), value: u });
            }
            let options = flow_options(line, grid, flow)?;
            let o = line.stop_position(&flow.origin).expect("validated");
            let d = line.stop_position(&flow.destination).expect("validated");
            let t = flow.period;
            let tag = if stochastic { format!("e{e}_") } else { String::new() };

            let mut row: Vec<(VarId, f64)> = Vec::new();
            for opt in &options {
                let p = opt.pattern;
                for v in 0..nv {
                    for tau in opt.earliest..=grid.num_periods() {
                        let name = format!("lam_{tag}o{o}_d{d}_t{t}_p{p}_v{v}_tau{tau}");
                        let id = model.add_continuous(name, 0.0, u)?;
                        let wait = wait_time(grid, opt.access, t, tau)
                            .expect("departures start at the earliest boardable period")
                            .as_f64();
                        let travel = opt.travel.as_f64();
                        objective.push((id, prob * (wait + params.gamma * travel)));
                        row.push((id, 1.0));
                        for s in opt.seg_start..opt.seg_end {
                            block_loads.entry((p, v, s, tau)).or_default().push((id, 1.0));
                        }
                        lambdas.push(LambdaVar {
                            id,
                            scenario: e,
                            flow: flow.clone(),
                            pattern: p,
                            vehicle_type: v,
                            departure: tau,
                            wait,
                            travel,
                        });
                    }
                }
            }
            let eta_id = model.add_continuous(format!("eta_{tag}o{o}_d{d}_t{t}"), 0.0, u)?;
            objective.push((eta_id, prob * params.big_m));
            row.push((eta_id, 1.0));
            eta.insert((e, flow.clone()), eta_id);
            conservation.push((format!("conserve_{tag}o{o}_d{d}_t{t}"), row, u));
        }
        loads.push(block_loads);
    }

    for (name, terms, rhs) in conservation {
        model.add_constraint(name, terms, Sense::Eq, rhs)?;
    }

    for (e, block_loads) in loads.iter().enumerate() {
        let tag = if stochastic { Some(e) } else { None };
        if crowding {
            // Seats bound the comfortable load; the crowding flag buys the
            // band between seats and crush capacity.
            for (p, pat) in line.patterns().iter().enumerate() {
                for (v, vt) in instance.vehicle_types().iter().enumerate() {
                    for s in 0..pat.num_segments() {
                        for tau in grid.periods() {
                            let mut terms =
                                block_loads.get(&(p, v, s, tau)).cloned().unwrap_or_default();
                            terms.push((block.x[&(p, v, tau)], -vt.seats));
                            terms.push((z[&(p, v, s, tau)], -(vt.max_capacity - vt.seats)));
                            model.add_constraint(
                                format!("cap_p{p}_v{v}_s{s}_tau{tau}"),
                                terms,
                                Sense::Le,
                                0.0,
                            )?;
                        }
                    }
                }
            }
        } else {
            add_capacity_rows(&mut model, instance, tag, &block.x, block_loads)?;
        }
    }

    if crowding {
        for (&(p, v, s, tau), &zid) in &z {
            model.add_constraint(
                format!("zlink_p{p}_v{v}_s{s}_tau{tau}"),
                [(zid, 1.0), (block.x[&(p, v, tau)], -1.0)],
                Sense::Le,
                0.0,
            )?;
            let seg_minutes = line.pattern(p).segment_time(s).as_f64();
            objective.push((zid, params.omega * seg_minutes));
        }
    }

    model.set_objective(objective)?;

    let manifest = ModelManifest {
        variables: model.num_vars(),
        constraints: model.num_constraints(),
        binaries: model.num_binaries(),
        x_vars: block.x.len(),
        y_vars: block.y.len(),
        z_vars: z.len(),
        lambda_vars: lambdas.len(),
        eta_vars: eta.len(),
        budget_mode: block.budget_mode,
        scenarios: blocks.len(),
        flow_count: eta.len(),
        robust: None,
    };
    Ok(BuiltModel {
        model,
        catalog: VarCatalog { x: block.x, y: block.y, z, lambdas, eta },
        manifest,
    })
}

/// Why a solution vector could not be read back as a schedule.
#[derive(Clone, Debug, PartialEq)]
pub enum ExtractError {
    ValueCount { expected: usize, got: usize },
    /// Binaries must land within 1e-6 of an integer.
    FractionalBinary { name: String, value: f64 },
}

impl fmt::Display for ExtractError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtractError::ValueCount { expected, got } => {
                write!(f, "solution has {got} values, model has {expected} variables")
            }
            ExtractError::FractionalBinary { name, value } => {
                write!(f, "binary {name} = {value} is not integral")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ExtractError {}

/// Reads the dispatch decisions out of a solution vector. Every binary must
/// be integral within 1e-6; `x`/`y` values of at least one half count as on.
pub fn extract_schedule(built: &BuiltModel, values: &[f64]) -> Result<Schedule, ExtractError> {
    if values.len() != built.model.num_vars() {
        return Err(ExtractError::ValueCount {
            expected: built.model.num_vars(),
            got: values.len(),
        });
    }
    for (i, var) in built.model.vars().iter().enumerate() {
        if var.kind == crate::milp::VarKind::Binary
            && crate::math::frac_distance(values[i]) > 1e-6
        {
            return Err(ExtractError::FractionalBinary {
                name: var.name.clone(),
                value: values[i],
            });
        }
    }
    let dispatches = built
        .catalog
        .x
        .iter()
        .filter(|(_, &id)| values[id.index()] >= 0.5)
        .map(|(&key, _)| key)
        .collect::<Vec<_>>();
    let active = built
        .catalog
        .y
        .iter()
        .filter(|(_, &id)| values[id.index()] >= 0.5)
        .map(|(&p, _)| p)
        .collect::<Vec<_>>();
    Ok(Schedule::new(dispatches, active))
}
