//! On-disk formats and their mapping onto the core types.
//!
//! - Instance: one JSON document (stops, time grid, patterns, vehicle types,
//!   optional parameters and extra dispatch rows).
//! - Scenarios: CSV with header `scenario_id,origin,destination,period,count`;
//!   one file may carry many scenarios, and a directory of such files is
//!   accepted wherever a scenario set is expected.
//! - Demand statistics: CSV with header `origin,destination,period,mean,std`.
//! - Schedules: JSON listing dispatches by pattern / vehicle-type id.
//! - Solutions: CSV with header `variable,value` (LP-file variable names).
//!
//! Loaders validate everything through the core constructors, so a loaded
//! value satisfies the same invariants as one built in code. Every
//! `load(save(x))` round-trips to an equal value.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use freqset_core::demand::{DemandScenario, FlowStat, FlowStats};
use freqset_core::instance::RowSense;
use freqset_core::line::PatternDef;
use freqset_core::{
    BudgetRule, DispatchRow, DispatchTerm, Minutes, ModelParams, PassengerFlow, Schedule,
    TimeGrid, TransitInstance, VehicleType,
};

use crate::config;

/// Why a file could not be read, parsed, or mapped onto the core types.
#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid JSON: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: invalid CSV: {detail}")]
    Csv { path: String, detail: String },
    #[error("{path}: {detail}")]
    Schema { path: String, detail: String },
}

impl FileError {
    /// Coarse machine-readable category for error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            FileError::Io { .. } => "io",
            FileError::Json { .. } | FileError::Csv { .. } => "parse",
            FileError::Schema { .. } => "schema",
        }
    }

    pub fn schema(path: &Path, detail: impl Into<String>) -> Self {
        FileError::Schema { path: path.display().to_string(), detail: detail.into() }
    }
}

fn io_err(path: &Path, source: std::io::Error) -> FileError {
    FileError::Io { path: path.display().to_string(), source }
}

fn read_text(path: &Path) -> Result<String, FileError> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn write_text_file(path: &Path, text: &str) -> Result<(), FileError> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn from_json<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T, FileError> {
    serde_json::from_str(text)
        .map_err(|e| FileError::Json { path: path.display().to_string(), source: e })
}

// ---------------------------------------------------------------------------
// Instance JSON
// ---------------------------------------------------------------------------

/// Instance document as stored on disk.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub stops: Vec<String>,
    pub time_grid: TimeGridDoc,
    pub patterns: Vec<PatternDoc>,
    pub vehicle_types: Vec<VehicleTypeDoc>,
    pub max_active_patterns: usize,
    /// Optional model parameters; anything absent falls back to the resolved
    /// run configuration (flags, config file, built-in defaults).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsDoc>,
    /// Extra linear requirements over the dispatch variables.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_rows: Vec<ExtraRowDoc>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGridDoc {
    pub start_minute: i64,
    pub end_minute: i64,
    pub delta_minutes: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternDoc {
    pub id: String,
    /// Stop names in travel order; must be a subsequence of `stops`.
    pub stop_ids: Vec<String>,
    /// Run time per consecutive stop pair, minutes.
    pub segment_minutes: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleTypeDoc {
    pub id: String,
    pub seats: f64,
    pub max_capacity: f64,
    /// Budget cost of one dispatch: a single number for all patterns, or a
    /// map pattern-id → cost.
    #[serde(default = "unit_cost")]
    pub cost_per_pattern: CostDoc,
}

fn unit_cost() -> CostDoc {
    CostDoc::Uniform(1.0)
}

/// Dispatch-cost specification; untagged so plain numbers stay plain.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CostDoc {
    Uniform(f64),
    PerPattern(BTreeMap<String, f64>),
}

/// Model parameters as stored in instance or config files. All optional;
/// resolution order is flags > config file > instance > defaults.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub big_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<BudgetDoc>,
}

/// Budget: a single shared number, or a map vehicle-type id → budget.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BudgetDoc {
    Total(f64),
    PerType(BTreeMap<String, f64>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtraRowDoc {
    pub name: String,
    pub terms: Vec<ExtraTermDoc>,
    pub sense: SenseDoc,
    pub rhs: f64,
}

/// One extra-row term: `coef` times the dispatch variables matching the
/// given pattern / vehicle type / period; absent fields are wildcards.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtraTermDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vehicle_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    #[serde(default = "one")]
    pub coef: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SenseDoc {
    Le,
    Eq,
    Ge,
}

impl From<SenseDoc> for RowSense {
    fn from(s: SenseDoc) -> Self {
        match s {
            SenseDoc::Le => RowSense::Le,
            SenseDoc::Eq => RowSense::Eq,
            SenseDoc::Ge => RowSense::Ge,
        }
    }
}

impl From<RowSense> for SenseDoc {
    fn from(s: RowSense) -> Self {
        match s {
            RowSense::Le => SenseDoc::Le,
            RowSense::Eq => SenseDoc::Eq,
            RowSense::Ge => SenseDoc::Ge,
        }
    }
}

pub fn load_instance_doc(path: &Path) -> Result<InstanceDoc, FileError> {
    let text = read_text(path)?;
    from_json(path, &text)
}

/// Maps a budget document onto the core rule, resolving per-type maps against
/// the instance's vehicle-type list.
pub fn budget_rule(
    doc: &BudgetDoc,
    vehicle_types: &[VehicleTypeDoc],
    path: &Path,
) -> Result<BudgetRule, FileError> {
    match doc {
        BudgetDoc::Total(b) => Ok(BudgetRule::Total(*b)),
        BudgetDoc::PerType(map) => {
            let mut per = Vec::with_capacity(vehicle_types.len());
            for vt in vehicle_types {
                let b = map.get(&vt.id).ok_or_else(|| {
                    FileError::schema(path, format!("per-type budget misses vehicle type {:?}", vt.id))
                })?;
                per.push(*b);
            }
            for id in map.keys() {
                if !vehicle_types.iter().any(|vt| &vt.id == id) {
                    return Err(FileError::schema(
                        path,
                        format!("per-type budget names unknown vehicle type {id:?}"),
                    ));
                }
            }
            Ok(BudgetRule::PerType(per))
        }
    }
}

/// Builds the validated core instance from a document and fully resolved
/// parameters. `path` is used only for error messages.
pub fn build_instance(
    doc: &InstanceDoc,
    params: ModelParams,
    path: &Path,
) -> Result<TransitInstance, FileError> {
    let grid = TimeGrid::from_span(
        doc.time_grid.start_minute,
        doc.time_grid.end_minute,
        doc.time_grid.delta_minutes,
    )
    .map_err(|e| FileError::schema(path, format!("time_grid: {e}")))?;

    let mut defs = Vec::with_capacity(doc.patterns.len());
    for p in &doc.patterns {
        let mut segs = Vec::with_capacity(p.segment_minutes.len());
        for &m in &p.segment_minutes {
            let minutes = Minutes::try_from_f64(m).map_err(|e| {
                FileError::schema(path, format!("pattern {:?}: segment time {m}: {e}", p.id))
            })?;
            segs.push(minutes);
        }
        defs.push(PatternDef {
            id: p.id.clone(),
            stop_names: p.stop_ids.clone(),
            segment_times: segs,
        });
    }
    let line = freqset_core::line::TransitLine::new(
        doc.stops.clone(),
        defs,
        doc.max_active_patterns,
    )
    .map_err(|e| FileError::schema(path, e.to_string()))?;

    let vehicle_types: Vec<VehicleType> = doc
        .vehicle_types
        .iter()
        .map(|vt| VehicleType { id: vt.id.clone(), seats: vt.seats, max_capacity: vt.max_capacity })
        .collect();

    let mut cost = vec![vec![0.0; vehicle_types.len()]; doc.patterns.len()];
    for (v, vt) in doc.vehicle_types.iter().enumerate() {
        for (p, pat) in doc.patterns.iter().enumerate() {
            cost[p][v] = match &vt.cost_per_pattern {
                CostDoc::Uniform(c) => *c,
                CostDoc::PerPattern(map) => *map.get(&pat.id).ok_or_else(|| {
                    FileError::schema(
                        path,
                        format!("vehicle type {:?}: no dispatch cost for pattern {:?}", vt.id, pat.id),
                    )
                })?,
            };
        }
    }

    let mut rows = Vec::with_capacity(doc.extra_rows.len());
    for row in &doc.extra_rows {
        let mut terms = Vec::with_capacity(row.terms.len());
        for term in &row.terms {
            let pattern = match &term.pattern {
                None => None,
                Some(id) => Some(line.pattern_index(id).ok_or_else(|| {
                    FileError::schema(path, format!("row {:?}: unknown pattern {id:?}", row.name))
                })?),
            };
            let vehicle_type = match &term.vehicle_type {
                None => None,
                Some(id) => {
                    Some(vehicle_types.iter().position(|vt| &vt.id == id).ok_or_else(|| {
                        FileError::schema(
                            path,
                            format!("row {:?}: unknown vehicle type {id:?}", row.name),
                        )
                    })?)
                }
            };
            terms.push(DispatchTerm { pattern, vehicle_type, period: term.period, coef: term.coef });
        }
        rows.push(DispatchRow {
            name: row.name.clone(),
            terms,
            sense: row.sense.into(),
            rhs: row.rhs,
        });
    }

    TransitInstance::new(line, grid, vehicle_types, cost, rows, params)
        .map_err(|e| FileError::schema(path, e.to_string()))
}

/// Loads an instance using only its own parameters over the built-in
/// defaults. The CLI resolves flags and config files on top; this is the
/// plain-library entry point.
pub fn load_instance(path: &Path) -> Result<TransitInstance, FileError> {
    let doc = load_instance_doc(path)?;
    let params = config::params_from_doc(doc.params.as_ref(), &doc, path)?;
    build_instance(&doc, params, path)
}

/// Reconstructs the document form of an instance (parameters included).
pub fn instance_to_doc(instance: &TransitInstance) -> InstanceDoc {
    let grid = instance.grid();
    let line = instance.line();
    let patterns: Vec<PatternDoc> = line
        .patterns()
        .iter()
        .map(|p| PatternDoc {
            id: p.id().to_string(),
            stop_ids: p.stop_positions().iter().map(|&s| line.stop_name(s).to_string()).collect(),
            segment_minutes: (0..p.num_segments()).map(|s| p.segment_time(s).as_f64()).collect(),
        })
        .collect();
    let vehicle_types: Vec<VehicleTypeDoc> = instance
        .vehicle_types()
        .iter()
        .enumerate()
        .map(|(v, vt)| {
            let per: BTreeMap<String, f64> = line
                .patterns()
                .iter()
                .enumerate()
                .map(|(p, pat)| (pat.id().to_string(), instance.dispatch_cost(p, v)))
                .collect();
            let mut values = per.values();
            let uniform = match values.next() {
                Some(first) => values.all(|c| c == first).then_some(*per.values().next().unwrap()),
                None => Some(1.0),
            };
            VehicleTypeDoc {
                id: vt.id.clone(),
                seats: vt.seats,
                max_capacity: vt.max_capacity,
                cost_per_pattern: match uniform {
                    Some(c) => CostDoc::Uniform(c),
                    None => CostDoc::PerPattern(per),
                },
            }
        })
        .collect();
    let params = instance.params();
    let budget = match &params.budget {
        BudgetRule::Total(b) => BudgetDoc::Total(*b),
        BudgetRule::PerType(per) => BudgetDoc::PerType(
            instance
                .vehicle_types()
                .iter()
                .zip(per)
                .map(|(vt, &b)| (vt.id.clone(), b))
                .collect(),
        ),
    };
    let extra_rows: Vec<ExtraRowDoc> = instance
        .dispatch_rows()
        .iter()
        .map(|row| ExtraRowDoc {
            name: row.name.clone(),
            terms: row
                .terms
                .iter()
                .map(|t| ExtraTermDoc {
                    pattern: t.pattern.map(|p| line.pattern(p).id().to_string()),
                    vehicle_type: t.vehicle_type.map(|v| instance.vehicle_types()[v].id.clone()),
                    period: t.period,
                    coef: t.coef,
                })
                .collect(),
            sense: row.sense.into(),
            rhs: row.rhs,
        })
        .collect();
    InstanceDoc {
        stops: line.stops().to_vec(),
        time_grid: TimeGridDoc {
            start_minute: grid.start_minute(),
            end_minute: grid.start_minute() + grid.delta_minutes() * grid.num_periods() as i64,
            delta_minutes: grid.delta_minutes(),
        },
        patterns,
        vehicle_types,
        max_active_patterns: line.max_active_patterns(),
        params: Some(ParamsDoc {
            gamma: Some(params.gamma),
            big_m: Some(params.big_m),
            omega: Some(params.omega),
            budget: Some(budget),
        }),
        extra_rows,
    }
}

pub fn save_instance(path: &Path, instance: &TransitInstance) -> Result<(), FileError> {
    let doc = instance_to_doc(instance);
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| FileError::Json { path: path.display().to_string(), source: e })?;
    text.push('\n');
    write_text_file(path, &text)
}

// ---------------------------------------------------------------------------
// Scenario CSV
// ---------------------------------------------------------------------------

pub const SCENARIO_HEADER: [&str; 5] = ["scenario_id", "origin", "destination", "period", "count"];

/// One raw scenario-file row. Periods are 1-based, matching the model's
/// time grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScenarioRow {
    pub scenario_id: String,
    pub origin: String,
    pub destination: String,
    pub period: usize,
    pub count: u64,
}

pub fn load_scenario_rows(path: &Path) -> Result<Vec<ScenarioRow>, FileError> {
    let text = read_text(path)?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| FileError::Csv { path: path.display().to_string(), detail: e.to_string() })?;
    if headers.iter().collect::<Vec<_>>() != SCENARIO_HEADER {
        return Err(FileError::Csv {
            path: path.display().to_string(),
            detail: format!("expected header {}", SCENARIO_HEADER.join(",")),
        });
    }
    let mut rows = Vec::new();
    for record in reader.deserialize::<ScenarioRow>() {
        rows.push(record.map_err(|e| FileError::Csv {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?);
    }
    Ok(rows)
}

/// Loads every scenario in a file, sorted by scenario id. A flow repeated
/// within one scenario is rejected as an ingestion bug.
pub fn load_scenarios(path: &Path) -> Result<Vec<DemandScenario>, FileError> {
    let rows = load_scenario_rows(path)?;
    scenarios_from_rows(rows, path)
}

fn scenarios_from_rows(rows: Vec<ScenarioRow>, path: &Path) -> Result<Vec<DemandScenario>, FileError> {
    let mut by_id: BTreeMap<String, BTreeMap<PassengerFlow, u64>> = BTreeMap::new();
    for row in rows {
        let flow = PassengerFlow::new(row.origin, row.destination, row.period);
        let counts = by_id.entry(row.scenario_id.clone()).or_default();
        if counts.insert(flow.clone(), row.count).is_some() {
            return Err(FileError::schema(
                path,
                format!("scenario {:?} lists flow {flow} twice", row.scenario_id),
            ));
        }
    }
    Ok(by_id.into_iter().map(|(id, counts)| DemandScenario::new(id, counts)).collect())
}

/// Accepts either a scenario CSV or a directory of them (`*.csv`, read in
/// file-name order). Scenario ids must be unique across the whole input.
pub fn load_scenario_input(path: &Path) -> Result<Vec<DemandScenario>, FileError> {
    let meta = fs::metadata(path).map_err(|e| io_err(path, e))?;
    if !meta.is_dir() {
        return load_scenarios(path);
    }
    let mut files: Vec<_> = fs::read_dir(path)
        .map_err(|e| io_err(path, e))?
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| io_err(path, e))?
        .into_iter()
        .map(|entry| entry.path())
        .filter(|p| p.extension().is_some_and(|ext| ext == "csv"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(FileError::schema(path, "directory holds no .csv scenario files"));
    }
    let mut all: BTreeMap<String, DemandScenario> = BTreeMap::new();
    for file in &files {
        for scenario in load_scenarios(file)? {
            let id = scenario.id().to_string();
            if all.insert(id.clone(), scenario).is_some() {
                return Err(FileError::schema(
                    path,
                    format!("scenario id {id:?} appears in more than one file"),
                ));
            }
        }
    }
    Ok(all.into_values().collect())
}

/// Writes scenarios in the given order, flows in key order within each.
pub fn save_scenarios(path: &Path, scenarios: &[DemandScenario]) -> Result<(), FileError> {
    // The header is written explicitly so empty files still carry it.
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    writer
        .write_record(SCENARIO_HEADER)
        .map_err(|e| FileError::Csv { path: path.display().to_string(), detail: e.to_string() })?;
    for scenario in scenarios {
        for (flow, count) in scenario.iter() {
            writer
                .serialize(ScenarioRow {
                    scenario_id: scenario.id().to_string(),
                    origin: flow.origin.clone(),
                    destination: flow.destination.clone(),
                    period: flow.period,
                    count,
                })
                .map_err(|e| FileError::Csv {
                    path: path.display().to_string(),
                    detail: e.to_string(),
                })?;
        }
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| FileError::Csv { path: path.display().to_string(), detail: e.to_string() })?;
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

// ---------------------------------------------------------------------------
// Demand-statistics CSV
// ---------------------------------------------------------------------------

pub const STATS_HEADER: [&str; 5] = ["origin", "destination", "period", "mean", "std"];

#[derive(Clone, Debug, Serialize, Deserialize)]
struct StatsRow {
    origin: String,
    destination: String,
    period: usize,
    mean: f64,
    std: f64,
}

pub fn load_stats(path: &Path) -> Result<FlowStats, FileError> {
    let text = read_text(path)?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| FileError::Csv { path: path.display().to_string(), detail: e.to_string() })?;
    if headers.iter().collect::<Vec<_>>() != STATS_HEADER {
        return Err(FileError::Csv {
            path: path.display().to_string(),
            detail: format!("expected header {}", STATS_HEADER.join(",")),
        });
    }
    let mut entries = Vec::new();
    for record in reader.deserialize::<StatsRow>() {
        let row = record.map_err(|e| FileError::Csv {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        entries.push((
            PassengerFlow::new(row.origin, row.destination, row.period),
            FlowStat { mean: row.mean, std: row.std },
        ));
    }
    FlowStats::new(entries).map_err(|e| FileError::schema(path, e.to_string()))
}

pub fn save_stats(path: &Path, stats: &FlowStats) -> Result<(), FileError> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    writer
        .write_record(STATS_HEADER)
        .map_err(|e| FileError::Csv { path: path.display().to_string(), detail: e.to_string() })?;
    for (flow, stat) in stats.iter() {
        writer
            .serialize(StatsRow {
                origin: flow.origin.clone(),
                destination: flow.destination.clone(),
                period: flow.period,
                mean: stat.mean,
                std: stat.std,
            })
            .map_err(|e| FileError::Csv { path: path.display().to_string(), detail: e.to_string() })?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| FileError::Csv { path: path.display().to_string(), detail: e.to_string() })?;
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

// ---------------------------------------------------------------------------
// Schedule JSON
// ---------------------------------------------------------------------------

/// Schedule document: dispatches by id, periods 1-based on the instance's
/// grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleDoc {
    pub dispatches: Vec<DispatchDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispatchDoc {
    pub pattern: String,
    pub vehicle_type: String,
    pub period: usize,
}

pub fn schedule_to_doc(schedule: &Schedule, instance: &TransitInstance) -> ScheduleDoc {
    let line = instance.line();
    ScheduleDoc {
        dispatches: schedule
            .dispatches()
            .map(|(p, v, t)| DispatchDoc {
                pattern: line.pattern(p).id().to_string(),
                vehicle_type: instance.vehicle_types()[v].id.clone(),
                period: t,
            })
            .collect(),
    }
}

pub fn schedule_from_doc(
    doc: &ScheduleDoc,
    instance: &TransitInstance,
    path: &Path,
) -> Result<Schedule, FileError> {
    let line = instance.line();
    let mut dispatches = Vec::with_capacity(doc.dispatches.len());
    for d in &doc.dispatches {
        let p = line
            .pattern_index(&d.pattern)
            .ok_or_else(|| FileError::schema(path, format!("unknown pattern {:?}", d.pattern)))?;
        let v = instance.vehicle_type_index(&d.vehicle_type).ok_or_else(|| {
            FileError::schema(path, format!("unknown vehicle type {:?}", d.vehicle_type))
        })?;
        if !instance.grid().contains_period(d.period) {
            return Err(FileError::schema(
                path,
                format!(
                    "dispatch period {} outside the grid (1..={})",
                    d.period,
                    instance.grid().num_periods()
                ),
            ));
        }
        dispatches.push((p, v, d.period));
    }
    Ok(Schedule::from_dispatches(dispatches))
}

pub fn load_schedule(path: &Path, instance: &TransitInstance) -> Result<Schedule, FileError> {
    let text = read_text(path)?;
    let doc: ScheduleDoc = from_json(path, &text)?;
    schedule_from_doc(&doc, instance, path)
}

pub fn save_schedule(
    path: &Path,
    schedule: &Schedule,
    instance: &TransitInstance,
) -> Result<(), FileError> {
    let doc = schedule_to_doc(schedule, instance);
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| FileError::Json { path: path.display().to_string(), source: e })?;
    text.push('\n');
    write_text_file(path, &text)
}

// ---------------------------------------------------------------------------
// Solution CSV
// ---------------------------------------------------------------------------

pub const SOLUTION_HEADER: [&str; 2] = ["variable", "value"];

/// Loads `variable,value` pairs in file order; duplicate names are rejected.
pub fn load_solution(path: &Path) -> Result<Vec<(String, f64)>, FileError> {
    let text = read_text(path)?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| FileError::Csv { path: path.display().to_string(), detail: e.to_string() })?;
    if headers.iter().collect::<Vec<_>>() != SOLUTION_HEADER {
        return Err(FileError::Csv {
            path: path.display().to_string(),
            detail: format!("expected header {}", SOLUTION_HEADER.join(",")),
        });
    }
    let mut seen = BTreeMap::new();
    let mut pairs = Vec::new();
    for record in reader.deserialize::<(String, f64)>() {
        let (name, value) = record.map_err(|e| FileError::Csv {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        if seen.insert(name.clone(), ()).is_some() {
            return Err(FileError::schema(path, format!("variable {name:?} listed twice")));
        }
        pairs.push((name, value));
    }
    Ok(pairs)
}

/// Writes one row per model variable, in model order.
pub fn save_solution(
    path: &Path,
    model: &freqset_core::milp::MilpModel,
    values: &[f64],
) -> Result<(), FileError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(SOLUTION_HEADER)
        .map_err(|e| FileError::Csv { path: path.display().to_string(), detail: e.to_string() })?;
    for (var, &value) in model.vars().iter().zip(values) {
        writer
            .serialize((&var.name, value))
            .map_err(|e| FileError::Csv { path: path.display().to_string(), detail: e.to_string() })?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| FileError::Csv { path: path.display().to_string(), detail: e.to_string() })?;
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}
