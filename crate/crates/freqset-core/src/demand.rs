//! Demand data: observed scenarios (integer passenger counts per flow) and
//! per-flow summary statistics used by the robust models.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::line::{FlowError, PassengerFlow, TransitLine};
use crate::time::TimeGrid;

/// One demand realization: integer passenger counts per flow key. Flows that
/// do not appear have zero demand; explicit zeros are dropped on
/// construction, so `support()` is exactly the set of stored keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DemandScenario {
    id: String,
    counts: BTreeMap<PassengerFlow, u64>,
}

impl DemandScenario {
    pub fn new(id: impl Into<String>, counts: impl IntoIterator<Item = (PassengerFlow, u64)>) -> Self {
        DemandScenario {
            id: id.into(),
            counts: counts.into_iter().filter(|&(_, c)| c > 0).collect(),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn count(&self, flow: &PassengerFlow) -> u64 {
        self.counts.get(flow).copied().unwrap_or(0)
    }

    /// Flows with positive demand, in key order.
    pub fn support(&self) -> impl Iterator<Item = &PassengerFlow> {
        self.counts.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PassengerFlow, u64)> {
        self.counts.iter().map(|(k, &v)| (k, v))
    }

    pub fn num_flows(&self) -> usize {
        self.counts.len()
    }

    pub fn total_demand(&self) -> f64 {
        self.counts.values().map(|&c| c as f64).sum()
    }

    /// The demand map the model builders take: per-flow f64 values.
    pub fn demand_map(&self) -> BTreeMap<PassengerFlow, f64> {
        self.counts.iter().map(|(k, &v)| (k.clone(), v as f64)).collect()
    }

    /// Validates every flow key against the line and grid.
    pub fn validate(&self, line: &TransitLine, grid: &TimeGrid) -> Result<(), FlowError> {
        for flow in self.counts.keys() {
            flow.validate(line, grid)?;
        }
        Ok(())
    }
}

/// A finite set of scenarios with probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSet {
    scenarios: Vec<DemandScenario>,
    probabilities: Vec<f64>,
}

impl ScenarioSet {
    /// Equal weight 1/m on each scenario.
    pub fn uniform(scenarios: Vec<DemandScenario>) -> Result<Self, ScenarioSetError> {
        let m = scenarios.len();
        Self::with_probabilities(scenarios, alloc::vec![1.0 / m as f64; m])
    }

    /// Explicit probabilities; they must be non-negative and sum to 1 within
    /// 1e-9.
    pub fn with_probabilities(
        scenarios: Vec<DemandScenario>,
        probabilities: Vec<f64>,
    ) -> Result<Self, ScenarioSetError> {
        if scenarios.is_empty() {
            return Err(ScenarioSetError::Empty);
        }
        for (i, s) in scenarios.iter().enumerate() {
            if scenarios[..i].iter().any(|t| t.id() == s.id()) {
                return Err(ScenarioSetError::DuplicateId { id: s.id().into() });
            }
        }
        if probabilities.len() != scenarios.len() {
            return Err(ScenarioSetError::ProbabilityShape {
                scenarios: scenarios.len(),
                probabilities: probabilities.len(),
            });
        }
        if let Some(&p) = probabilities.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(ScenarioSetError::BadProbability { value: p });
        }
        let total: f64 = probabilities.iter().sum();
        if crate::math::abs(total - 1.0) > 1e-9 {
            return Err(ScenarioSetError::ProbabilitiesDoNotSumToOne { total });
        }
        Ok(ScenarioSet { scenarios, probabilities })
    }

    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }

    pub fn scenarios(&self) -> &[DemandScenario] {
        &self.scenarios
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.probabilities[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DemandScenario, f64)> {
        self.scenarios.iter().zip(self.probabilities.iter().copied())
    }

    pub fn validate(&self, line: &TransitLine, grid: &TimeGrid) -> Result<(), FlowError> {
        for s in &self.scenarios {
            s.validate(line, grid)?;
        }
        Ok(())
    }
}

/// Mean and standard deviation of one flow's demand.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowStat {
    pub mean: f64,
    pub std: f64,
}

/// Per-flow demand statistics over a scenario set. The stored support is the
/// set of flows with positive mean; standard deviations are attached to those
/// flows only.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FlowStats {
    entries: BTreeMap<PassengerFlow, FlowStat>,
}

impl FlowStats {
    /// Validates and stores the entries: means strictly positive, deviations
    /// non-negative, everything finite. Entries with zero mean are rejected
    /// rather than silently dropped so that ingestion bugs surface.
    pub fn new(
        entries: impl IntoIterator<Item = (PassengerFlow, FlowStat)>,
    ) -> Result<Self, StatsError> {
        let mut map = BTreeMap::new();
        for (flow, stat) in entries {
            if !stat.mean.is_finite() || stat.mean <= 0.0 {
                return Err(StatsError::NonPositiveMean { flow, mean: stat.mean });
            }
            if !stat.std.is_finite() || stat.std < 0.0 {
                return Err(StatsError::NegativeStd { flow, std: stat.std });
            }
            if map.insert(flow.clone(), stat).is_some() {
                return Err(StatsError::DuplicateFlow { flow });
            }
        }
        Ok(FlowStats { entries: map })
    }

    pub fn empty() -> Self {
        FlowStats::default()
    }

    pub fn get(&self, flow: &PassengerFlow) -> Option<FlowStat> {
        self.entries.get(flow).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PassengerFlow, FlowStat)> {
        self.entries.iter().map(|(k, &v)| (k, v))
    }

    pub fn flows(&self) -> impl Iterator<Item = &PassengerFlow> {
        self.entries.keys()
    }

    pub fn contains(&self, flow: &PassengerFlow) -> bool {
        self.entries.contains_key(flow)
    }

    /// Mean demand map (the nominal demand at the center of the uncertainty
    /// set).
    pub fn mean_map(&self) -> BTreeMap<PassengerFlow, f64> {
        self.entries.iter().map(|(k, v)| (k.clone(), v.mean)).collect()
    }

    pub fn total_mean(&self) -> f64 {
        self.entries.values().map(|s| s.mean).sum()
    }

    /// max over the support of mean + std; the per-flow demand ceiling used
    /// in loss bounds.
    pub fn max_mean_plus_std(&self) -> f64 {
        self.entries.values().map(|s| s.mean + s.std).fold(0.0, f64::max)
    }

    /// Keeps only the flows satisfying the predicate.
    pub fn filtered(&self, mut keep: impl FnMut(&PassengerFlow, FlowStat) -> bool) -> FlowStats {
        FlowStats {
            entries: self
                .entries
                .iter()
                .filter(|(k, &v)| keep(k, v))
                .map(|(k, &v)| (k.clone(), v))
                .collect(),
        }
    }

    pub fn validate(&self, line: &TransitLine, grid: &TimeGrid) -> Result<(), FlowError> {
        for flow in self.entries.keys() {
            flow.validate(line, grid)?;
        }
        Ok(())
    }
}

/// Scenario-set construction errors.
#[derive(Clone, Debug, PartialEq)]
pub enum ScenarioSetError {
    Empty,
    DuplicateId { id: String },
    ProbabilityShape { scenarios: usize, probabilities: usize },
    BadProbability { value: f64 },
    ProbabilitiesDoNotSumToOne { total: f64 },
}

impl fmt::Display for ScenarioSetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioSetError::Empty => write!(f, "a scenario set needs at least one scenario"),
            ScenarioSetError::DuplicateId { id } => write!(f, "duplicate scenario id {id:?}"),
            ScenarioSetError::ProbabilityShape { scenarios, probabilities } => {
                write!(f, "{probabilities} probabilities for {scenarios} scenarios")
            }
            ScenarioSetError::BadProbability { value } => {
                write!(f, "probabilities must be finite and >= 0, got {value}")
            }
            ScenarioSetError::ProbabilitiesDoNotSumToOne { total } => {
                write!(f, "probabilities sum to {total}, expected 1")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ScenarioSetError {}

/// Statistics construction errors.
#[derive(Clone, Debug, PartialEq)]
pub enum StatsError {
    NonPositiveMean { flow: PassengerFlow, mean: f64 },
    NegativeStd { flow: PassengerFlow, std: f64 },
    DuplicateFlow { flow: PassengerFlow },
}

impl fmt::Display for StatsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatsError::NonPositiveMean { flow, mean } => {
                write!(f, "flow {flow} has non-positive mean {mean}")
            }
            StatsError::NegativeStd { flow, std } => {
                write!(f, "flow {flow} has negative standard deviation {std}")
            }
            StatsError::DuplicateFlow { flow } => write!(f, "duplicate stats entry for flow {flow}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for StatsError {}
