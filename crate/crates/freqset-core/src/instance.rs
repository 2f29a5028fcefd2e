//! The optimization instance: a line plus vehicle types, dispatch costs, the
//! planning grid, and the model parameters shared by every formulation.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::line::TransitLine;
use crate::time::TimeGrid;

/// A vehicle type: seated (comfortable) capacity and crush capacity.
#[derive(Clone, Debug, PartialEq)]
pub struct VehicleType {
    pub id: String,
    /// Seats; loads above this count as crowded.
    pub seats: f64,
    /// Hard capacity; boardings can never push a segment load above this.
    pub max_capacity: f64,
}

/// How the fleet budget constrains dispatches.
#[derive(Clone, Debug, PartialEq)]
pub enum BudgetRule {
    /// One shared budget: total dispatch cost at most this.
    Total(f64),
    /// A separate budget per vehicle type, aligned with the instance's
    /// vehicle-type list.
    PerType(Vec<f64>),
}

/// Relation of a user-supplied dispatch row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

/// One term of a [`DispatchRow`]: `coef` times the sum of dispatch variables
/// matching the given pattern / vehicle type / period, where `None` is a
/// wildcard.
#[derive(Clone, Debug, PartialEq)]
pub struct DispatchTerm {
    pub pattern: Option<usize>,
    pub vehicle_type: Option<usize>,
    pub period: Option<usize>,
    pub coef: f64,
}

/// An extra linear requirement over the dispatch variables, e.g. "at least
/// one departure in every period" or "no more than 3 short-turn trips".
#[derive(Clone, Debug, PartialEq)]
pub struct DispatchRow {
    pub name: String,
    pub terms: Vec<DispatchTerm>,
    pub sense: RowSense,
    pub rhs: f64,
}

/// Parameters shared by all model variants.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    /// Weight of in-vehicle time against waiting time in the journey cost.
    pub gamma: f64,
    /// Penalty per unit of unsatisfied demand; must dominate any realizable
    /// journey cost.
    pub big_m: f64,
    /// Weight of crowded seat-time (only the crowding variant reads this).
    pub omega: f64,
    /// Fleet budget.
    pub budget: BudgetRule,
}

impl ModelParams {
    /// Nominal parameters with a total budget and the crowding weight off.
    pub fn new(gamma: f64, big_m: f64, budget: f64) -> Self {
        ModelParams { gamma, big_m, omega: 0.0, budget: BudgetRule::Total(budget) }
    }
}

/// Everything the model builders need about one planning problem.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitInstance {
    line: TransitLine,
    grid: TimeGrid,
    vehicle_types: Vec<VehicleType>,
    /// `dispatch_cost[p][v]`: budget cost of one period-dispatch of vehicle
    /// type `v` on pattern `p`.
    dispatch_cost: Vec<Vec<f64>>,
    dispatch_rows: Vec<DispatchRow>,
    params: ModelParams,
}

impl TransitInstance {
    /// Validates and assembles an instance. `dispatch_cost` is indexed
    /// `[pattern][vehicle_type]` and must match the line's pattern count and
    /// the vehicle-type count.
    pub fn new(
        line: TransitLine,
        grid: TimeGrid,
        vehicle_types: Vec<VehicleType>,
        dispatch_cost: Vec<Vec<f64>>,
        dispatch_rows: Vec<DispatchRow>,
        params: ModelParams,
    ) -> Result<Self, InstanceError> {
        if vehicle_types.is_empty() {
            return Err(InstanceError::NoVehicleTypes);
        }
        for (i, v) in vehicle_types.iter().enumerate() {
            if v.id.is_empty() {
                return Err(InstanceError::EmptyVehicleTypeId { index: i });
            }
            if vehicle_types[..i].iter().any(|w| w.id == v.id) {
                return Err(InstanceError::DuplicateVehicleTypeId { id: v.id.clone() });
            }
            if !(v.seats > 0.0) || !v.seats.is_finite() {
                return Err(InstanceError::BadCapacity { id: v.id.clone() });
            }
            if !(v.max_capacity >= v.seats) || !v.max_capacity.is_finite() {
                return Err(InstanceError::BadCapacity { id: v.id.clone() });
            }
        }
        if dispatch_cost.len() != line.patterns().len()
            || dispatch_cost.iter().any(|row| row.len() != vehicle_types.len())
        {
            return Err(InstanceError::CostShapeMismatch {
                patterns: line.patterns().len(),
                vehicle_types: vehicle_types.len(),
            });
        }
        for (p, row) in dispatch_cost.iter().enumerate() {
            for (v, &c) in row.iter().enumerate() {
                if !c.is_finite() || c < 0.0 {
                    return Err(InstanceError::BadDispatchCost {
                        pattern: line.pattern(p).id().into(),
                        vehicle_type: vehicle_types[v].id.clone(),
                        cost: c,
                    });
                }
            }
        }
        for (i, row) in dispatch_rows.iter().enumerate() {
            if row.name.is_empty() {
                return Err(InstanceError::EmptyRowName { index: i });
            }
            if dispatch_rows[..i].iter().any(|r| r.name == row.name) {
                return Err(InstanceError::DuplicateRowName { name: row.name.clone() });
            }
            if !row.rhs.is_finite() {
                return Err(InstanceError::BadRowNumber { name: row.name.clone() });
            }
            for term in &row.terms {
                if !term.coef.is_finite() {
                    return Err(InstanceError::BadRowNumber { name: row.name.clone() });
                }
                if term.pattern.is_some_and(|p| p >= line.patterns().len())
                    || term.vehicle_type.is_some_and(|v| v >= vehicle_types.len())
                    || term.period.is_some_and(|t| !grid.contains_period(t))
                {
                    return Err(InstanceError::RowIndexOutOfRange { name: row.name.clone() });
                }
            }
        }
        validate_params(&params, &line, &grid, &vehicle_types)?;
        Ok(TransitInstance { line, grid, vehicle_types, dispatch_cost, dispatch_rows, params })
    }

    /// Convenience constructor: every dispatch costs 1 budget unit, no extra
    /// dispatch rows.
    pub fn with_unit_costs(
        line: TransitLine,
        grid: TimeGrid,
        vehicle_types: Vec<VehicleType>,
        params: ModelParams,
    ) -> Result<Self, InstanceError> {
        let costs = vec![vec![1.0; vehicle_types.len()]; line.patterns().len()];
        TransitInstance::new(line, grid, vehicle_types, costs, Vec::new(), params)
    }

    pub fn line(&self) -> &TransitLine {
        &self.line
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn vehicle_types(&self) -> &[VehicleType] {
        &self.vehicle_types
    }

    pub fn vehicle_type_index(&self, id: &str) -> Option<usize> {
        self.vehicle_types.iter().position(|v| v.id == id)
    }

    pub fn dispatch_cost(&self, pattern: usize, vehicle_type: usize) -> f64 {
        self.dispatch_cost[pattern][vehicle_type]
    }

    pub fn dispatch_rows(&self) -> &[DispatchRow] {
        &self.dispatch_rows
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Same instance with different parameters (revalidated).
    pub fn with_params(&self, params: ModelParams) -> Result<Self, InstanceError> {
        validate_params(&params, &self.line, &self.grid, &self.vehicle_types)?;
        let mut out = self.clone();
        out.params = params;
        Ok(out)
    }
}

fn validate_params(
    params: &ModelParams,
    line: &TransitLine,
    grid: &TimeGrid,
    vehicle_types: &[VehicleType],
) -> Result<(), InstanceError> {
    if !params.gamma.is_finite() || params.gamma < 0.0 {
        return Err(InstanceError::BadParam { name: "gamma", value: params.gamma });
    }
    if !params.omega.is_finite() || params.omega < 0.0 {
        return Err(InstanceError::BadParam { name: "omega", value: params.omega });
    }
    if !params.big_m.is_finite() || params.big_m <= 0.0 {
        return Err(InstanceError::BadParam { name: "big_m", value: params.big_m });
    }
    match &params.budget {
        BudgetRule::Total(b) => {
            if !b.is_finite() || *b < 0.0 {
                return Err(InstanceError::BadParam { name: "budget", value: *b });
            }
        }
        BudgetRule::PerType(per) => {
            if per.len() != vehicle_types.len() {
                return Err(InstanceError::PerTypeBudgetShape {
                    got: per.len(),
                    vehicle_types: vehicle_types.len(),
                });
            }
            if let Some(&b) = per.iter().find(|b| !b.is_finite() || **b < 0.0) {
                return Err(InstanceError::BadParam { name: "budget", value: b });
            }
        }
    }
    // The unsatisfied-demand penalty must exceed any realizable per-passenger
    // journey cost: waits are below the horizon T·Δ and in-vehicle time below
    // the longest pattern, weighted by γ when γ > 1.
    let horizon = (grid.num_periods() as i64 * grid.delta_minutes()) as f64;
    let journey_cap = horizon + params.gamma.max(1.0) * line.max_pattern_time().as_f64();
    if params.big_m <= journey_cap {
        return Err(InstanceError::PenaltyTooSmall { big_m: params.big_m, needed: journey_cap });
    }
    Ok(())
}

/// Instance assembly errors.
#[derive(Clone, Debug, PartialEq)]
pub enum InstanceError {
    NoVehicleTypes,
    EmptyVehicleTypeId { index: usize },
    DuplicateVehicleTypeId { id: String },
    BadCapacity { id: String },
    CostShapeMismatch { patterns: usize, vehicle_types: usize },
    BadDispatchCost { pattern: String, vehicle_type: String, cost: f64 },
    EmptyRowName { index: usize },
    DuplicateRowName { name: String },
    BadRowNumber { name: String },
    RowIndexOutOfRange { name: String },
    BadParam { name: &'static str, value: f64 },
    PerTypeBudgetShape { got: usize, vehicle_types: usize },
    PenaltyTooSmall { big_m: f64, needed: f64 },
}

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceError::NoVehicleTypes => write!(f, "at least one vehicle type is required"),
            InstanceError::EmptyVehicleTypeId { index } => {
                write!(f, "vehicle type at index {index} has an empty id")
            }
            InstanceError::DuplicateVehicleTypeId { id } => {
                write!(f, "duplicate vehicle type id {id:?}")
            }
            InstanceError::BadCapacity { id } => write!(
                f,
                "vehicle type {id:?} needs 0 < seats <= max_capacity with finite values"
            ),
            InstanceError::CostShapeMismatch { patterns, vehicle_types } => write!(
                f,
                "dispatch cost matrix must be {patterns} patterns x {vehicle_types} vehicle types"
            ),
            InstanceError::BadDispatchCost { pattern, vehicle_type, cost } => write!(
                f,
                "dispatch cost for pattern {pattern:?} / vehicle type {vehicle_type:?} must be finite and >= 0, got {cost}"
            ),
            InstanceError::EmptyRowName { index } => {
                write!(f, "dispatch row at index {index} has an empty name")
            }
            InstanceError::DuplicateRowName { name } => {
                write!(f, "duplicate dispatch row name {name:?}")
            }
            InstanceError::BadRowNumber { name } => {
                write!(f, "dispatch row {name:?} has a non-finite coefficient or rhs")
            }
            InstanceError::RowIndexOutOfRange { name } => {
                write!(f, "dispatch row {name:?} references an unknown pattern, vehicle type, or period")
            }
            InstanceError::BadParam { name, value } => {
                write!(f, "parameter {name} out of range: {value}")
            }
            InstanceError::PerTypeBudgetShape { got, vehicle_types } => write!(
                f,
                "per-type budget has {got} entries but the instance has {vehicle_types} vehicle types"
            ),
            InstanceError::PenaltyTooSmall { big_m, needed } => write!(
                f,
                "big_m = {big_m} does not dominate the journey cost; needs to exceed {needed}"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for InstanceError {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::line::PatternDef;
    use crate::time::Minutes;

    fn small_line() -> TransitLine {
        TransitLine::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![PatternDef {
                id: "p".into(),
                stop_names: vec!["a".into(), "b".into(), "c".into()],
                segment_times: vec![Minutes::from_minutes(3), Minutes::from_minutes(4)],
            }],
            1,
        )
        .unwrap()
    }

    fn bus() -> VehicleType {
        VehicleType { id: "bus".into(), seats: 37.0, max_capacity: 70.0 }
    }

    #[test]
    fn unit_cost_instance_builds() {
        let inst = TransitInstance::with_unit_costs(
            small_line(),
            TimeGrid::new(0, 5, 4).unwrap(),
            vec![bus()],
            ModelParams::new(1.0, 1e5, 10.0),
        )
        .unwrap();
        assert_eq!(inst.dispatch_cost(0, 0), 1.0);
        assert_eq!(inst.vehicle_type_index("bus"), Some(0));
    }

    #[test]
    fn penalty_dominance_is_gamma_aware() {
        // Horizon 20 min, longest pattern 7 min. With γ=1 the journey cost is
        // below 27, with γ=10 it is below 90; the check scales with γ.
        let grid = TimeGrid::new(0, 5, 4).unwrap();
        let ok = TransitInstance::with_unit_costs(
            small_line(),
            grid.clone(),
            vec![bus()],
            ModelParams::new(1.0, 28.0, 10.0),
        );
        assert!(ok.is_ok());
        let too_small = TransitInstance::with_unit_costs(
            small_line(),
            grid.clone(),
            vec![bus()],
            ModelParams::new(1.0, 27.0, 10.0),
        );
        assert!(matches!(too_small, Err(InstanceError::PenaltyTooSmall { .. })));
        let gamma_heavy = TransitInstance::with_unit_costs(
            small_line(),
            grid,
            vec![bus()],
            ModelParams { gamma: 10.0, big_m: 28.0, omega: 0.0, budget: BudgetRule::Total(10.0) },
        );
        assert!(matches!(gamma_heavy, Err(InstanceError::PenaltyTooSmall { .. })));
    }

    #[test]
    fn capacity_and_cost_validation() {
        let grid = TimeGrid::new(0, 5, 4).unwrap();
        let swapped = TransitInstance::with_unit_costs(
            small_line(),
            grid.clone(),
            vec![VehicleType { id: "v".into(), seats: 70.0, max_capacity: 37.0 }],
            ModelParams::new(1.0, 1e5, 10.0),
        );
        assert!(matches!(swapped, Err(InstanceError::BadCapacity { .. })));

        let negative_cost = TransitInstance::new(
            small_line(),
            grid.clone(),
            vec![bus()],
            vec![vec![-1.0]],
            Vec::new(),
            ModelParams::new(1.0, 1e5, 10.0),
        );
        assert!(matches!(negative_cost, Err(InstanceError::BadDispatchCost { .. })));

        let bad_row = TransitInstance::new(
            small_line(),
            grid,
            vec![bus()],
            vec![vec![1.0]],
            vec![DispatchRow {
                name: "r".into(),
                terms: vec![DispatchTerm { pattern: Some(4), vehicle_type: None, period: None, coef: 1.0 }],
                sense: RowSense::Ge,
                rhs: 1.0,
            }],
            ModelParams::new(1.0, 1e5, 10.0),
        );
        assert!(matches!(bad_row, Err(InstanceError::RowIndexOutOfRange { .. })));
    }
}
