//! Concrete dispatch schedules and their mechanical feasibility checks.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::instance::{BudgetRule, RowSense, TransitInstance};

/// A dispatch decision per (pattern, vehicle type, period) plus the set of
/// active patterns. Indices refer to the owning instance's pattern and
/// vehicle-type lists; periods are 1-based.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Schedule {
    dispatches: BTreeSet<(usize, usize, usize)>,
    active_patterns: BTreeSet<usize>,
}

impl Schedule {
    pub fn empty() -> Self {
        Schedule::default()
    }

    /// Builds from explicit dispatch and active-pattern sets.
    pub fn new(
        dispatches: impl IntoIterator<Item = (usize, usize, usize)>,
        active_patterns: impl IntoIterator<Item = usize>,
    ) -> Self {
        Schedule {
            dispatches: dispatches.into_iter().collect(),
            active_patterns: active_patterns.into_iter().collect(),
        }
    }

    /// Builds from dispatches alone, activating exactly the patterns used.
    pub fn from_dispatches(dispatches: impl IntoIterator<Item = (usize, usize, usize)>) -> Self {
        let dispatches: BTreeSet<_> = dispatches.into_iter().collect();
        let active_patterns = dispatches.iter().map(|&(p, _, _)| p).collect();
        Schedule { dispatches, active_patterns }
    }

    pub fn add_dispatch(&mut self, pattern: usize, vehicle_type: usize, period: usize) {
        self.dispatches.insert((pattern, vehicle_type, period));
        self.active_patterns.insert(pattern);
    }

    pub fn is_dispatched(&self, pattern: usize, vehicle_type: usize, period: usize) -> bool {
        self.dispatches.contains(&(pattern, vehicle_type, period))
    }

    /// Dispatches in (pattern, vehicle type, period) order.
    pub fn dispatches(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.dispatches.iter().copied()
    }

    pub fn active_patterns(&self) -> impl Iterator<Item = usize> + '_ {
        self.active_patterns.iter().copied()
    }

    pub fn is_pattern_active(&self, pattern: usize) -> bool {
        self.active_patterns.contains(&pattern)
    }

    pub fn num_dispatches(&self) -> usize {
        self.dispatches.len()
    }

    pub fn dispatches_on_pattern(&self, pattern: usize) -> usize {
        self.dispatches.iter().filter(|&&(p, _, _)| p == pattern).count()
    }

    pub fn total_cost(&self, instance: &TransitInstance) -> f64 {
        self.dispatches.iter().map(|&(p, v, _)| instance.dispatch_cost(p, v)).sum()
    }

    /// Every violated feasibility rule, empty when the schedule is valid for
    /// the instance. Checks index ranges, the active-pattern link, the
    /// one-type-per-slot rule, the pattern-count cap, the budget, and any
    /// extra dispatch rows.
    pub fn violations(&self, instance: &TransitInstance) -> Vec<ScheduleViolation> {
        let mut out = Vec::new();
        let num_patterns = instance.line().patterns().len();
        let num_vtypes = instance.vehicle_types().len();
        for &(p, v, t) in &self.dispatches {
            if p >= num_patterns || v >= num_vtypes || !instance.grid().contains_period(t) {
                out.push(ScheduleViolation::IndexOutOfRange { pattern: p, vehicle_type: v, period: t });
                continue;
            }
            if !self.active_patterns.contains(&p) {
                out.push(ScheduleViolation::DispatchOnInactivePattern {
                    pattern: p,
                    vehicle_type: v,
                    period: t,
                });
            }
        }
        for &p in &self.active_patterns {
            if p >= num_patterns {
                out.push(ScheduleViolation::ActivePatternOutOfRange { pattern: p });
            }
        }
        for p in 0..num_patterns {
            for t in instance.grid().periods() {
                let types = self.dispatches.iter().filter(|&&(q, _, u)| q == p && u == t).count();
                if types > 1 {
                    out.push(ScheduleViolation::MultipleTypesInSlot { pattern: p, period: t, got: types });
                }
            }
        }
        if self.active_patterns.len() > instance.line().max_active_patterns() {
            out.push(ScheduleViolation::TooManyActivePatterns {
                active: self.active_patterns.len(),
                limit: instance.line().max_active_patterns(),
            });
        }
        match instance.params().budget {
            BudgetRule::Total(limit) => {
                let cost = self.total_cost(instance);
                if cost > limit + 1e-9 {
                    out.push(ScheduleViolation::BudgetExceeded { cost, limit });
                }
            }
            BudgetRule::PerType(ref limits) => {
                for (v, &limit) in limits.iter().enumerate() {
                    let cost: f64 = self
                        .dispatches
                        .iter()
                        .filter(|&&(_, w, _)| w == v)
                        .map(|&(p, w, _)| instance.dispatch_cost(p, w))
                        .sum();
                    if cost > limit + 1e-9 {
                        out.push(ScheduleViolation::TypeBudgetExceeded {
                            vehicle_type: v,
                            cost,
                            limit,
                        });
                    }
                }
            }
        }
        for row in instance.dispatch_rows() {
            let mut lhs = 0.0;
            for term in &row.terms {
                let hits = self
                    .dispatches
                    .iter()
                    .filter(|&&(p, v, t)| {
                        term.pattern.map_or(true, |q| q == p)
                            && term.vehicle_type.map_or(true, |w| w == v)
                            && term.period.map_or(true, |u| u == t)
                    })
                    .count();
                lhs += term.coef * hits as f64;
            }
            let ok = match row.sense {
                RowSense::Le => lhs <= row.rhs + 1e-9,
                RowSense::Ge => lhs >= row.rhs - 1e-9,
                RowSense::Eq => (lhs - row.rhs).abs() <= 1e-9,
            };
            if !ok {
                out.push(ScheduleViolation::DispatchRowViolated { name: row.name.clone(), lhs, rhs: row.rhs });
            }
        }
        out
    }
}

/// One broken schedule rule.
#[derive(Clone, Debug, PartialEq)]
pub enum ScheduleViolation {
    IndexOutOfRange { pattern: usize, vehicle_type: usize, period: usize },
    ActivePatternOutOfRange { pattern: usize },
    DispatchOnInactivePattern { pattern: usize, vehicle_type: usize, period: usize },
    MultipleTypesInSlot { pattern: usize, period: usize, got: usize },
    TooManyActivePatterns { active: usize, limit: usize },
    BudgetExceeded { cost: f64, limit: f64 },
    TypeBudgetExceeded { vehicle_type: usize, cost: f64, limit: f64 },
    DispatchRowViolated { name: String, lhs: f64, rhs: f64 },
}

impl fmt::Display for ScheduleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleViolation::IndexOutOfRange { pattern, vehicle_type, period } => {
                write!(f, "dispatch ({pattern},{vehicle_type},{period}) is out of range")
            }
            ScheduleViolation::ActivePatternOutOfRange { pattern } => {
                write!(f, "active pattern {pattern} is out of range")
            }
            ScheduleViolation::DispatchOnInactivePattern { pattern, vehicle_type, period } => {
                write!(f, "dispatch ({pattern},{vehicle_type},{period}) on inactive pattern")
            }
            ScheduleViolation::MultipleTypesInSlot { pattern, period, got } => {
                write!(f, "pattern {pattern} period {period} has {got} vehicle types dispatched")
            }
            ScheduleViolation::TooManyActivePatterns { active, limit } => {
                write!(f, "{active} active patterns exceed the cap of {limit}")
            }
            ScheduleViolation::BudgetExceeded { cost, limit } => {
                write!(f, "dispatch cost {cost} exceeds budget {limit}")
            }
            ScheduleViolation::TypeBudgetExceeded { vehicle_type, cost, limit } => {
                write!(f, "vehicle type {vehicle_type} cost {cost} exceeds its budget {limit}")
            }
            ScheduleViolation::DispatchRowViolated { name, lhs, rhs } => {
                write!(f, "dispatch row {name:?} violated: lhs {lhs} vs rhs {rhs}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{ModelParams, VehicleType};
    use crate::line::{PatternDef, TransitLine};
    use crate::time::{Minutes, TimeGrid};
    use alloc::vec;

    fn instance(budget: f64, max_active: usize) -> TransitInstance {
        let line = TransitLine::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                PatternDef {
                    id: "full".into(),
                    stop_names: vec!["a".into(), "b".into(), "c".into()],
                    segment_times: vec![Minutes::from_minutes(3), Minutes::from_minutes(4)],
                },
                PatternDef {
                    id: "short".into(),
                    stop_names: vec!["a".into(), "b".into()],
                    segment_times: vec![Minutes::from_minutes(3)],
                },
            ],
            max_active,
        )
        .unwrap();
        TransitInstance::with_unit_costs(
            line,
            TimeGrid::new(0, 5, 4).unwrap(),
            vec![
                VehicleType { id: "small".into(), seats: 20.0, max_capacity: 35.0 },
                VehicleType { id: "big".into(), seats: 37.0, max_capacity: 70.0 },
            ],
            ModelParams::new(1.0, 1e5, budget),
        )
        .unwrap()
    }

    #[test]
    fn valid_schedule_has_no_violations() {
        let inst = instance(3.0, 2);
        let s = Schedule::from_dispatches([(0, 0, 1), (0, 1, 2), (1, 0, 1)]);
        assert!(s.violations(&inst).is_empty());
        assert_eq!(s.num_dispatches(), 3);
        assert_eq!(s.dispatches_on_pattern(0), 2);
        assert_eq!(s.total_cost(&inst), 3.0);
    }

    #[test]
    fn violations_are_reported_individually() {
        let inst = instance(1.0, 1);
        // Two types in one slot, two active patterns, over budget.
        let s = Schedule::from_dispatches([(0, 0, 1), (0, 1, 1), (1, 0, 2)]);
        let v = s.violations(&inst);
        assert!(v.iter().any(|x| matches!(x, ScheduleViolation::MultipleTypesInSlot { pattern: 0, period: 1, got: 2 })));
        assert!(v.iter().any(|x| matches!(x, ScheduleViolation::TooManyActivePatterns { active: 2, limit: 1 })));
        assert!(v.iter().any(|x| matches!(x, ScheduleViolation::BudgetExceeded { .. })));
    }

    #[test]
    fn inactive_pattern_dispatch_is_flagged() {
        let inst = instance(5.0, 2);
        let s = Schedule::new([(0, 0, 1)], []);
        assert!(s
            .violations(&inst)
            .iter()
            .any(|x| matches!(x, ScheduleViolation::DispatchOnInactivePattern { .. })));
    }
}
