//! The model IR: named, bounded variables; linear constraints; a minimize
//! objective. Everything downstream (simplex, branch and bound, LP export)
//! consumes this representation and nothing else.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::math;

/// Handle to a variable of one [`MilpModel`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

/// Constraint relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sense::Le => write!(f, "<="),
            Sense::Eq => write!(f, "="),
            Sense::Ge => write!(f, ">="),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    /// Term list sorted by variable index with duplicates merged and exact
    /// zeros dropped.
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A mixed-integer linear program, to be minimized.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MilpModel {
    vars: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Vec<(VarId, f64)>,
    var_names: BTreeMap<String, usize>,
    constraint_names: BTreeMap<String, usize>,
}

impl MilpModel {
    pub fn new() -> Self {
        MilpModel::default()
    }

    /// Adds a binary variable (bounds are fixed to [0, 1]).
    pub fn add_binary(&mut self, name: impl Into<String>) -> Result<VarId, ModelError> {
        self.add_var(name.into(), VarKind::Binary, 0.0, 1.0)
    }

    /// Adds a continuous variable with the given bounds.
    pub fn add_continuous(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
    ) -> Result<VarId, ModelError> {
        self.add_var(name.into(), VarKind::Continuous, lower, upper)
    }

    fn add_var(&mut self, name: String, kind: VarKind, lower: f64, upper: f64) -> Result<VarId, ModelError> {
        if name.is_empty() {
            return Err(ModelError::EmptyName);
        }
        if self.var_names.contains_key(&name) {
            return Err(ModelError::DuplicateVariable { name });
        }
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(ModelError::BadBounds { name, lower, upper });
        }
        let id = VarId(self.vars.len());
        self.var_names.insert(name.clone(), id.0);
        self.vars.push(Variable { name, kind, lower, upper });
        Ok(id)
    }

    /// Adds a constraint. Terms may repeat variables; they are merged, and
    /// exact-zero coefficients are dropped.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: impl IntoIterator<Item = (VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> Result<(), ModelError> {
        let name = name.into();
        if name.is_empty() {
            return Err(ModelError::EmptyName);
        }
        if self.constraint_names.contains_key(&name) {
            return Err(ModelError::DuplicateConstraint { name });
        }
        if !rhs.is_finite() {
            return Err(ModelError::BadNumber { location: name });
        }
        let terms = self.merge_terms(terms, &name)?;
        self.constraint_names.insert(name.clone(), self.constraints.len());
        self.constraints.push(Constraint { name, terms, sense, rhs });
        Ok(())
    }

    /// Replaces the (minimize) objective.
    pub fn set_objective(
        &mut self,
        terms: impl IntoIterator<Item = (VarId, f64)>,
    ) -> Result<(), ModelError> {
        self.objective = self.merge_terms(terms, "objective")?;
        Ok(())
    }

    fn merge_terms(
        &self,
        terms: impl IntoIterator<Item = (VarId, f64)>,
        location: &str,
    ) -> Result<Vec<(VarId, f64)>, ModelError> {
        let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
        for (var, coef) in terms {
            if var.0 >= self.vars.len() {
                return Err(ModelError::UnknownVariable { location: location.into() });
            }
            if !coef.is_finite() {
                return Err(ModelError::BadNumber { location: location.into() });
            }
            *merged.entry(var.0).or_insert(0.0) += coef;
        }
        Ok(merged.into_iter().filter(|&(_, c)| c != 0.0).map(|(i, c)| (VarId(i), c)).collect())
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn num_binaries(&self) -> usize {
        self.vars.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.vars[id.0]
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[(VarId, f64)] {
        &self.objective
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.var_names.get(name).copied().map(VarId)
    }

    /// Objective value of an assignment (no feasibility implied).
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().map(|&(v, c)| c * x[v.0]).sum()
    }

    /// Structural re-validation: unique names, sane bounds, term indices in
    /// range, finite numbers. Builders uphold all of this; `validate` exists
    /// so externally assembled or mutated models can be checked before
    /// solving or export.
    pub fn validate(&self) -> Result<(), ModelError> {
        let mut seen = BTreeMap::new();
        for (i, v) in self.vars.iter().enumerate() {
            if v.name.is_empty() {
                return Err(ModelError::EmptyName);
            }
            if seen.insert(v.name.clone(), i).is_some() {
                return Err(ModelError::DuplicateVariable { name: v.name.clone() });
            }
            if v.lower.is_nan() || v.upper.is_nan() || v.lower > v.upper {
                return Err(ModelError::BadBounds { name: v.name.clone(), lower: v.lower, upper: v.upper });
            }
            if v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0) {
                return Err(ModelError::BadBounds { name: v.name.clone(), lower: v.lower, upper: v.upper });
            }
        }
        let mut seen_cons = BTreeMap::new();
        for (i, c) in self.constraints.iter().enumerate() {
            if c.name.is_empty() {
                return Err(ModelError::EmptyName);
            }
            if seen_cons.insert(c.name.clone(), i).is_some() {
                return Err(ModelError::DuplicateConstraint { name: c.name.clone() });
            }
            if !c.rhs.is_finite() {
                return Err(ModelError::BadNumber { location: c.name.clone() });
            }
            for &(v, coef) in &c.terms {
                if v.0 >= self.vars.len() {
                    return Err(ModelError::UnknownVariable { location: c.name.clone() });
                }
                if !coef.is_finite() {
                    return Err(ModelError::BadNumber { location: c.name.clone() });
                }
            }
        }
        for &(v, coef) in &self.objective {
            if v.0 >= self.vars.len() {
                return Err(ModelError::UnknownVariable { location: "objective".into() });
            }
            if !coef.is_finite() {
                return Err(ModelError::BadNumber { location: "objective".into() });
            }
        }
        Ok(())
    }

    /// Independent feasibility check of an assignment (one value per
    /// variable, model order): bound violations, constraint violations, and
    /// non-integral binaries, each reported with its magnitude. Deliberately
    /// shares no code with the simplex path.
    pub fn check_solution(&self, x: &[f64], tol: f64) -> Result<Vec<SolutionViolation>, ModelError> {
        if x.len() != self.vars.len() {
            return Err(ModelError::SolutionShape { expected: self.vars.len(), got: x.len() });
        }
        let mut out = Vec::new();
        for (i, v) in self.vars.iter().enumerate() {
            if !x[i].is_finite() || x[i] < v.lower - tol || x[i] > v.upper + tol {
                out.push(SolutionViolation::Bound {
                    var: v.name.clone(),
                    value: x[i],
                    lower: v.lower,
                    upper: v.upper,
                });
            }
            if v.kind == VarKind::Binary && math::frac_distance(x[i]) > tol {
                out.push(SolutionViolation::NonIntegralBinary { var: v.name.clone(), value: x[i] });
            }
        }
        for c in &self.constraints {
            let lhs: f64 = c.terms.iter().map(|&(v, coef)| coef * x[v.0]).sum();
            let slack = match c.sense {
                Sense::Le => c.rhs - lhs,
                Sense::Ge => lhs - c.rhs,
                Sense::Eq => -math::abs(lhs - c.rhs),
            };
            if slack < -tol {
                out.push(SolutionViolation::Constraint {
                    name: c.name.clone(),
                    lhs,
                    sense: c.sense,
                    rhs: c.rhs,
                    amount: -slack,
                });
            }
        }
        Ok(out)
    }
}

/// One violated requirement found by [`MilpModel::check_solution`].
#[derive(Clone, Debug, PartialEq)]
pub enum SolutionViolation {
    Bound { var: String, value: f64, lower: f64, upper: f64 },
    NonIntegralBinary { var: String, value: f64 },
    Constraint { name: String, lhs: f64, sense: Sense, rhs: f64, amount: f64 },
}

impl fmt::Display for SolutionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolutionViolation::Bound { var, value, lower, upper } => {
                write!(f, "{var} = {value} outside [{lower}, {upper}]")
            }
            SolutionViolation::NonIntegralBinary { var, value } => {
                write!(f, "binary {var} = {value} is not integral")
            }
            SolutionViolation::Constraint { name, lhs, sense, rhs, amount } => {
                write!(f, "constraint {name}: {lhs} {sense} {rhs} violated by {amount}")
            }
        }
    }
}

/// Model construction and validation errors.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelError {
    EmptyName,
    DuplicateVariable { name: String },
    DuplicateConstraint { name: String },
    BadBounds { name: String, lower: f64, upper: f64 },
    BadNumber { location: String },
    UnknownVariable { location: String },
    SolutionShape { expected: usize, got: usize },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::EmptyName => write!(f, "names must be non-empty"),
            ModelError::DuplicateVariable { name } => write!(f, "duplicate variable name {name:?}"),
            ModelError::DuplicateConstraint { name } => {
                write!(f, "duplicate constraint name {name:?}")
            }
            ModelError::BadBounds { name, lower, upper } => {
                write!(f, "variable {name:?} has invalid bounds [{lower}, {upper}]")
            }
            ModelError::BadNumber { location } => {
                write!(f, "non-finite coefficient or rhs in {location:?}")
            }
            ModelError::UnknownVariable { location } => {
                write!(f, "{location:?} references a variable from another model")
            }
            ModelError::SolutionShape { expected, got } => {
                write!(f, "solution has {got} values, model has {expected} variables")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ModelError {}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn duplicate_names_are_rejected() {
        let mut m = MilpModel::new();
        m.add_binary("x").unwrap();
        assert!(matches!(m.add_binary("x"), Err(ModelError::DuplicateVariable { .. })));
        assert!(matches!(m.add_continuous("x", 0.0, 1.0), Err(ModelError::DuplicateVariable { .. })));
        let y = m.add_continuous("y", 0.0, 1.0).unwrap();
        m.add_constraint("c", [(y, 1.0)], Sense::Le, 1.0).unwrap();
        assert!(matches!(
            m.add_constraint("c", [(y, 1.0)], Sense::Le, 1.0),
            Err(ModelError::DuplicateConstraint { .. })
        ));
        assert!(m.validate().is_ok());
    }

    #[test]
    fn terms_are_merged_and_zeros_dropped() {
        let mut m = MilpModel::new();
        let x = m.add_continuous("x", 0.0, 10.0).unwrap();
        let y = m.add_continuous("y", 0.0, 10.0).unwrap();
        m.add_constraint("c", [(x, 1.0), (y, 0.0), (x, 2.0)], Sense::Le, 4.0).unwrap();
        assert_eq!(m.constraints()[0].terms, vec![(x, 3.0)]);
        m.set_objective([(x, 1.0), (x, -1.0), (y, 2.0)]).unwrap();
        assert_eq!(m.objective(), &[(y, 2.0)]);
    }

    #[test]
    fn bad_bounds_and_foreign_vars_are_rejected() {
        let mut m = MilpModel::new();
        assert!(matches!(
            m.add_continuous("x", 2.0, 1.0),
            Err(ModelError::BadBounds { .. })
        ));
        assert!(matches!(
            m.add_continuous("y", f64::NAN, 1.0),
            Err(ModelError::BadBounds { .. })
        ));
        let mut other = MilpModel::new();
        let z = other.add_binary("z").unwrap();
        let _ = m.add_binary("b").unwrap();
        let far = VarId(z.index() + 7);
        assert!(matches!(
            m.add_constraint("c", [(far, 1.0)], Sense::Le, 1.0),
            Err(ModelError::UnknownVariable { .. })
        ));
    }

    #[test]
    fn check_solution_reports_each_violation_kind() {
        let mut m = MilpModel::new();
        let b = m.add_binary("b").unwrap();
        let x = m.add_continuous("x", 0.0, 5.0).unwrap();
        m.add_constraint("cap", [(b, 2.0), (x, 1.0)], Sense::Le, 3.0).unwrap();
        m.add_constraint("link", [(x, 1.0)], Sense::Ge, 1.0).unwrap();

        let ok = m.check_solution(&[1.0, 1.0], 1e-6).unwrap();
        assert!(ok.is_empty());

        let bad = m.check_solution(&[0.4, 6.0], 1e-6).unwrap();
        assert!(bad.iter().any(|v| matches!(v, SolutionViolation::NonIntegralBinary { value, .. } if *value == 0.4)));
        assert!(bad.iter().any(|v| matches!(v, SolutionViolation::Bound { .. })));
        assert!(bad
            .iter()
            .any(|v| matches!(v, SolutionViolation::Constraint { name, amount, .. } if name == "cap" && (*amount - 3.8).abs() < 1e-12)));

        assert!(matches!(
            m.check_solution(&[1.0], 1e-6),
            Err(ModelError::SolutionShape { .. })
        ));
    }

    #[test]
    fn check_solution_half_unit_violation_magnitude() {
        let mut m = MilpModel::new();
        let x = m.add_continuous("x", 0.0, 10.0).unwrap();
        m.add_constraint("floor", [(x, 1.0)], Sense::Ge, 2.0).unwrap();
        let v = m.check_solution(&[1.5], 1e-6).unwrap();
        assert_eq!(v.len(), 1);
        assert!(matches!(&v[0], SolutionViolation::Constraint { amount, .. } if (*amount - 0.5).abs() < 1e-12));
    }
}
