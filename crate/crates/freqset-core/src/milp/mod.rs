//! A small, deterministic mixed-integer linear programming toolkit.
//!
//! [`model`] holds the solver-agnostic problem IR plus validation and an
//! independent solution checker; [`simplex`] is a two-phase bounded-variable
//! revised simplex; [`solve`] wraps it in best-first branch and bound over
//! the binary variables; [`export`] writes the model as LP-format text.
//!
//! Everything here is single-threaded and free of randomness: the same model
//! yields the same pivots, the same branching order, and the same solution
//! values on every run.

pub mod export;
pub mod model;
pub mod simplex;
pub mod solve;

pub use export::{write_lp, LpExport};
pub use model::{Constraint, MilpModel, ModelError, Sense, SolutionViolation, VarId, VarKind, Variable};
pub use solve::{solve, solve_relaxation, Solution, SolveError, SolveLimits, SolveStatus};
