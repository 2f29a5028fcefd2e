//! Frequency setting for a single transit line.
//!
//! This crate builds, reduces, and solves dispatch-frequency optimization
//! models: which service patterns to activate and which vehicle type (if any)
//! to dispatch in each period, so that passenger journey cost plus a large
//! penalty on unserved demand is minimized subject to a fleet budget.
//!
//! The pieces compose as a pipeline:
//!
//! * [`line`], [`instance`], [`schedule`], [`demand`] — the domain model:
//!   stop sequences, service patterns with exact segment times, the planning
//!   grid, passenger flows, demand scenarios and per-flow statistics.
//! * [`milp`] — a small solver-agnostic mixed-integer model IR, an exact
//!   bounded-variable simplex plus best-first branch and bound, and an LP-file
//!   writer, all deterministic.
//! * [`formulate`] — model builders for the nominal, crowding-aware and
//!   multi-scenario (expected-value) variants, plus schedule extraction.
//! * [`robust`] — budgeted demand uncertainty sets and the robust counterpart
//!   built by dualizing the uncertain constraints, with extreme-point oracles
//!   for validation.
//! * [`downsize`] — demand-support reduction with a certified worst-case loss
//!   bound.
//! * [`evaluate`] — fixed-schedule passenger assignment, schedule comparison
//!   across scenarios, and parameter sweeps.
//!
//! The crate is `no_std`-compatible (with `alloc`) when built without the
//! default `std` feature; wall-clock solve limits are only honored with `std`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod demand;
pub mod downsize;
pub mod evaluate;
pub mod formulate;
pub mod instance;
pub mod line;
pub mod math;
pub mod milp;
pub mod robust;
pub mod schedule;
pub mod time;

#[cfg(test)]
mod testkit;

pub use instance::{BudgetRule, DispatchRow, DispatchTerm, ModelParams, TransitInstance, VehicleType};
pub use line::{PassengerFlow, Pattern, TransitLine};
pub use schedule::Schedule;
pub use time::{Minutes, TimeGrid};
