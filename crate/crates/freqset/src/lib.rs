//! Standard-library companion to `freqset-core`: file formats, demand
//! statistics and synthesis, configuration resolution, report writers, and
//! the command implementations behind the `freqset` binary.
//!
//! The core crate stays `no_std`-compatible and owns all modeling and solver
//! mathematics; everything here is plumbing around it — paths, JSON/CSV,
//! clocks, threads, and process exit codes.

pub mod commands;
pub mod config;
pub mod files;
pub mod report;
pub mod stats;
pub mod synth;
pub mod workers;

pub use freqset_core as core;
