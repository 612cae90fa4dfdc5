//! Benchmark toolkit for robotic intra-logistics.
//!
//! A warehouse is a grid of squares holding robots, shelves and picking
//! stations. Robots carry shelves to stations to fulfil orders. This crate
//! provides:
//!
//! * [`facts_io`]: the fact-based exchange format for instances, plans and
//!   diagnostics;
//! * [`model`]: executable semantics of the four delivery domains;
//! * [`checker`]: parallel plan validation with `err/3` diagnostics;
//! * [`generator`]: reproducible instance and batch generation;
//! * [`planner`]: bounded-horizon and minimal-makespan planners, a
//!   breadth-first optimality oracle and task assignment.

pub mod checker;
pub mod facts_io;
pub mod generator;
pub mod json;
pub mod model;
pub mod planner;

/// Version string written into reproducibility headers and `--version`.
pub const TOOL_NAME: &str = "logibench";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn version_string() -> String {
    format!("{TOOL_NAME} v{VERSION}")
}
