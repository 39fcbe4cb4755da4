//! Declarative parameter sweeps, the deterministic parallel engine, result
//! emission, and the seeded verification suites.
//!
//! Work is partitioned over grid points; every point is evaluated by the
//! pure operations of the other modules, and results are reassembled in
//! row-major grid order before emission, so output bytes are identical for
//! any worker count.

mod engine;
pub mod spec;
pub mod table;
pub mod verify;

pub use engine::run_sweep;
pub use spec::{AxisSpec, Experiment, NoiseSpec, ParamSet, SweepSpec};
pub use table::{emit, emit_to_vec, Cell, OutputFormat, Table};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep spec at {field}: {reason}")]
    InvalidSpec { field: String, reason: String },
    #[error("config file {path}: {reason}")]
    Config { path: String, reason: String },
    #[error("output {path}: {reason}")]
    Output { path: String, reason: String },
    #[error("row {index} ({assignment}): {message}")]
    Row {
        index: usize,
        assignment: String,
        message: String,
    },
    #[error("sweep engine: {0}")]
    Engine(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
