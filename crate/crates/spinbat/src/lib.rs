//! Numerical laboratory for spin quantum batteries.
//!
//! A quantum battery is charged by a strong external drive, stored while
//! exposed to repeated noisy channels, and discharged by a cyclic unitary.
//! The maximum work extractable by that last step is the *ergotropy*. This
//! crate builds the whole pipeline for one- and two-qubit spin batteries:
//!
//! - [`linalg`] — dense complex 2×2/4×4 matrices and a Hermitian eigensolver;
//! - [`models`] — battery Hamiltonians, charging unitaries, and the
//!   classification of DMI-interaction regions for the two-qubit XYZ model;
//! - [`channels`] — Kraus representations of phase-flip, bit-flip, and
//!   amplitude-damping noise, brute-force N-fold iteration, and closed-form
//!   N-step / asymptotic states;
//! - [`ergotropy`] — extractable work via exact passive-state construction
//!   and via every closed-form expression the models admit;
//! - [`sweep`] — declarative parameter grids, a deterministic parallel sweep
//!   engine, CSV/JSON-lines emission, and seeded verification suites.
//!
//! The `spinbat` binary exposes all of it behind subcommands; see the README.

pub mod channels;
pub mod cli;
pub mod ergotropy;
pub mod linalg;
pub mod models;
pub mod sweep;
