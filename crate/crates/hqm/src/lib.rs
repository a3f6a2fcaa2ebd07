//! Desk-scale numerical simulator of a hybrid quantum memory in which a
//! superconducting flux qubit (FQ) stores its state in the ground-state
//! hyperfine levels of a nitrogen-vacancy (NV) center, with a magnon mode
//! of a ferrimagnetic YIG sphere acting as a virtual quantum bus between
//! them.
//!
//! The crate is organised bottom-up:
//!
//! * [`units`] — physical constants and Hz ↔ rad/s conventions.
//! * [`linalg`] — dense complex matrices, Kronecker/embedding helpers,
//!   matrix exponential, partial trace, Lindblad superoperators.
//! * [`geometry`] — microscopic coupling sums over the YIG spin lattice:
//!   flux-qubit–magnon and magnon–NV couplings from device geometry.
//! * [`effective`] — the three-level effective model obtained after
//!   adiabatic elimination of the magnon mode: dispersive shifts,
//!   effective FQ–NV couplings, and the resonance bias field.
//! * [`oracle`] — the full FQ ⊗ magnon ⊗ NV model used to validate the
//!   effective description.
//! * [`dynamics`] — Lindblad time evolution: RK4 integration of
//!   time-dependent generators and exact exponential propagation of
//!   static ones.
//! * [`protocol`] — the write → store → read memory protocol, fidelity
//!   reporting, transfer-time calibration, and parameter tables.
//! * [`config`] — plain-text `key = value` run configuration.
//! * [`csvout`] — CSV emission with embedded run metadata.
//! * [`svg`] — small self-contained SVG line plots.
//! * [`cli`] — implementations of the `hqm` command-line subcommands.
//!
//! Run `cargo run --example memory` (or any other example) for a guided
//! tour; the `hqm` binary exposes the same capabilities as subcommands.

pub mod cli;
pub mod config;
pub mod csvout;
pub mod dynamics;
pub mod effective;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod oracle;
pub mod protocol;
pub mod svg;
pub mod units;

pub use error::{HqmError, Result};
