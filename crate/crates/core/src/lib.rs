//! Behavioral simulator for a ReRAM crossbar Tsetlin machine inference
//! architecture.
//!
//! A trained Tsetlin machine evaluates conjunctive clauses over Boolean
//! literals. Here those clauses are mapped onto 1T1R memory columns: each
//! automaton's include/exclude action becomes a low/high resistive state,
//! literal values become read voltages, and a clause column's truth value is
//! decided by comparing its summed current against a reference. This crate
//! models that path behaviorally — digital ground truth ([`tm`]), statistical
//! device physics ([`device`]), the column/sense path ([`crossbar`]), energy
//! and latency accounting ([`energy`]), and seeded variation experiments
//! ([`montecarlo`]).
//!
//! The digital and analog inference routes are implemented independently so
//! each can serve as the other's oracle: with nominal devices and an ideal
//! comparator they must agree on every prediction.

pub mod config;
pub mod crossbar;
pub mod dataset;
pub mod device;
pub mod energy;
pub mod error;
pub mod io;
pub mod montecarlo;
pub mod tm;

pub use error::{Error, Result};
