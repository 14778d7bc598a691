//! Simulation and analysis library for three tripartite binary quantum
//! voting protocols:
//!
//! - the TZL scheme built on controlled teleportation of a `|±⟩` vote over a
//!   4-qubit channel, together with executable demonstrations of its three
//!   structural flaws (controller irrelevance for `|±⟩` inputs, a separable
//!   channel prepared by the tallyman, and undetected qubit replacement on
//!   its unprotected legs);
//! - an improved protocol on a GHZ-like channel where the controller
//!   prepares and distributes the state and every leg is decoy-protected;
//! - a Bell-pair protocol whose control comes from a secret permutation of
//!   the tallyman's qubit string, disclosed only in the counting phase.
//!
//! Everything runs on a dense ≤6-qubit state-vector kernel, is deterministic
//! given a seed, and logs a replayable transcript whose resource deltas feed
//! the qubit-efficiency figure `η = c/(q+b)`.

pub mod attacks;
pub mod batch;
pub mod cdsqc;
pub mod decoy;
pub mod error;
pub mod ledger;
pub(crate) mod legs;
pub mod qstate;
pub mod register;
pub mod scenario;
pub mod states;
pub mod transcript;
pub mod tzl;

pub use error::{Error, Result};
