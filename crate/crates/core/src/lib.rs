//! Exact density-matrix simulation of Trotterized perfect state transfer
//! (PST) along a qubit chain, under gate errors, ZZ crosstalk and T1/T2
//! decoherence, plus a post-processing mitigation pipeline that rescales
//! the observed excitation dynamics and shifts the model-time axis.
//!
//! The crate is organised bottom-up:
//!
//! - [`quantum`]: dense complex matrices, density matrices, local unitary
//!   and Kraus application.
//! - [`gates`]: the fixed gate set and the two-qubit XY interaction block.
//! - [`channels`]: Kraus constructions for every supported noise process.
//! - [`simulator`]: chain couplings, Trotter circuits and noisy evolution.
//! - [`analysis`]: hitting times and sweep comparison metrics.
//! - [`mitigation`]: stationary-value estimation, exponential and linear
//!   fits, rescaling and time shift.
//! - [`harness`]: JSON experiment configs, deterministic CSV/JSON outputs
//!   and the run/compare/mitigate drivers used by the `pstsim` binary.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod analysis;
pub mod channels;
pub mod error;
pub mod gates;
pub mod harness;
pub mod mitigation;
pub mod quantum;
pub mod simulator;

pub use error::{Error, Result};
