//! Opportunistic primary/secondary user cooperation in a cognitive femtocell.
//!
//! A secondary user (SU) sends its own packets only while the licensed primary
//! user (PU) is idle, and may spend power relaying PU packets while the PU is
//! busy. Cooperation shortens PU busy periods and so creates more idle slots,
//! at the cost of power the SU could have used for itself. This crate provides:
//!
//! - [`model`]: domain types and the exact per-slot queue updates;
//! - [`analysis`]: birth–death steady state, frame-length bounds, busy-period
//!   moments and the drift constants behind the performance guarantees;
//! - [`controller`]: the frame-based drift-plus-penalty controller (single user,
//!   multiple users, fading);
//! - [`baselines`]: No Cooperation, Always Cooperate and Counter-Based policies;
//! - [`oracle`]: the offline optimum over stationary randomized policies;
//! - [`sim`]: the slot-by-slot episode driver, sweeps and adaptive scenarios;
//! - [`config`] and [`cli`]: the `key = value` run configuration and the
//!   commands behind the `coopsim` binary.
//!
//! Runnable walkthroughs of every capability live in `examples/`.

pub mod analysis;
pub mod baselines;
pub mod cli;
pub mod config;
pub mod controller;
pub mod model;
pub mod oracle;
pub mod sim;

pub use model::{ModelParams, Phase, PowerCurve, PowerSet, SlotOutcome, SystemState};
pub use sim::{run_episode, PolicySpec, RunMetrics, Scenario};
