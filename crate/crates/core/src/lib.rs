//! Deterministic mmWave V2X broadcast simulator.
//!
//! A single base station broadcasts to vehicles moving among buildings.
//! Vehicles without line of sight to the base station can be reached over one
//! extra hop through a LOS vehicle picked by a tabular Q-learning policy.
//!
//! - [`geometry`]: terrain, footprints, 3-D line of sight, placement
//! - [`mobility`]: random waypoint vehicles, constant position BS
//! - [`channel`]: path loss, per-attempt success probability, latency
//! - [`rml`]: blockage identification, flow estimate, metrics, relay policy
//! - [`engine`]: the time-stepped scenario loop and metrics
//! - [`experiment`]: config files, sweeps and result files
//!
//! Runnable walkthroughs live in this crate's `examples/` directory.

// `!(x > 0.0)` is used on purpose in validation: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod mobility;
pub mod rml;
pub mod rng;

pub use error::{Error, Result};
