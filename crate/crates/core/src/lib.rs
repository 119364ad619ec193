//! Joint routing and two-phase (reservation / on-demand) wavelength planning
//! for QKD-secured federated-learning chain requests.
//!
//! The crate is organised bottom-up:
//!
//! * [`topology`] holds the directed fiber network and its edge-list format.
//! * [`demand`] models chain requests, their discrete key-rate scenarios and
//!   the conversion from key rate to parallel QKD links.
//! * [`cost`] counts hardware along a route and prices it per phase.
//! * [`program`] assembles the deterministic-equivalent integer program and
//!   exports it in LP format.
//! * [`solver`] solves desk-scale programs exactly (candidate paths plus
//!   branch-and-bound) and carries a brute-force oracle for validation.
//! * [`baseline`] is the shortest-path, non-adaptive comparison planner.
//! * [`experiment`] runs the reservation, utilization and baseline sweeps
//!   and writes CSV series.

pub mod baseline;
pub mod cost;
pub mod demand;
pub mod error;
pub mod experiment;
pub mod kv;
pub mod program;
pub mod rational;
pub mod solver;
pub mod topology;

pub use error::{Error, Result};
pub use rational::Rational;
