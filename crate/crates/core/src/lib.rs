//! Mutual-knowledge agent simulation and percolation analysis of the
//! resulting meeting and knowledge networks.
//!
//! * [`sim`]: the seeded tick engine.
//! * [`netcap`]: network capture and Pajek/CSV serialization.
//! * [`percolation`]: degree statistics, giant clusters, thresholds.
//! * [`experiments`]: single runs, replicated sweeps and presets.

pub mod config;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod netcap;
pub mod percolation;
pub mod sim;

pub use config::{DistanceMetric, SimConfig};
pub use error::{Error, Result};
pub use exec::Execution;
