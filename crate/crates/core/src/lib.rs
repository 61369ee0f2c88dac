//! Monte-Carlo system-level simulator for ultra-dense outdoor small-cell
//! networks.
//!
//! The pipeline runs deployment → propagation → power calibration →
//! association and idle mode → SINR → scheduling → throughput → energy
//! efficiency, and writes CSV summaries with an audit header.

pub mod antenna;
pub mod energy;
pub mod error;
pub mod fastfading;
pub mod link;
pub mod model;
pub mod propagation;
pub mod rng;
pub mod runner;
pub mod scenario;
pub mod scheduler;

pub use energy::{PowerTable, SleepModel};
pub use error::{Error, Result};
pub use model::ModelParams;
pub use scenario::{build_hex_grid, drop_ues, Deployment, ScenarioConfig, UeDistribution};
