//! Seeded Monte-Carlo experiments over the detection and annealing core:
//! error rate against antenna count, antenna calibration, mean gaps, single
//! annealing traces, and quantum error rates against SNR and annealing time.
//!
//! Every run is a pure function of its [`ExperimentConfig`]; results are
//! written as CSV with a metadata header (see [`table`]).

pub mod config;
pub mod error;
pub mod report;
pub mod runners;
pub mod table;

pub use config::{ExperimentConfig, KChoice};
pub use error::{ExpError, ExpResult};
pub use report::{run, Experiment};
