//! Covariance-based active user detection for a small non-orthogonal uplink,
//! solved exactly by enumeration and approximately by simulated quantum
//! annealing.
//!
//! - [`signal`]: pilot books, activity, channels, noise and sample covariance.
//! - [`nnls`]: the binary least-squares detector and its error rate.
//! - [`ising`]: the equivalent Ising energy and its ground state.
//! - [`annealer`]: spectral gaps, gap-driven schedules, state-vector
//!   evolution and the quantum error rate.

pub mod annealer;
pub mod error;
pub mod ising;
pub mod nnls;
pub mod par;
pub mod rng;
pub mod signal;
pub mod stats;

pub use error::{Error, Result};
pub use par::ExecMode;
pub use rng::RngStream;
pub use signal::{InstanceParams, PilotScheme};
pub use stats::MetricEstimate;
