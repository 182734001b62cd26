//! Quantum annealing on the `2^N` state space.
//!
//! Basis index `s` encodes user `i` as bit `i`: a clear bit is spin up
//! (`sigma_z = +1`, inactive), a set bit is spin down (active). The global
//! Hamiltonian is `H(u) = (1 - u) H_P + u H_C` with the diagonal problem
//! operator `H_P` and the transverse field `H_C = -sum_i sigma_x_i`. Units
//! have `hbar = 1`.

mod evolve;
mod gap;
mod hamiltonian;
mod interp;
pub mod io;
mod qaer;
mod schedule;
mod state;

pub use evolve::{evolve, evolve_observed, EvolveOptions, Propagator};
pub use gap::{estimate_mean_gap, spectral_gap_squared, spectral_gap_squared_diag, GapProfile, ProfileMeta};
pub use hamiltonian::{apply_hamiltonian, dense_hamiltonian, problem_diagonal};
pub use interp::MonotoneCubic;
pub use qaer::{estimate_qaer, qaer_samples};
pub use schedule::{annealing_time, solve_schedule, Schedule, ScheduleOptions};
pub use state::{detector_correlation, success_probability, QuantumState};

/// Default number of uniform `u` points for gap profiles.
pub const DEFAULT_GRID_POINTS: usize = 41;

/// Uniform grid of `points` values from 0 to 1 inclusive.
pub fn uniform_grid(points: usize) -> Vec<f64> {
    assert!(points >= 2, "a grid needs both endpoints");
    let last = (points - 1) as f64;
    (0..points).map(|i| i as f64 / last).collect()
}
