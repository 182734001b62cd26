use super::evolve::{evolve, EvolveOptions};
use super::gap::GapProfile;
use super::schedule::{solve_schedule, ScheduleOptions};
use super::state::detector_correlation;
use crate::error::{Error, Result};
use crate::ising::{build_ising, spins_from_activity};
use crate::par::{try_map_indexed, ExecMode};
use crate::rng::RngStream;
use crate::signal::InstanceParams;
use crate::stats::MetricEstimate;

/// Quantum activity error-rate: mean of `(1 - d) / 2` over fresh instances,
/// each annealed along the scheme's mean-gap schedule at precision `epsilon`.
pub fn estimate_qaer(
    params: &InstanceParams,
    epsilon: f64,
    profile: &GapProfile,
    n_trials: usize,
    master_seed: u64,
    opts: &EvolveOptions,
    mode: ExecMode,
) -> Result<MetricEstimate> {
    let samples = qaer_samples(params, epsilon, profile, n_trials, master_seed, opts, mode)?;
    Ok(MetricEstimate::from_samples(&samples))
}

/// Per-trial `(1 - d) / 2` values behind [`estimate_qaer`]. Trial `t` uses
/// the same instance stream as the classical estimator, so both rates can be
/// compared instance by instance.
pub fn qaer_samples(
    params: &InstanceParams,
    epsilon: f64,
    profile: &GapProfile,
    n_trials: usize,
    master_seed: u64,
    opts: &EvolveOptions,
    mode: ExecMode,
) -> Result<Vec<f64>> {
    if n_trials == 0 {
        return Err(Error::InvalidParameter("n_trials must be >= 1".into()));
    }
    if let Some(meta) = &profile.meta {
        if (meta.scheme, meta.m, meta.n, meta.k) != (params.scheme, params.m, params.n, params.k) {
            return Err(Error::InvalidParameter(format!(
                "profile was estimated for ({}, M={}, N={}, K={}), run asks for ({}, M={}, N={}, K={})",
                meta.scheme, meta.m, meta.n, meta.k, params.scheme, params.m, params.n, params.k
            )));
        }
    }
    let schedule = solve_schedule(profile, epsilon, &ScheduleOptions::default())?;
    try_map_indexed(mode, n_trials, |t| {
        let inst = params.sample(RngStream::for_trial(master_seed, t))?;
        let problem = build_ising(&inst.pilots, &inst.sample_cov)?;
        let psi = evolve(&problem, &schedule, opts)?;
        let d = detector_correlation(&psi, &spins_from_activity(&inst.activity));
        Ok(0.5 * (1.0 - d))
    })
}
