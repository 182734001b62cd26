//! The experiment runners. Each returns typed results; [`crate::report`]
//! turns them into tables.

use std::path::PathBuf;

use qaud::annealer::io::{profile_from_csv, profile_to_csv, read_text, write_text};
use qaud::annealer::{
    annealing_time, estimate_mean_gap, estimate_qaer, evolve_observed, solve_schedule, success_probability,
    uniform_grid, EvolveOptions, GapProfile, Propagator, ScheduleOptions,
};
use qaud::ising::{build_ising, spins_from_activity};
use qaud::nnls::{brute_force_nnls, estimate_aer};
use qaud::{Error, ExecMode, InstanceParams, MetricEstimate, PilotScheme, RngStream};

use crate::config::{ExperimentConfig, KChoice, DEFAULT_EPSILON, DEFAULT_TIME_EPSILON};
use crate::error::ExpResult;

/// Offset between the trial seed and the seed of the mean-gap instances, so
/// the schedule is never fitted to the very instances it is scored on.
pub const GAP_SEED_OFFSET: u64 = 0x9e37_79b9_7f4a_7c15;

pub fn gap_seed(master_seed: u64) -> u64 {
    master_seed.wrapping_add(GAP_SEED_OFFSET)
}

fn params(cfg: &ExperimentConfig, scheme: PilotScheme, k: usize, snr_db: f64) -> InstanceParams {
    InstanceParams {
        scheme,
        m: cfg.m,
        n: cfg.n,
        k,
        snr_db,
        p_active: cfg.p_active,
    }
}

fn evolve_options(cfg: &ExperimentConfig) -> EvolveOptions {
    EvolveOptions {
        propagator: Propagator::Magnus4 { max_step: cfg.max_step },
        ..EvolveOptions::default()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AerPoint {
    pub scheme: PilotScheme,
    pub k: usize,
    pub estimate: MetricEstimate,
}

/// Noiseless NNLS error rate over `cfg.k_sweep` for every scheme.
pub fn aer_vs_k(cfg: &ExperimentConfig, mode: ExecMode) -> ExpResult<Vec<AerPoint>> {
    let mut out = Vec::new();
    for &scheme in &cfg.scheme {
        for &k in &cfg.k_sweep {
            let estimate = estimate_aer(&params(cfg, scheme, k, f64::INFINITY), cfg.n_trials, cfg.master_seed, mode)?;
            out.push(AerPoint { scheme, k, estimate });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Calibration {
    pub scheme: PilotScheme,
    pub target: f64,
    pub k: usize,
    pub estimate: MetricEstimate,
    /// Every `(K, estimate)` evaluated, in search order.
    pub visited: Vec<(usize, MetricEstimate)>,
}

/// Smallest K whose noiseless NNLS error rate has a 95% upper bound at or
/// below `target`: doubling from K = 1, then bisection on the last bracket.
pub fn calibrate_k(
    scheme: PilotScheme,
    target: f64,
    cfg: &ExperimentConfig,
    mode: ExecMode,
) -> ExpResult<Calibration> {
    let mut visited = Vec::new();
    let mut eval = |k: usize| -> ExpResult<MetricEstimate> {
        let est = estimate_aer(
            &params(cfg, scheme, k, f64::INFINITY),
            cfg.calibration_trials,
            cfg.master_seed,
            mode,
        )?;
        visited.push((k, est));
        Ok(est)
    };

    let mut k = 1;
    let mut est = eval(k)?;
    let mut failed = 0;
    while est.upper() > target {
        if k >= cfg.k_max {
            let (best_k, best) = visited
                .iter()
                .min_by(|a, b| a.1.upper().total_cmp(&b.1.upper()))
                .copied()
                .expect("at least one evaluation");
            return Err(Error::Calibration {
                target,
                best_k,
                best_upper: best.upper(),
            }
            .into());
        }
        failed = k;
        k = (2 * k).min(cfg.k_max);
        est = eval(k)?;
    }
    let (mut lo, mut hi, mut hi_est) = (failed, k, est);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let e = eval(mid)?;
        if e.upper() <= target {
            hi = mid;
            hi_est = e;
        } else {
            lo = mid;
        }
    }
    Ok(Calibration {
        scheme,
        target,
        k: hi,
        estimate: hi_est,
        visited,
    })
}

/// Antenna count per scheme, calibrating when the config asks for it.
pub fn resolve_k(scheme: PilotScheme, cfg: &ExperimentConfig, mode: ExecMode) -> ExpResult<usize> {
    match cfg.k {
        KChoice::Fixed(k) => Ok(k),
        KChoice::Calibrate => Ok(calibrate_k(scheme, cfg.target_aer, cfg, mode)?.k),
    }
}

fn cache_path(cfg: &ExperimentConfig, scheme: PilotScheme, k: usize) -> Option<PathBuf> {
    cfg.cache_dir.as_ref().map(|dir| {
        dir.join(format!(
            "gap_{}_m{}_n{}_k{}_p{}_s{}_g{}_seed{}.csv",
            scheme, cfg.m, cfg.n, k, cfg.p_active, cfg.gap_samples, cfg.grid_points, cfg.master_seed
        ))
    })
}

fn cached_profile_matches(p: &GapProfile, cfg: &ExperimentConfig, scheme: PilotScheme, k: usize) -> bool {
    let grid = uniform_grid(cfg.grid_points);
    p.u_grid() == grid.as_slice()
        && p.meta.as_ref().is_some_and(|m| {
            (m.scheme, m.m, m.n, m.k, m.n_samples, m.master_seed)
                == (scheme, cfg.m, cfg.n, k, cfg.gap_samples, gap_seed(cfg.master_seed))
        })
}

/// Mean squared gap profile for one scheme, read from or written to the
/// cache directory when one is configured.
pub fn gap_profile(cfg: &ExperimentConfig, scheme: PilotScheme, k: usize, mode: ExecMode) -> ExpResult<GapProfile> {
    let path = cache_path(cfg, scheme, k);
    if let Some(path) = path.as_ref().filter(|p| p.exists()) {
        let profile = profile_from_csv(&read_text(path)?)?;
        if cached_profile_matches(&profile, cfg, scheme, k) {
            return Ok(profile);
        }
    }
    let profile = estimate_mean_gap(
        &params(cfg, scheme, k, f64::INFINITY),
        cfg.gap_samples,
        &uniform_grid(cfg.grid_points),
        gap_seed(cfg.master_seed),
        mode,
    )?;
    if let Some(path) = path {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|source| crate::error::ExpError::Io {
                path: dir.display().to_string(),
                source,
            })?;
        }
        write_text(&path, &profile_to_csv(&profile))?;
    }
    Ok(profile)
}

#[derive(Clone, Debug)]
pub struct SchemeProfile {
    pub scheme: PilotScheme,
    pub k: usize,
    pub profile: GapProfile,
}

pub fn mean_gap(cfg: &ExperimentConfig, mode: ExecMode) -> ExpResult<Vec<SchemeProfile>> {
    cfg.scheme
        .iter()
        .map(|&scheme| {
            let k = resolve_k(scheme, cfg, mode)?;
            Ok(SchemeProfile {
                scheme,
                k,
                profile: gap_profile(cfg, scheme, k, mode)?,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DemoSample {
    pub t: f64,
    pub u: f64,
    pub success_probability: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DemoTrace {
    pub scheme: PilotScheme,
    pub k: usize,
    pub epsilon: f64,
    pub annealing_time: f64,
    /// Thinned samples; the first and last evolution steps are always kept.
    pub samples: Vec<DemoSample>,
    pub final_success: f64,
    pub final_norm: f64,
}

/// Anneals one noiseless instance per scheme and precision level, tracking
/// the overlap with the NNLS solution.
pub fn anneal_demo(cfg: &ExperimentConfig, mode: ExecMode) -> ExpResult<Vec<DemoTrace>> {
    let mut out = Vec::new();
    for &scheme in &cfg.scheme {
        let k = resolve_k(scheme, cfg, mode)?;
        let profile = gap_profile(cfg, scheme, k, mode)?;
        let inst = params(cfg, scheme, k, f64::INFINITY).sample(RngStream::for_trial(cfg.master_seed, cfg.demo_instance))?;
        let problem = build_ising(&inst.pilots, &inst.sample_cov)?;
        let target = spins_from_activity(&brute_force_nnls(&inst.pilots, &inst.sample_cov)?.minimizer);
        for epsilon in cfg.epsilons_or(&DEFAULT_EPSILON) {
            let schedule = solve_schedule(&profile, epsilon, &ScheduleOptions::default())?;
            let mut full = Vec::new();
            let psi = evolve_observed(&problem, &schedule, &evolve_options(cfg), |t, u, state| {
                full.push(DemoSample {
                    t,
                    u,
                    success_probability: success_probability(state, &target),
                });
            })?;
            let stride = full.len().div_ceil(cfg.demo_points).max(1);
            let last = full.len() - 1;
            let samples = full
                .into_iter()
                .enumerate()
                .filter(|(i, _)| i % stride == 0 || *i == last)
                .map(|(_, s)| s)
                .collect();
            out.push(DemoTrace {
                scheme,
                k,
                epsilon,
                annealing_time: schedule.duration(),
                samples,
                final_success: success_probability(&psi, &target),
                final_norm: psi.norm(),
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Estimator {
    Qaer,
    AerNnls,
}

impl Estimator {
    pub fn as_str(&self) -> &'static str {
        match self {
            Estimator::Qaer => "qaer",
            Estimator::AerNnls => "aer_nnls",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SnrPoint {
    pub scheme: PilotScheme,
    pub k: usize,
    pub estimator: Estimator,
    /// `None` for the classical detector.
    pub epsilon: Option<f64>,
    pub snr_db: f64,
    pub estimate: MetricEstimate,
}

/// Quantum and classical error rates across the SNR grid. Both estimators
/// see the same instances at every grid point.
pub fn qaer_vs_snr(cfg: &ExperimentConfig, mode: ExecMode) -> ExpResult<Vec<SnrPoint>> {
    let eps = cfg.epsilons_or(&DEFAULT_EPSILON);
    let opts = evolve_options(cfg);
    let mut out = Vec::new();
    for &scheme in &cfg.scheme {
        let k = resolve_k(scheme, cfg, mode)?;
        let profile = gap_profile(cfg, scheme, k, mode)?;
        for &snr_db in &cfg.snr_db {
            let p = params(cfg, scheme, k, snr_db);
            out.push(SnrPoint {
                scheme,
                k,
                estimator: Estimator::AerNnls,
                epsilon: None,
                snr_db,
                estimate: estimate_aer(&p, cfg.n_trials, cfg.master_seed, mode)?,
            });
            for &epsilon in &eps {
                out.push(SnrPoint {
                    scheme,
                    k,
                    estimator: Estimator::Qaer,
                    epsilon: Some(epsilon),
                    snr_db,
                    estimate: estimate_qaer(&p, epsilon, &profile, cfg.n_trials, cfg.master_seed, &opts, mode)?,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimePoint {
    pub scheme: PilotScheme,
    pub k: usize,
    pub epsilon: f64,
    pub annealing_time: f64,
    pub estimate: MetricEstimate,
}

/// Quantum error rate against annealing time at `cfg.time_snr_db`, traced
/// by sweeping the precision level.
pub fn qaer_vs_time(cfg: &ExperimentConfig, mode: ExecMode) -> ExpResult<Vec<TimePoint>> {
    let opts = evolve_options(cfg);
    let mut eps = cfg.epsilons_or(&DEFAULT_TIME_EPSILON);
    eps.sort_by(|a, b| b.total_cmp(a));
    let mut out = Vec::new();
    for &scheme in &cfg.scheme {
        let k = resolve_k(scheme, cfg, mode)?;
        let profile = gap_profile(cfg, scheme, k, mode)?;
        let p = params(cfg, scheme, k, cfg.time_snr_db);
        for &epsilon in &eps {
            out.push(TimePoint {
                scheme,
                k,
                epsilon,
                annealing_time: annealing_time(&profile, epsilon)?,
                estimate: estimate_qaer(&p, epsilon, &profile, cfg.n_trials, cfg.master_seed, &opts, mode)?,
            });
        }
    }
    Ok(out)
}

/// Smallest annealing time at which the curve's mean error rate is at or
/// below `target`, or infinity when no point qualifies.
pub fn time_to_target(points: &[TimePoint], scheme: PilotScheme, target: f64) -> f64 {
    points
        .iter()
        .filter(|p| p.scheme == scheme && p.estimate.mean <= target)
        .map(|p| p.annealing_time)
        .fold(f64::INFINITY, f64::min)
}
