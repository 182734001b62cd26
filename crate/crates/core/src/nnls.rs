//! Exhaustive non-negative least-squares activity detection over binary
//! patterns, and its Monte-Carlo activity error-rate.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{check_enum_guard, Error, Result};
use crate::par::{try_map_indexed, ExecMode};
use crate::rng::RngStream;
use crate::signal::{ActivityPattern, CMatrix, InstanceParams, PilotMatrix};
use crate::stats::MetricEstimate;

#[derive(Clone, Debug, PartialEq)]
pub struct NnlsResult {
    pub minimizer: ActivityPattern,
    pub objective_value: f64,
    /// Objective of every pattern, indexed by [`ActivityPattern::index`].
    pub per_pattern_values: Option<Vec<f64>>,
}

fn check_dims(pilots: &PilotMatrix, sample_cov: &CMatrix) -> Result<()> {
    let m = pilots.m();
    if sample_cov.nrows() != m || sample_cov.ncols() != m {
        return Err(Error::InvalidDimension(format!(
            "covariance is {}x{}, pilots have M = {m}",
            sample_cov.nrows(),
            sample_cov.ncols()
        )));
    }
    Ok(())
}

/// `|| P Diag(alpha) P^H - cov ||_F^2`.
pub fn nnls_objective(pilots: &PilotMatrix, activity: &ActivityPattern, sample_cov: &CMatrix) -> Result<f64> {
    check_dims(pilots, sample_cov)?;
    if activity.len() != pilots.n() {
        return Err(Error::InvalidDimension(format!(
            "activity has {} entries, pilots have N = {}",
            activity.len(),
            pilots.n()
        )));
    }
    let mut model = -sample_cov.clone();
    for (i, p) in pilots.entries().column_iter().enumerate() {
        if activity.is_active(i) {
            model += &p * p.adjoint();
        }
    }
    Ok(model.iter().map(Complex64::norm_sqr).sum())
}

/// Precomputed quadratic form of the objective:
/// `f(alpha) = sum_ij alpha_i alpha_j G_ij - 2 sum_i alpha_i q_i + ||cov||^2`
/// with `G_ij = |p_i^H p_j|^2` and `q_i = p_i^H cov p_i`.
struct QuadraticForm {
    gram_sq: DMatrix<f64>,
    linear: Vec<f64>,
    constant: f64,
}

impl QuadraticForm {
    fn new(pilots: &PilotMatrix, sample_cov: &CMatrix) -> Self {
        let linear = pilots
            .entries()
            .column_iter()
            .map(|p| (p.adjoint() * sample_cov * p)[(0, 0)].re)
            .collect();
        Self {
            gram_sq: pilots.cross_correlation_sq(),
            linear,
            constant: sample_cov.iter().map(Complex64::norm_sqr).sum(),
        }
    }

    fn eval(&self, index: usize) -> f64 {
        let n = self.linear.len();
        let mut acc = self.constant;
        for i in (0..n).filter(|i| index >> i & 1 == 1) {
            acc -= 2.0 * self.linear[i];
            for j in (0..n).filter(|j| index >> j & 1 == 1) {
                acc += self.gram_sq[(i, j)];
            }
        }
        acc
    }
}

/// Exact minimizer over all `2^N` binary patterns. Ties go to the smallest
/// integer encoding.
pub fn brute_force_nnls(pilots: &PilotMatrix, sample_cov: &CMatrix) -> Result<NnlsResult> {
    search(pilots, sample_cov, false)
}

/// Like [`brute_force_nnls`] but keeps every pattern's objective value.
pub fn brute_force_nnls_retaining(pilots: &PilotMatrix, sample_cov: &CMatrix) -> Result<NnlsResult> {
    search(pilots, sample_cov, true)
}

fn search(pilots: &PilotMatrix, sample_cov: &CMatrix, retain: bool) -> Result<NnlsResult> {
    let n = pilots.n();
    check_enum_guard(n)?;
    check_dims(pilots, sample_cov)?;
    let form = QuadraticForm::new(pilots, sample_cov);
    let mut values = retain.then(|| Vec::with_capacity(1 << n));
    let (mut best, mut best_val) = (0usize, f64::INFINITY);
    for index in 0..1usize << n {
        // clamp the rounding residue of an exact fit
        let v = form.eval(index).max(0.0);
        if v < best_val {
            best = index;
            best_val = v;
        }
        if let Some(vals) = values.as_mut() {
            vals.push(v);
        }
    }
    Ok(NnlsResult {
        minimizer: ActivityPattern::from_index(n, best),
        objective_value: best_val,
        per_pattern_values: values,
    })
}

/// Monte-Carlo activity error-rate of the exhaustive detector.
///
/// Trial `t` draws everything from `RngStream::for_trial(master_seed, t)`;
/// per-trial error fractions are reduced in trial order.
pub fn estimate_aer(params: &InstanceParams, n_trials: usize, master_seed: u64, mode: ExecMode) -> Result<MetricEstimate> {
    let fractions = aer_samples(params, n_trials, master_seed, mode)?;
    Ok(MetricEstimate::from_samples(&fractions))
}

/// Per-trial bit-error fractions behind [`estimate_aer`].
pub fn aer_samples(params: &InstanceParams, n_trials: usize, master_seed: u64, mode: ExecMode) -> Result<Vec<f64>> {
    if n_trials == 0 {
        return Err(Error::InvalidParameter("n_trials must be >= 1".into()));
    }
    try_map_indexed(mode, n_trials, |t| {
        let inst = params.sample(RngStream::for_trial(master_seed, t))?;
        let est = brute_force_nnls(&inst.pilots, &inst.sample_cov)?;
        Ok(est.minimizer.hamming(&inst.activity) as f64 / params.n as f64)
    })
}
