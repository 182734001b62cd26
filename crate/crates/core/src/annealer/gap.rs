use nalgebra::SymmetricEigen;

use super::hamiltonian::{dense_hamiltonian, problem_diagonal};
use super::interp::MonotoneCubic;
use crate::error::{Error, Result};
use crate::ising::{build_ising, IsingProblem};
use crate::par::{try_map_indexed, ExecMode};
use crate::rng::RngStream;
use crate::signal::{InstanceParams, PilotScheme};

/// Gaps below this are treated as degenerate.
pub const DEGENERATE_GAP: f64 = 1e-12;
/// Squared gap substituted for degenerate samples.
pub const GAP_SQ_FLOOR: f64 = 1e-24;

/// Squared distance between the two lowest eigenvalues of `H(u)`.
pub fn spectral_gap_squared(problem: &IsingProblem, u: f64) -> Result<f64> {
    spectral_gap_squared_diag(&problem_diagonal(problem)?, u)
}

/// As [`spectral_gap_squared`], starting from a precomputed diagonal.
pub fn spectral_gap_squared_diag(diag: &[f64], u: f64) -> Result<f64> {
    let (e0, e1) = lowest_pair(diag, u)?;
    Ok((e1 - e0).powi(2))
}

fn lowest_pair(diag: &[f64], u: f64) -> Result<(f64, f64)> {
    if diag.len() < 2 {
        return Err(Error::InvalidDimension("gap needs at least one qubit".into()));
    }
    let h = dense_hamiltonian(u, diag)?;
    let eig = SymmetricEigen::try_new(h, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical(format!("symmetric eigensolver did not converge at u = {u}")))?;
    let (mut e0, mut e1) = (f64::INFINITY, f64::INFINITY);
    for &e in eig.eigenvalues.iter() {
        if e.is_nan() {
            return Err(Error::Numerical(format!("NaN eigenvalue at u = {u}")));
        }
        if e < e0 {
            e1 = e0;
            e0 = e;
        } else if e < e1 {
            e1 = e;
        }
    }
    Ok((e0, e1))
}

/// Provenance of an estimated profile.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileMeta {
    pub scheme: PilotScheme,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub n_samples: usize,
    pub master_seed: u64,
}

/// Tabulated mean squared gap over the control parameter `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct GapProfile {
    u_grid: Vec<f64>,
    gap_sq: Vec<f64>,
    gap_sq_stderr: Vec<f64>,
    pub meta: Option<ProfileMeta>,
    /// Number of (sample, grid point) pairs whose gap was floored.
    pub degenerate_events: usize,
}

impl GapProfile {
    /// Validates the grid (sorted, endpoints 0 and 1) and positivity.
    pub fn new(u_grid: Vec<f64>, gap_sq: Vec<f64>) -> Result<Self> {
        let stderr = vec![0.0; gap_sq.len()];
        Self::with_stderr(u_grid, gap_sq, stderr)
    }

    pub fn with_stderr(u_grid: Vec<f64>, gap_sq: Vec<f64>, gap_sq_stderr: Vec<f64>) -> Result<Self> {
        if u_grid.len() < 2 || u_grid.len() != gap_sq.len() || gap_sq_stderr.len() != gap_sq.len() {
            return Err(Error::InvalidProfile(format!(
                "grid has {} points, gap values {}, stderr values {}",
                u_grid.len(),
                gap_sq.len(),
                gap_sq_stderr.len()
            )));
        }
        let increasing = u_grid.windows(2).all(|w| w[1] > w[0]);
        let decreasing = u_grid.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return Err(Error::InvalidProfile("u grid must be strictly sorted".into()));
        }
        let (lo, hi) = if increasing {
            (u_grid[0], u_grid[u_grid.len() - 1])
        } else {
            (u_grid[u_grid.len() - 1], u_grid[0])
        };
        if lo != 0.0 || hi != 1.0 {
            return Err(Error::InvalidProfile(format!("u grid spans [{lo}, {hi}], need [0, 1]")));
        }
        if let Some((i, g)) = gap_sq.iter().enumerate().find(|(_, g)| !(**g > 0.0) || !g.is_finite()) {
            return Err(Error::InvalidProfile(format!("gap_sq[{i}] = {g} is not positive")));
        }
        Ok(Self {
            u_grid,
            gap_sq,
            gap_sq_stderr,
            meta: None,
            degenerate_events: 0,
        })
    }

    /// Profile with the same squared gap everywhere.
    pub fn constant(gap_sq: f64, points: usize) -> Result<Self> {
        Self::new(super::uniform_grid(points), vec![gap_sq; points])
    }

    pub fn u_grid(&self) -> &[f64] {
        &self.u_grid
    }

    pub fn gap_sq(&self) -> &[f64] {
        &self.gap_sq
    }

    pub fn gap_sq_stderr(&self) -> &[f64] {
        &self.gap_sq_stderr
    }

    pub fn interpolant(&self) -> MonotoneCubic {
        MonotoneCubic::new(&self.u_grid, &self.gap_sq).expect("grid validated at construction")
    }
}

/// Mean squared gap over noiseless instances of one pilot scheme.
///
/// Sample `t` draws pilots, activity and channel from
/// `RngStream::for_trial(master_seed, t)` with the noise forced to zero.
pub fn estimate_mean_gap(
    params: &InstanceParams,
    n_samples: usize,
    u_grid: &[f64],
    master_seed: u64,
    mode: ExecMode,
) -> Result<GapProfile> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be >= 1".into()));
    }
    // validates the grid before any sampling
    GapProfile::new(u_grid.to_vec(), vec![1.0; u_grid.len()])?;
    let noiseless = params.with_snr(f64::INFINITY);
    let per_sample = try_map_indexed(mode, n_samples, |t| -> Result<(Vec<f64>, usize)> {
        let inst = noiseless.sample(RngStream::for_trial(master_seed, t))?;
        let diag = problem_diagonal(&build_ising(&inst.pilots, &inst.sample_cov)?)?;
        let mut degenerate = 0;
        let gaps = u_grid
            .iter()
            .map(|&u| {
                let (e0, e1) = lowest_pair(&diag, u)?;
                let gap = e1 - e0;
                Ok(if gap < DEGENERATE_GAP {
                    degenerate += 1;
                    GAP_SQ_FLOOR
                } else {
                    gap * gap
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok((gaps, degenerate))
    })?;

    let ns = n_samples as f64;
    let points = u_grid.len();
    let mut mean = vec![0.0; points];
    let mut stderr = vec![0.0; points];
    for (gaps, _) in &per_sample {
        for (m, g) in mean.iter_mut().zip(gaps) {
            *m += g;
        }
    }
    mean.iter_mut().for_each(|m| *m /= ns);
    if n_samples > 1 {
        for (gaps, _) in &per_sample {
            for ((s, g), m) in stderr.iter_mut().zip(gaps).zip(&mean) {
                *s += (g - m).powi(2);
            }
        }
        stderr.iter_mut().for_each(|s| *s = (*s / (ns - 1.0) / ns).sqrt());
    }
    let mut profile = GapProfile::with_stderr(u_grid.to_vec(), mean, stderr)?;
    profile.degenerate_events = per_sample.iter().map(|(_, d)| d).sum();
    profile.meta = Some(ProfileMeta {
        scheme: params.scheme,
        m: params.m,
        n: params.n,
        k: params.k,
        n_samples,
        master_seed,
    });
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transverse_limit_gap_is_two() {
        let p = IsingProblem::free(vec![0.3, -1.2, 0.7]);
        assert!((spectral_gap_squared(&p, 1.0).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn single_spin_closed_form() {
        let b = 0.6;
        let p = IsingProblem::free(vec![b]);
        for u in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let exact = 4.0 * ((1.0 - u) * (1.0 - u) * b * b + u * u);
            assert!((spectral_gap_squared(&p, u).unwrap() - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn classical_limit_matches_enumeration() {
        let p = IsingProblem::free(vec![0.5, 0.2, -0.9]);
        let mut e: Vec<f64> = (0..8).map(|s| p.energy_of_index(s)).collect();
        e.sort_by(f64::total_cmp);
        let g = spectral_gap_squared(&p, 0.0).unwrap();
        assert!((g - (e[1] - e[0]).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn profile_validation() {
        assert!(GapProfile::new(vec![0.0, 0.5, 1.0], vec![1.0, 0.0, 1.0]).is_err());
        assert!(GapProfile::new(vec![0.0, 0.5, 0.9], vec![1.0; 3]).is_err());
        assert!(GapProfile::new(vec![0.0, 0.6, 0.5, 1.0], vec![1.0; 4]).is_err());
        assert!(GapProfile::new(vec![1.0, 0.5, 0.0], vec![1.0; 3]).is_ok());
        assert!(GapProfile::constant(2.0, 5).is_ok());
    }

    #[test]
    fn rejects_zero_samples() {
        let params = InstanceParams::noiseless(PilotScheme::Gaussian, 4, 5, 100);
        assert!(estimate_mean_gap(&params, 0, &[0.0, 1.0], 1, ExecMode::Sequential).is_err());
    }
}
