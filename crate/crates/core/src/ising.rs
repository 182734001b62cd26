//! Ising form of the detection objective.
//!
//! With `sigma = 1 - 2 alpha` the NNLS objective equals
//! `-sum_{i<j} J_ij s_i s_j - sum_i b_i s_i` plus a pattern-independent
//! constant, where `J_ij = -|p_i^H p_j|^2 / 2` and
//! `b_i = -p_i^H cov p_i + sum_j |p_i^H p_j|^2 / 2` (the sum includes `j = i`).
//! The constant is never formed.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_enum_guard, Error, Result};
use crate::signal::{ActivityPattern, CMatrix, PilotMatrix};

/// Spin vector with entries `+1` (inactive) or `-1` (active).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpinConfig {
    spins: Vec<i8>,
}

impl SpinConfig {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(s) = spins.iter().find(|s| s.abs() != 1) {
            return Err(Error::InvalidParameter(format!("spin value {s} is not +-1")));
        }
        Ok(Self { spins })
    }

    /// Configuration whose user `i` is active iff bit `i` of `index` is set.
    pub fn from_index(n: usize, index: usize) -> Self {
        Self {
            spins: (0..n).map(|i| 1 - 2 * ((index >> i) & 1) as i8).collect(),
        }
    }

    /// Integer encoding of the associated activity pattern.
    pub fn index(&self) -> usize {
        self.spins
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &s)| acc | (((s < 0) as usize) << i))
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn flipped(&self) -> Self {
        Self {
            spins: self.spins.iter().map(|s| -s).collect(),
        }
    }
}

pub fn spins_from_activity(activity: &ActivityPattern) -> SpinConfig {
    SpinConfig {
        spins: activity.bits().iter().map(|&a| 1 - 2 * a as i8).collect(),
    }
}

pub fn activity_from_spins(config: &SpinConfig) -> ActivityPattern {
    ActivityPattern::new(config.spins.iter().map(|&s| ((1 - s) / 2) as u8).collect())
        .expect("spins are +-1 by construction")
}

/// Couplings and local fields of a classical Ising energy.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingProblem {
    couplings: DMatrix<f64>,
    fields: DVector<f64>,
}

impl IsingProblem {
    /// Checks that `couplings` is square, symmetric and zero on the diagonal.
    pub fn new(couplings: DMatrix<f64>, fields: DVector<f64>) -> Result<Self> {
        let n = fields.len();
        if couplings.nrows() != n || couplings.ncols() != n {
            return Err(Error::InvalidDimension(format!(
                "couplings are {}x{}, fields have length {n}",
                couplings.nrows(),
                couplings.ncols()
            )));
        }
        for i in 0..n {
            if couplings[(i, i)] != 0.0 {
                return Err(Error::InvalidParameter(format!("coupling J[{i},{i}] must be zero")));
            }
            for j in i + 1..n {
                if couplings[(i, j)] != couplings[(j, i)] {
                    return Err(Error::InvalidParameter(format!("couplings not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(Self { couplings, fields })
    }

    /// Uncoupled spins with the given fields.
    pub fn free(fields: Vec<f64>) -> Self {
        let n = fields.len();
        Self {
            couplings: DMatrix::zeros(n, n),
            fields: DVector::from_vec(fields),
        }
    }

    pub fn n(&self) -> usize {
        self.fields.len()
    }

    pub fn couplings(&self) -> &DMatrix<f64> {
        &self.couplings
    }

    pub fn fields(&self) -> &DVector<f64> {
        &self.fields
    }

    /// Energy of the configuration encoded by `index` (bit set = spin down).
    pub fn energy_of_index(&self, index: usize) -> f64 {
        let n = self.n();
        let spin = |i: usize| if index >> i & 1 == 1 { -1.0 } else { 1.0 };
        let mut e = 0.0;
        for i in 0..n {
            let si = spin(i);
            e -= self.fields[i] * si;
            for j in i + 1..n {
                e -= self.couplings[(i, j)] * si * spin(j);
            }
        }
        e
    }
}

/// Maps a pilot book and sample covariance to couplings and fields.
pub fn build_ising(pilots: &PilotMatrix, sample_cov: &CMatrix) -> Result<IsingProblem> {
    let (m, n) = (pilots.m(), pilots.n());
    if sample_cov.nrows() != m || sample_cov.ncols() != m {
        return Err(Error::InvalidDimension(format!(
            "covariance is {}x{}, pilots have M = {m}",
            sample_cov.nrows(),
            sample_cov.ncols()
        )));
    }
    let corr = pilots.cross_correlation_sq();
    let mut couplings = corr.scale(-0.5);
    couplings.fill_diagonal(0.0);
    // enforce exact symmetry; |p_i^H p_j|^2 can differ in the last ulp
    for i in 0..n {
        for j in i + 1..n {
            couplings[(j, i)] = couplings[(i, j)];
        }
    }
    let fields = DVector::from_iterator(
        n,
        pilots.entries().column_iter().enumerate().map(|(i, p)| {
            let trace = (p.adjoint() * sample_cov * p)[(0, 0)].re;
            -trace + 0.5 * corr.row(i).sum()
        }),
    );
    Ok(IsingProblem { couplings, fields })
}

pub fn ising_energy(problem: &IsingProblem, config: &SpinConfig) -> Result<f64> {
    let n = problem.n();
    if config.len() != n {
        return Err(Error::InvalidDimension(format!(
            "configuration has {} spins, problem has {n}",
            config.len()
        )));
    }
    let s = config.spins();
    let mut e = 0.0;
    for i in 0..n {
        let si = s[i] as f64;
        e -= problem.fields[i] * si;
        for j in i + 1..n {
            e -= problem.couplings[(i, j)] * si * s[j] as f64;
        }
    }
    Ok(e)
}

/// Exhaustive ground state; ties go to the smallest activity encoding.
pub fn ground_state(problem: &IsingProblem) -> Result<(SpinConfig, f64)> {
    let n = problem.n();
    check_enum_guard(n)?;
    let (mut best, mut best_e) = (0usize, f64::INFINITY);
    for index in 0..1usize << n {
        let e = problem.energy_of_index(index);
        if e < best_e {
            best = index;
            best_e = e;
        }
    }
    Ok((SpinConfig::from_index(n, best), best_e))
}
