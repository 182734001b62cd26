use num_complex::Complex64;

use crate::error::{check_enum_guard, Error, Result};
use crate::ising::SpinConfig;

/// State vector over the `2^n` computational basis.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    amplitudes: Vec<Complex64>,
    n_qubits: usize,
}

impl QuantumState {
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidDimension(format!("state length {len} is not a power of two")));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_enum_guard(n_qubits)?;
        Ok(Self { amplitudes, n_qubits })
    }

    /// Ground state of the transverse field: every amplitude `2^{-n/2}`.
    pub fn uniform(n_qubits: usize) -> Result<Self> {
        check_enum_guard(n_qubits)?;
        let dim = 1usize << n_qubits;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(Self {
            amplitudes: vec![a; dim],
            n_qubits,
        })
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_enum_guard(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::InvalidParameter(format!("basis index {index} out of range")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes, n_qubits })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<sigma_z_i>` for every qubit.
    pub fn z_expectations(&self) -> Vec<f64> {
        let mut z = vec![0.0; self.n_qubits];
        for (s, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            for (i, zi) in z.iter_mut().enumerate() {
                if s >> i & 1 == 0 {
                    *zi += p;
                } else {
                    *zi -= p;
                }
            }
        }
        z
    }
}

/// `|<target|psi>|^2`.
pub fn success_probability(state: &QuantumState, target: &SpinConfig) -> f64 {
    assert_eq!(target.len(), state.n_qubits, "target size does not match the state");
    state.amplitudes[target.index()].norm_sqr()
}

/// `(1/N) sum_i truth_i <sigma_z_i>`; `(1 - d) / 2` is the expected fraction
/// of wrongly detected users.
pub fn detector_correlation(state: &QuantumState, truth: &SpinConfig) -> f64 {
    assert_eq!(truth.len(), state.n_qubits, "truth size does not match the state");
    let n = state.n_qubits as f64;
    state
        .z_expectations()
        .iter()
        .zip(truth.spins())
        .map(|(z, &s)| z * s as f64)
        .sum::<f64>()
        / n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_state_observables() {
        let truth = SpinConfig::from_index(5, 0b10110);
        let psi = QuantumState::basis(5, truth.index()).unwrap();
        assert_eq!(success_probability(&psi, &truth), 1.0);
        assert_eq!(detector_correlation(&psi, &truth), 1.0);
        assert_eq!(detector_correlation(&psi, &truth.flipped()), -1.0);
    }

    #[test]
    fn uniform_state_observables() {
        let psi = QuantumState::uniform(5).unwrap();
        let truth = SpinConfig::from_index(5, 9);
        assert!((success_probability(&psi, &truth) - 1.0 / 32.0).abs() < 1e-15);
        assert!(detector_correlation(&psi, &truth).abs() < 1e-15);
        let total: f64 = (0..32).map(|i| success_probability(&psi, &SpinConfig::from_index(5, i))).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_lengths() {
        assert!(QuantumState::from_amplitudes(vec![Complex64::new(1.0, 0.0); 3]).is_err());
        assert!(QuantumState::basis(3, 8).is_err());
        assert!(QuantumState::uniform(21).is_err());
    }
}
