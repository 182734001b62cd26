use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::QuantumState;
use crate::error::{check_enum_guard, Error, Result};
use crate::ising::IsingProblem;

/// Diagonal of the problem operator: entry `s` is the classical energy of
/// the configuration encoded by `s`.
pub fn problem_diagonal(problem: &IsingProblem) -> Result<Vec<f64>> {
    let n = problem.n();
    check_enum_guard(n)?;
    Ok((0..1usize << n).map(|s| problem.energy_of_index(s)).collect())
}

fn check_u(u: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::InvalidParameter(format!("control value u = {u} outside [0, 1]")));
    }
    Ok(())
}

/// `out = (alpha * D - shift) v + beta * H_C v` with `H_C = -sum_i sigma_x_i`,
/// applied matrix-free through bit flips.
#[inline]
pub(crate) fn apply_combination(
    diag: &[f64],
    n_qubits: usize,
    alpha: f64,
    beta: f64,
    shift: f64,
    v: &[Complex64],
    out: &mut [Complex64],
) {
    for ((o, x), d) in out.iter_mut().zip(v).zip(diag) {
        *o = x * (alpha * d - shift);
    }
    // pair (s, s ^ 2^i) blockwise so the inner loops are contiguous
    for i in 0..n_qubits {
        let half = 1usize << i;
        for (oc, vc) in out.chunks_exact_mut(2 * half).zip(v.chunks_exact(2 * half)) {
            let (olo, ohi) = oc.split_at_mut(half);
            let (vlo, vhi) = vc.split_at(half);
            for (o, x) in olo.iter_mut().zip(vhi) {
                *o -= x * beta;
            }
            for (o, x) in ohi.iter_mut().zip(vlo) {
                *o -= x * beta;
            }
        }
    }
}

/// `H(u) psi = (1 - u) (D .* psi) + u H_C psi`.
pub fn apply_hamiltonian(u: f64, diag: &[f64], state: &QuantumState) -> Result<Vec<Complex64>> {
    check_u(u)?;
    if diag.len() != state.dim() {
        return Err(Error::InvalidDimension(format!(
            "diagonal has length {}, state has {}",
            diag.len(),
            state.dim()
        )));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); state.dim()];
    apply_combination(diag, state.n_qubits(), 1.0 - u, u, 0.0, state.amplitudes(), &mut out);
    Ok(out)
}

/// Dense real symmetric matrix of `H(u)` for a diagonal of length `2^n`.
pub fn dense_hamiltonian(u: f64, diag: &[f64]) -> Result<DMatrix<f64>> {
    check_u(u)?;
    let dim = diag.len();
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::InvalidDimension(format!("diagonal length {dim} is not a power of two")));
    }
    let n = dim.trailing_zeros() as usize;
    check_enum_guard(n)?;
    let mut h = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        h[(s, s)] = (1.0 - u) * diag[s];
        for i in 0..n {
            h[(s, s ^ (1 << i))] -= u;
        }
    }
    Ok(h)
}
