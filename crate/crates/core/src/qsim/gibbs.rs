use faer::Side;

use super::hamiltonian::PauseHamiltonian;
use crate::diagnostics::{check_indices, pack, SubsystemDistribution};
use crate::error::{Error, Result};
use crate::model::SpinConfig;

/// Qubit cap for the full eigendecomposition.
pub const MAX_GIBBS_QUBITS: usize = 12;

/// z-basis diagonal of `exp(-beta H) / Tr exp(-beta H)`.
pub fn quantum_gibbs_diag(h: &PauseHamiltonian, beta: f64) -> Result<Vec<f64>> {
    if h.n() > MAX_GIBBS_QUBITS {
        return Err(Error::Resource {
            what: "qubits for the quantum Gibbs state",
            value: h.n(),
            cap: MAX_GIBBS_QUBITS,
        });
    }
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::invalid("beta must be finite and non-negative"));
    }
    let eig = h
        .to_dense()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Integration(format!("eigendecomposition failed: {e:?}")))?;
    let u = eig.U();
    let lam = eig.S().column_vector();
    let dim = h.dim();
    let lam_min = (0..dim).map(|k| lam[k]).fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = (0..dim).map(|k| (-beta * (lam[k] - lam_min)).exp()).collect();
    let z: f64 = weights.iter().sum();
    let mut diag = vec![0.0; dim];
    for k in 0..dim {
        let w = weights[k] / z;
        if w == 0.0 {
            continue;
        }
        let col = u.col(k);
        for (i, d) in diag.iter_mut().enumerate() {
            *d += w * col[i] * col[i];
        }
    }
    // absorb rounding so the vector sums to one
    let total: f64 = diag.iter().sum();
    diag.iter_mut().for_each(|d| *d /= total);
    Ok(diag)
}

fn qubits_of(diag: &[f64]) -> Result<usize> {
    if !diag.len().is_power_of_two() {
        return Err(Error::invalid("diagonal length must be a power of two"));
    }
    Ok(diag.len().trailing_zeros() as usize)
}

/// Marginal on `subsystem` of the slice consistent with `env`, renormalised.
/// `env` lists the complement of `subsystem` in ascending vertex order.
pub fn conditional_quantum_marginal(
    diag: &[f64],
    subsystem: &[usize],
    env: &SpinConfig,
) -> Result<SubsystemDistribution> {
    let n = qubits_of(diag)?;
    check_indices(subsystem, n)?;
    let environment: Vec<usize> = (0..n).filter(|v| subsystem.binary_search(v).is_err()).collect();
    if env.len() != environment.len() {
        return Err(Error::invalid(format!(
            "environment configuration has {} spins, |E| = {}",
            env.len(),
            environment.len()
        )));
    }
    let mut env_bits = 0usize;
    let mut env_mask = 0usize;
    for (m, &v) in environment.iter().enumerate() {
        env_mask |= 1 << v;
        if env.get(m) < 0 {
            env_bits |= 1 << v;
        }
    }
    let mut probs = vec![0.0; 1 << subsystem.len()];
    for (idx, &p) in diag.iter().enumerate() {
        if idx & env_mask == env_bits {
            probs[pack(idx, subsystem)] += p;
        }
    }
    let total: f64 = probs.iter().sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateCondition(format!(
            "environment slice {env} carries no weight"
        )));
    }
    probs.iter_mut().for_each(|p| *p /= total);
    SubsystemDistribution::new(subsystem.to_vec(), probs, 0)
}

pub fn unconditional_quantum_marginal(diag: &[f64], subsystem: &[usize]) -> Result<SubsystemDistribution> {
    let n = qubits_of(diag)?;
    SubsystemDistribution::marginal_of(diag, n, subsystem)
}
