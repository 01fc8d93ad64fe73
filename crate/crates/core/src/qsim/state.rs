use super::C64;
use crate::diagnostics::SubsystemDistribution;
use crate::error::{Error, Result};
use crate::model::SpinConfig;

pub const NORM_TOLERANCE: f64 = 1e-10;

/// Pure state in the z basis (qubit 0 least significant, bit 0 = spin +1).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn basis(config: &SpinConfig) -> Self {
        let n = config.len();
        let mut amplitudes = vec![C64::new(0.0, 0.0); 1 << n];
        amplitudes[config.index()] = C64::new(1.0, 0.0);
        StateVector { n, amplitudes }
    }

    pub fn new(n: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != 1 << n {
            return Err(Error::invalid(format!(
                "state has {} amplitudes, expected 2^{n}",
                amplitudes.len()
            )));
        }
        let state = StateVector { n, amplitudes };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::invalid(format!("state norm {norm} is not 1")));
        }
        Ok(state)
    }

    /// Wraps amplitudes produced by a propagator without re-checking the norm.
    pub(crate) fn from_raw(n: usize, amplitudes: Vec<C64>) -> Self {
        StateVector { n, amplitudes }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// `P_S(sigma_S) = sum_{sigma_E} |<sigma_S sigma_E|psi>|^2`.
pub fn z_marginal(psi: &StateVector, subsystem: &[usize]) -> Result<SubsystemDistribution> {
    SubsystemDistribution::marginal_of(&psi.probabilities(), psi.n, subsystem)
}
