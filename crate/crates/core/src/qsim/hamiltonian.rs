//! The pause-point transverse-field Ising operator, stored implicitly.
//!
//! In the z basis `H = D - g sum_k X_k` with `D = (B/2) diag(H_P)` and
//! `g = A/2`; `X_k` flips bit `k`, so every row has `n` off-diagonal entries
//! equal to `-g`.

use faer::Mat;

use super::schedule::ScheduleSpec;
use super::C64;
use crate::error::{Error, Result};
use crate::landscape;
use crate::model::IsingInstance;

/// Default qubit cap for building the operator.
pub const MAX_PAUSE_QUBITS: usize = 14;

#[derive(Debug, Clone, PartialEq)]
pub struct PauseHamiltonian {
    n: usize,
    diagonal: Vec<f64>,
    transverse: f64,
}

pub fn build_pause_hamiltonian(instance: &IsingInstance, schedule: &ScheduleSpec) -> Result<PauseHamiltonian> {
    PauseHamiltonian::new(instance, schedule.a_ghz, schedule.b_ghz, MAX_PAUSE_QUBITS)
}

impl PauseHamiltonian {
    pub fn new(instance: &IsingInstance, a: f64, b: f64, cap: usize) -> Result<Self> {
        if instance.n > cap {
            return Err(Error::Resource {
                what: "qubits for the pause Hamiltonian",
                value: instance.n,
                cap,
            });
        }
        if !(a >= 0.0 && b >= 0.0) {
            return Err(Error::invalid("energy scales must be non-negative"));
        }
        let table = landscape::enumerate(instance)?;
        let half_b = 0.5 * b;
        Ok(PauseHamiltonian {
            n: instance.n,
            diagonal: table.energies().iter().map(|&e| half_b * e).collect(),
            transverse: 0.5 * a,
        })
    }

    /// `-ratio sum X + H_P`, i.e. `H(s_p)` divided by `B/2`; energies are in
    /// units of the problem couplings, so a dimensionless `beta_eff` applies.
    pub fn dimensionless(instance: &IsingInstance, ratio: f64) -> Result<Self> {
        Self::new(instance, 2.0 * ratio, 2.0, MAX_PAUSE_QUBITS)
    }

    pub fn from_parts(n: usize, diagonal: Vec<f64>, transverse: f64) -> Result<Self> {
        if diagonal.len() != 1 << n {
            return Err(Error::invalid("diagonal length must be 2^n"));
        }
        Ok(PauseHamiltonian { n, diagonal, transverse })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// Off-diagonal amplitude magnitude `A/2`.
    pub fn transverse(&self) -> f64 {
        self.transverse
    }

    pub fn element(&self, row: usize, col: usize) -> f64 {
        if row == col {
            self.diagonal[row]
        } else if (row ^ col).count_ones() == 1 {
            -self.transverse
        } else {
            0.0
        }
    }

    /// `out = H x`.
    pub fn apply(&self, x: &[C64], out: &mut [C64]) {
        let g = self.transverse;
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = x[i] * self.diagonal[i];
            if g != 0.0 {
                let mut flips = C64::new(0.0, 0.0);
                for k in 0..self.n {
                    flips += x[i ^ (1 << k)];
                }
                acc -= flips * g;
            }
            *o = acc;
        }
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let radius = self.n as f64 * self.transverse.abs();
        let (lo, hi) = self
            .diagonal
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| (lo.min(d), hi.max(d)));
        (lo - radius, hi + radius)
    }

    /// `max |H_ij - conj(H_ji)|` over the stored sparsity pattern.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim() {
            for k in 0..self.n {
                let j = i ^ (1 << k);
                worst = worst.max((self.element(i, j) - self.element(j, i)).abs());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> Mat<f64> {
        Mat::from_fn(self.dim(), self.dim(), |i, j| self.element(i, j))
    }

    /// `<psi|H|psi>` for a normalised state.
    pub fn expectation(&self, psi: &[C64]) -> f64 {
        let mut h_psi = vec![C64::new(0.0, 0.0); psi.len()];
        self.apply(psi, &mut h_psi);
        psi.iter().zip(&h_psi).map(|(a, b)| (a.conj() * b).re).sum()
    }
}
