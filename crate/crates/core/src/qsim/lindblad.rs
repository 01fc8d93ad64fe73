//! Open-system evolution at the pause point.
//!
//! Jump operators are the per-qubit lowering and raising operators written
//! in the eigenbasis of `H` and resolved into single eigen-transitions
//! `|a><b|`. A transition with energy change `w = E_a - E_b` runs at rate
//! `gamma` downhill (`w <= 0`) and `gamma exp(-beta w)` uphill, so the
//! Gibbs state of `H` at `beta` is stationary. With one operator per
//! transition the generator keeps eigenbasis populations and coherences
//! apart: populations follow a rate equation, integrated here with
//! fixed-step RK4, and each coherence rotates and decays in closed form.

use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use super::hamiltonian::{PauseHamiltonian, MAX_PAUSE_QUBITS};
use super::propagate::natural_time;
use super::schedule::ScheduleSpec;
use super::state::StateVector;
use super::C64;
use crate::diagnostics::SubsystemDistribution;
use crate::error::{Error, Result};
use crate::model::{IsingInstance, SpinConfig};

pub const MAX_LINDBLAD_QUBITS: usize = 8;
pub const TRACE_TOLERANCE: f64 = 1e-6;
pub const POSITIVITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LindbladSettings {
    /// Bath inverse temperature in 1/GHz (same units as `H`).
    pub beta: f64,
    /// Downhill transition rate per qubit, in GHz (natural units).
    pub gamma: f64,
    /// Largest `rate * dt` allowed in one RK4 step.
    pub max_rate_step: f64,
}

impl LindbladSettings {
    pub fn new(beta: f64, gamma: f64) -> Self {
        LindbladSettings { beta, gamma, max_rate_step: 0.05 }
    }
}

/// Bath inverse temperature in 1/GHz for a dimensionless `beta_eff` that
/// multiplies `H_P` while the device applies `(B/2) H_P`.
pub fn bath_beta(beta_eff: f64, b_ghz: f64) -> f64 {
    2.0 * beta_eff / b_ghz
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LindbladStats {
    pub steps: usize,
    pub max_trace_drift: f64,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Mat<C64>,
}

impl DensityMatrix {
    pub fn pure(config: &SpinConfig) -> Self {
        Self::from_state(&StateVector::basis(config))
    }

    pub fn from_state(psi: &StateVector) -> Self {
        let a = psi.amplitudes();
        DensityMatrix {
            n: psi.n(),
            data: Mat::from_fn(a.len(), a.len(), |i, j| a[i] * a[j].conj()),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.data
    }

    pub fn trace(&self) -> C64 {
        (0..self.data.nrows()).map(|i| self.data[(i, i)]).sum()
    }

    /// z-basis populations.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.data.nrows()).map(|i| self.data[(i, i)].re).collect()
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let vals = self
            .data
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Integration(format!("eigenvalue solver failed: {e:?}")))?;
        Ok(vals.into_iter().fold(f64::INFINITY, f64::min))
    }

    pub fn z_marginal(&self, subsystem: &[usize]) -> Result<SubsystemDistribution> {
        let mut diag = self.diagonal();
        diag.iter_mut().for_each(|p| *p = p.max(0.0));
        let total: f64 = diag.iter().sum();
        diag.iter_mut().for_each(|p| *p /= total);
        SubsystemDistribution::marginal_of(&diag, self.n, subsystem)
    }
}

/// Evolve `rho0` for `t_us` under the pause-point Hamiltonian of `instance`.
pub fn lindblad_evolve(
    instance: &IsingInstance,
    schedule: &ScheduleSpec,
    rho0: &DensityMatrix,
    settings: &LindbladSettings,
) -> Result<(DensityMatrix, LindbladStats)> {
    if instance.n > MAX_LINDBLAD_QUBITS {
        return Err(Error::Resource {
            what: "qubits for Lindblad evolution",
            value: instance.n,
            cap: MAX_LINDBLAD_QUBITS,
        });
    }
    let h = PauseHamiltonian::new(instance, schedule.a_ghz, schedule.b_ghz, MAX_PAUSE_QUBITS)?;
    lindblad_evolve_operator(&h, rho0, settings, natural_time(schedule.t_p_us))
}

/// Same as [`lindblad_evolve`] for an explicit operator and a time in
/// natural units.
pub fn lindblad_evolve_operator(
    h: &PauseHamiltonian,
    rho0: &DensityMatrix,
    settings: &LindbladSettings,
    t: f64,
) -> Result<(DensityMatrix, LindbladStats)> {
    let n = h.n();
    if n > MAX_LINDBLAD_QUBITS {
        return Err(Error::Resource { what: "qubits for Lindblad evolution", value: n, cap: MAX_LINDBLAD_QUBITS });
    }
    if rho0.n != n {
        return Err(Error::invalid("density matrix and operator sizes differ"));
    }
    if !(settings.gamma >= 0.0) || !(settings.beta >= 0.0) || !(settings.max_rate_step > 0.0) {
        return Err(Error::invalid("gamma, beta and max_rate_step must be non-negative"));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid("evolution time must be finite and non-negative"));
    }
    let dim = h.dim();
    let eig = h
        .to_dense()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Integration(format!("eigendecomposition failed: {e:?}")))?;
    let lam: Vec<f64> = (0..dim).map(|k| eig.S().column_vector()[k]).collect();
    let u = Mat::from_fn(dim, dim, |i, j| C64::new(eig.U()[(i, j)], 0.0));
    let ut = u.transpose().to_owned();
    let mut rho = &ut * rho0.data.as_ref() * &u;

    // transition rates w[a][b] for b -> a and per-qubit lowering-operator
    // diagonals for the dephasing of coherences
    let mut rates = vec![0.0; dim * dim];
    let mut dephasing = vec![0.0; dim * dim];
    if settings.gamma > 0.0 {
        let ureal = eig.U();
        for k in 0..n {
            let bit = 1usize << k;
            // lowering sends bit k from 0 (up) to 1 (down)
            let lowered = Mat::from_fn(dim, dim, |i, j| if i & bit != 0 { ureal[(i ^ bit, j)] } else { 0.0 });
            let s = ureal.transpose() * &lowered;
            for a in 0..dim {
                for b in 0..dim {
                    if a != b {
                        let w = lam[a] - lam[b];
                        let r = if w <= 0.0 { settings.gamma } else { settings.gamma * (-settings.beta * w).exp() };
                        rates[a * dim + b] += r * (s[(a, b)].powi(2) + s[(b, a)].powi(2));
                    }
                    let d = s[(a, a)] - s[(b, b)];
                    dephasing[a * dim + b] += settings.gamma * d * d;
                }
            }
        }
    }
    let out: Vec<f64> = (0..dim).map(|b| (0..dim).filter(|&a| a != b).map(|a| rates[a * dim + b]).sum()).collect();

    let mut stats = LindbladStats::default();
    let max_out = out.iter().cloned().fold(0.0, f64::max);
    let steps = if max_out > 0.0 && t > 0.0 {
        (t * max_out / settings.max_rate_step).ceil().max(1.0) as usize
    } else {
        0
    };
    let mut pops: Vec<f64> = (0..dim).map(|a| rho[(a, a)].re).collect();
    let trace0: f64 = pops.iter().sum();
    if steps > 0 {
        let dt = t / steps as f64;
        let deriv = |p: &[f64], d: &mut [f64]| {
            for a in 0..dim {
                let row = &rates[a * dim..(a + 1) * dim];
                let gain: f64 = row.iter().zip(p).map(|(w, x)| w * x).sum();
                d[a] = gain - out[a] * p[a];
            }
        };
        let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
        let mut tmp = vec![0.0; dim];
        for _ in 0..steps {
            deriv(&pops, &mut k1);
            for i in 0..dim {
                tmp[i] = pops[i] + 0.5 * dt * k1[i];
            }
            deriv(&tmp, &mut k2);
            for i in 0..dim {
                tmp[i] = pops[i] + 0.5 * dt * k2[i];
            }
            deriv(&tmp, &mut k3);
            for i in 0..dim {
                tmp[i] = pops[i] + dt * k3[i];
            }
            deriv(&tmp, &mut k4);
            for i in 0..dim {
                pops[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            let drift = (pops.iter().sum::<f64>() - trace0).abs();
            stats.max_trace_drift = stats.max_trace_drift.max(drift);
            if drift > TRACE_TOLERANCE {
                return Err(Error::Integration(format!(
                    "trace drifted by {drift:.3e}; reduce max_rate_step"
                )));
            }
        }
        stats.steps = steps;
    }
    for a in 0..dim {
        for b in 0..dim {
            if a == b {
                rho[(a, a)] = C64::new(pops[a], 0.0);
            } else {
                let decay = 0.5 * (out[a] + out[b]) + dephasing[a * dim + b];
                let factor = C64::from_polar((-decay * t).exp(), -(lam[a] - lam[b]) * t);
                rho[(a, b)] *= factor;
            }
        }
    }
    let data = &u * &rho * &ut;
    let result = DensityMatrix { n, data };
    let trace = result.trace();
    if (trace.re - 1.0).abs() > TRACE_TOLERANCE || trace.im.abs() > TRACE_TOLERANCE {
        return Err(Error::Integration(format!("final trace {trace} deviates from 1")));
    }
    stats.min_eigenvalue = result.min_eigenvalue()?;
    if stats.min_eigenvalue < -POSITIVITY_TOLERANCE {
        return Err(Error::Integration(format!(
            "density matrix lost positivity (eigenvalue {:.3e})",
            stats.min_eigenvalue
        )));
    }
    Ok((result, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::propagate::{evolve_with, PropagationSettings};

    #[test]
    fn closed_system_matches_unitary_propagation() {
        let inst = crate::model::InstanceParams {
            n: 6,
            subsystem_size: 3,
            lambda: 0.5,
            disorder: 1.0,
            frustration: 0.5,
            seed: 8,
        }
        .generate()
        .unwrap();
        let h = PauseHamiltonian::new(&inst, 0.65, 2.5, 14).unwrap();
        let config = SpinConfig::all_up(6);
        let t = 37.0;
        let (rho, _) =
            lindblad_evolve_operator(&h, &DensityMatrix::pure(&config), &LindbladSettings::new(1.0, 0.0), t).unwrap();
        let psi = evolve_with(&h, &StateVector::basis(&config), t, &PropagationSettings::default()).unwrap().0;
        let expect = DensityMatrix::from_state(&psi);
        let mut worst: f64 = 0.0;
        for i in 0..64 {
            for j in 0..64 {
                worst = worst.max((rho.matrix()[(i, j)] - expect.matrix()[(i, j)]).norm());
            }
        }
        assert!(worst < 1e-7, "{worst}");
    }

    #[test]
    fn single_qubit_relaxes_to_gibbs() {
        let h = PauseHamiltonian::from_parts(1, vec![0.3, -0.3], 0.2).unwrap();
        let beta = 2.0;
        let (rho, stats) =
            lindblad_evolve_operator(&h, &DensityMatrix::pure(&SpinConfig::all_up(1)), &LindbladSettings::new(beta, 0.05), 2000.0)
                .unwrap();
        assert!(stats.max_trace_drift < 1e-12);
        // analytic Gibbs state of [[0.3, -0.2], [-0.2, -0.3]]
        let e = (0.3f64 * 0.3 + 0.2 * 0.2).sqrt();
        let z = 2.0 * (beta * e).cosh();
        let gibbs_00 = ((beta * e).cosh() - 0.3 / e * (beta * e).sinh()) / z;
        let gibbs_01 = (0.2 / e * (beta * e).sinh()) / z;
        assert!((rho.matrix()[(0, 0)].re - gibbs_00).abs() < 1e-4);
        assert!((rho.matrix()[(0, 1)].re - gibbs_01).abs() < 1e-4);
        assert!(rho.matrix()[(0, 1)].im.abs() < 1e-4);
    }

    #[test]
    fn cap() {
        let h = PauseHamiltonian::from_parts(9, vec![0.0; 512], 0.1).unwrap();
        let rho = DensityMatrix::pure(&SpinConfig::all_up(9));
        assert!(matches!(
            lindblad_evolve_operator(&h, &rho, &LindbladSettings::new(1.0, 0.1), 1.0),
            Err(Error::Resource { .. })
        ));
    }
}
