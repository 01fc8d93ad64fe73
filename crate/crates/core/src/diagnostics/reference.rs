use serde::{Deserialize, Serialize};

use super::distribution::{tvd, SubsystemDistribution};
use crate::error::{Error, Result};
use crate::model::{IsingInstance, SpinConfig};

pub const MAX_REFERENCE_SUBSYSTEM: usize = 20;
pub const SENSITIVITY_POINTS: usize = 9;

/// `P(s_S) ~ exp(-beta H_P(s_S, s_E))` with the environment clamped to `env`
/// (spins listed in the order of [`IsingInstance::environment`]).
pub fn conditional_gibbs_reference(
    instance: &IsingInstance,
    beta: f64,
    env: &SpinConfig,
) -> Result<SubsystemDistribution> {
    let energies = conditional_energies(instance, env)?;
    Ok(boltzmann_over(instance.subsystem.clone(), &energies, beta))
}

/// Energies of all `2^|S|` subsystem configurations with `env` clamped.
pub fn conditional_energies(instance: &IsingInstance, env: &SpinConfig) -> Result<Vec<f64>> {
    let k = instance.subsystem.len();
    if k > MAX_REFERENCE_SUBSYSTEM {
        return Err(Error::Resource {
            what: "subsystem size for the conditional reference",
            value: k,
            cap: MAX_REFERENCE_SUBSYSTEM,
        });
    }
    let exact = instance.exact_energy();
    let mut spins = instance.compose(0, env)?.spins().to_vec();
    let mut raw = exact.raw(&spins);
    let mut energies = vec![0.0; 1 << k];
    let mut s_index = 0usize;
    energies[0] = exact.to_f64(raw);
    for step in 1..1usize << k {
        let m = step.trailing_zeros() as usize;
        let v = instance.subsystem[m];
        raw += exact.raw_flip_delta(&spins, v);
        spins[v] = -spins[v];
        s_index ^= 1 << m;
        energies[s_index] = exact.to_f64(raw);
    }
    Ok(energies)
}

/// Normalised `exp(-beta (E - E_min))`; the shift keeps every exponent <= 0.
pub fn boltzmann_over(subsystem: Vec<usize>, energies: &[f64], beta: f64) -> SubsystemDistribution {
    let e_min = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut probs: Vec<f64> = energies
        .iter()
        .map(|&e| if beta == 0.0 { 1.0 } else { (-beta * (e - e_min)).exp() })
        .collect();
    let z: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= z);
    SubsystemDistribution { subsystem, n_reads: 0, probs }
}

/// Expected TVD of an `n_reads` sample from its own distribution over `K`
/// outcomes: `1/2 sqrt(K / n_reads)`.
pub fn sampling_floor(k: usize, n_reads: u64) -> f64 {
    0.5 * (k as f64 / n_reads as f64).sqrt()
}

pub fn arrhenius_factor(beta: f64, gap: f64) -> f64 {
    beta * gap
}

/// `points` log-spaced values over `[center/3, 3 center]`.
pub fn log_grid(center: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![center];
    }
    (0..points)
        .map(|k| center * 3f64.powf(2.0 * k as f64 / (points - 1) as f64 - 1.0))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityPoint {
    pub beta: f64,
    pub d_tv: f64,
}

/// Distance from `measured` to the conditional reference at every grid
/// inverse temperature.
pub fn beta_sensitivity_sweep(
    measured: &SubsystemDistribution,
    instance: &IsingInstance,
    env: &SpinConfig,
    beta_center: f64,
    points: usize,
) -> Result<Vec<SensitivityPoint>> {
    if !(beta_center > 0.0) || points == 0 {
        return Err(Error::invalid("sensitivity sweep needs beta > 0 and at least one point"));
    }
    let energies = conditional_energies(instance, env)?;
    log_grid(beta_center, points)
        .into_iter()
        .map(|beta| {
            let reference = boltzmann_over(instance.subsystem.clone(), &energies, beta);
            Ok(SensitivityPoint { beta, d_tv: tvd(measured, &reference)? })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::InstanceParams;

    fn ferro(n: usize) -> IsingInstance {
        InstanceParams { n, subsystem_size: 4, lambda: 1.0, disorder: 0.0, frustration: 0.0, seed: 3 }
            .generate()
            .unwrap()
    }

    #[test]
    fn infinite_temperature_is_uniform() {
        let inst = ferro(8);
        let r = conditional_gibbs_reference(&inst, 0.0, &SpinConfig::all_up(4)).unwrap();
        assert!(r.probs.iter().all(|&p| p == 1.0 / 16.0));
    }

    #[test]
    fn cold_ferromagnet_follows_environment() {
        let inst = ferro(8);
        let up = conditional_gibbs_reference(&inst, 1e6, &SpinConfig::all_up(4)).unwrap();
        assert_eq!(up.probs[0], 1.0);
        let down = conditional_gibbs_reference(&inst, 1e6, &SpinConfig::all_down(4)).unwrap();
        assert_eq!(down.probs[15], 1.0);
    }

    #[test]
    fn conditional_energies_match_direct_evaluation() {
        let inst = InstanceParams { n: 10, subsystem_size: 4, lambda: 0.5, disorder: 1.0, frustration: 0.5, seed: 9 }
            .generate()
            .unwrap();
        let env = SpinConfig::new(vec![1, -1, -1, 1, 1, -1]).unwrap();
        let e = conditional_energies(&inst, &env).unwrap();
        for (s, &value) in e.iter().enumerate() {
            assert_eq!(value, inst.energy(&inst.compose(s, &env).unwrap()).unwrap());
        }
    }

    #[test]
    fn floor_examples() {
        assert!((sampling_floor(16, 6000) - 0.025820).abs() < 1e-6);
        assert_eq!(sampling_floor(4, 4), 0.5);
        assert_eq!(sampling_floor(2, 8), 0.25);
    }

    #[test]
    fn arrhenius_examples() {
        assert!((arrhenius_factor(7.219, 1.93) - 13.93267).abs() < 1e-9);
        assert_eq!(arrhenius_factor(5.0, 0.0), 0.0);
        assert!((arrhenius_factor(4.289, 1.93) - 8.27777).abs() < 1e-9);
    }

    #[test]
    fn grid_is_symmetric_in_log() {
        let g = log_grid(2.0, 9);
        assert!((g[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((g[4] - 2.0).abs() < 1e-15);
        assert!((g[8] - 6.0).abs() < 1e-14);
    }

    #[test]
    fn sweep_minimum_at_center_for_exact_reference() {
        let inst = InstanceParams { n: 8, subsystem_size: 4, lambda: 0.5, disorder: 1.0, frustration: 0.5, seed: 4 }
            .generate()
            .unwrap();
        let env = SpinConfig::all_up(4);
        let measured = conditional_gibbs_reference(&inst, 1.0, &env).unwrap();
        let sweep = beta_sensitivity_sweep(&measured, &inst, &env, 1.0, 9).unwrap();
        assert_eq!(sweep[4].d_tv, 0.0);
        assert!(sweep.iter().all(|p| p.d_tv >= 0.0));
    }
}
