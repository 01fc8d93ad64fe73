use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map};

use super::glauber::GlauberChain;
use super::{ReadSet, SamplerRequest};
use crate::error::{Error, Result};
use crate::rng;

pub const DEFAULT_T_MAX_RATIO: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PtSettings {
    pub n_replicas: usize,
    pub t_max_ratio: f64,
}

impl Default for PtSettings {
    fn default() -> Self {
        PtSettings { n_replicas: 20, t_max_ratio: DEFAULT_T_MAX_RATIO }
    }
}

/// Inverse temperatures of a geometric ladder from `T = 1/beta` up to
/// `t_max_ratio / beta`, coldest first.
pub fn geometric_ladder(beta: f64, n_replicas: usize, t_max_ratio: f64) -> Result<Vec<f64>> {
    if n_replicas == 0 {
        return Err(Error::invalid("ladder needs at least one replica"));
    }
    if !(t_max_ratio >= 1.0) || !t_max_ratio.is_finite() {
        return Err(Error::invalid(format!("T_max_ratio must be finite and >= 1, got {t_max_ratio}")));
    }
    if n_replicas == 1 {
        return Ok(vec![beta]);
    }
    Ok((0..n_replicas)
        .map(|r| beta / t_max_ratio.powf(r as f64 / (n_replicas - 1) as f64))
        .collect())
}

/// `min(1, exp((beta_i - beta_j)(E_i - E_j)))`.
pub fn swap_acceptance(beta_i: f64, beta_j: f64, e_i: f64, e_j: f64) -> f64 {
    ((beta_i - beta_j) * (e_i - e_j)).exp().min(1.0)
}

/// Replica exchange over a geometric ladder. One round is a Glauber sweep of
/// every replica followed by swap proposals for each adjacent pair; the
/// sweep budget counts rounds, i.e. sweeps per replica. Reads come from the
/// coldest replica.
pub fn parallel_tempering_sample(req: &SamplerRequest, settings: &PtSettings) -> Result<ReadSet> {
    req.validate()?;
    let betas = geometric_ladder(req.beta, settings.n_replicas, settings.t_max_ratio)?;
    let adjacency = req.instance.adjacency();
    let movable = req.movable_sites();
    let mut chains: Vec<GlauberChain> = (0..betas.len())
        .map(|r| GlauberChain::new(adjacency.clone(), &req.initial, movable.clone(), rng::stream(req.seed, "sweep", &[r as u64])))
        .collect();
    let mut swap_rng = rng::stream(req.seed, "swap", &[0]);
    let mut proposed = vec![0u64; betas.len().saturating_sub(1)];
    let mut accepted = vec![0u64; betas.len().saturating_sub(1)];

    let mut round = |chains: &mut Vec<GlauberChain>| {
        for (chain, &beta) in chains.iter_mut().zip(&betas) {
            chain.sweep(beta);
        }
        if chains.len() < 2 {
            return;
        }
        let mut energies: Vec<f64> = chains.iter().map(|c| c.energy()).collect();
        for i in 0..chains.len() - 1 {
            proposed[i] += 1;
            let p = swap_acceptance(betas[i], betas[i + 1], energies[i], energies[i + 1]);
            if swap_rng.random::<f64>() < p {
                accepted[i] += 1;
                let (lo, hi) = chains.split_at_mut(i + 1);
                std::mem::swap(lo[i].spins_mut(), hi[0].spins_mut());
                energies.swap(i, i + 1);
            }
        }
    };
    for _ in 0..req.sweeps {
        round(&mut chains);
    }
    let spacing = req.spacing();
    let mut reads = Vec::with_capacity(req.n_samples);
    for _ in 0..req.n_samples {
        for _ in 0..spacing {
            round(&mut chains);
        }
        reads.push(chains[0].config());
    }
    let rates: Vec<f64> = proposed
        .iter()
        .zip(&accepted)
        .map(|(&p, &a)| if p == 0 { 0.0 } else { a as f64 / p as f64 })
        .collect();
    let mut extra = Map::new();
    extra.insert("n_replicas".into(), json!(settings.n_replicas));
    extra.insert("t_max_ratio".into(), json!(settings.t_max_ratio));
    extra.insert("sweep_accounting".into(), json!("per-replica"));
    extra.insert("swap_acceptance".into(), json!(rates));
    Ok(ReadSet::from_request(req, "pt", reads, extra))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_shape() {
        let b = geometric_ladder(7.2, 5, 16.0).unwrap();
        assert_eq!(b[0], 7.2);
        assert!((b[4] - 7.2 / 16.0).abs() < 1e-12);
        assert!((b[1] / b[0] - b[2] / b[1]).abs() < 1e-12);
        assert!(geometric_ladder(1.0, 0, 2.0).is_err());
        assert!(geometric_ladder(1.0, 3, 0.5).is_err());
    }

    #[test]
    fn equal_temperatures_always_swap() {
        assert_eq!(swap_acceptance(2.0, 2.0, -5.0, 3.0), 1.0);
        // a colder replica holding the higher energy always swaps
        assert_eq!(swap_acceptance(2.0, 1.0, 1.0, -1.0), 1.0);
        assert!((swap_acceptance(2.0, 1.0, -1.0, 1.0) - (-2.0f64).exp()).abs() < 1e-15);
    }
}
