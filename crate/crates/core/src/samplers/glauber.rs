use rand::seq::SliceRandom;
use rand::Rng;

use super::{ReadSet, SamplerRequest};
use crate::error::Result;
use crate::model::{Adjacency, SpinConfig};
use crate::rng::{self, StreamRng};

/// `1 / (1 + exp(beta dE))`.
#[inline]
pub fn glauber_acceptance(beta: f64, delta: f64) -> f64 {
    1.0 / (1.0 + (beta * delta).exp())
}

/// Single-spin-flip heat-bath chain over a subset of movable sites.
#[derive(Debug, Clone)]
pub struct GlauberChain {
    adjacency: Adjacency,
    spins: Vec<i8>,
    order: Vec<usize>,
    rng: StreamRng,
}

impl GlauberChain {
    pub fn new(adjacency: Adjacency, initial: &SpinConfig, movable: Vec<usize>, rng: StreamRng) -> Self {
        GlauberChain { adjacency, spins: initial.spins().to_vec(), order: movable, rng }
    }

    /// One sweep: every movable site proposed once, in a fresh random order.
    pub fn sweep(&mut self, beta: f64) {
        self.order.shuffle(&mut self.rng);
        for idx in 0..self.order.len() {
            let k = self.order[idx];
            let delta = self.adjacency.flip_delta(&self.spins, k);
            if self.rng.random::<f64>() < glauber_acceptance(beta, delta) {
                self.spins[k] = -self.spins[k];
            }
        }
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub(crate) fn spins_mut(&mut self) -> &mut Vec<i8> {
        &mut self.spins
    }

    pub fn config(&self) -> SpinConfig {
        SpinConfig::new(self.spins.clone()).expect("chain holds +/-1 spins")
    }

    pub fn energy(&self) -> f64 {
        self.adjacency.energy(&self.spins)
    }
}

pub fn glauber_sample(req: &SamplerRequest) -> Result<ReadSet> {
    req.validate()?;
    let mut chain = GlauberChain::new(
        req.instance.adjacency(),
        &req.initial,
        req.movable_sites(),
        rng::stream(req.seed, "sweep", &[0]),
    );
    for _ in 0..req.sweeps {
        chain.sweep(req.beta);
    }
    let spacing = req.spacing();
    let mut reads = Vec::with_capacity(req.n_samples);
    for _ in 0..req.n_samples {
        for _ in 0..spacing {
            chain.sweep(req.beta);
        }
        reads.push(chain.config());
    }
    Ok(ReadSet::from_request(req, "glauber", reads, Default::default()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn acceptance_values() {
        assert_eq!(glauber_acceptance(3.0, 0.0), 0.5);
        let p = glauber_acceptance(7.219, 1.93);
        let expect = 1.0 / (1.0 + 13.932_67f64.exp());
        assert!((p / expect - 1.0).abs() < 1e-4);
        assert!((p - 8.9e-7).abs() < 0.05e-7);
        assert_eq!(glauber_acceptance(1.0, 1e6), 0.0);
    }
}
