use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SpinConfig;

pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Probability vector over the `2^|S|` subsystem configurations.
///
/// Entry `k` is the configuration whose bit `m` gives the spin of
/// `subsystem[m]` (bit 0 = `+1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsystemDistribution {
    pub subsystem: Vec<usize>,
    /// Number of reads behind an empirical distribution; 0 for exact ones.
    pub n_reads: u64,
    pub probs: Vec<f64>,
}

pub(crate) fn check_indices(indices: &[usize], n: usize) -> Result<()> {
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("subsystem indices must be strictly increasing"));
    }
    if let Some(&last) = indices.last() {
        if last >= n {
            return Err(Error::invalid(format!("subsystem index {last} out of range for n = {n}")));
        }
    }
    Ok(())
}

impl SubsystemDistribution {
    pub fn new(subsystem: Vec<usize>, probs: Vec<f64>, n_reads: u64) -> Result<Self> {
        let d = SubsystemDistribution { subsystem, n_reads, probs };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.probs.len() != 1 << self.subsystem.len() {
            return Err(Error::invalid(format!(
                "distribution has {} entries for |S| = {}",
                self.probs.len(),
                self.subsystem.len()
            )));
        }
        if self.probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::invalid("probabilities must be non-negative"));
        }
        let total: f64 = self.probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::invalid(format!("probabilities sum to {total}")));
        }
        Ok(())
    }

    pub fn uniform(subsystem: Vec<usize>) -> Self {
        let k = 1 << subsystem.len();
        SubsystemDistribution { subsystem, n_reads: 0, probs: vec![1.0 / k as f64; k] }
    }

    pub fn delta(subsystem: Vec<usize>, index: usize) -> Self {
        let mut probs = vec![0.0; 1 << subsystem.len()];
        probs[index] = 1.0;
        SubsystemDistribution { subsystem, n_reads: 0, probs }
    }

    /// Empirical frequencies from per-read subsystem indices.
    pub fn from_indices(subsystem: Vec<usize>, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::invalid("no reads"));
        }
        let k = 1 << subsystem.len();
        let mut counts = vec![0u64; k];
        for &i in indices {
            if i >= k {
                return Err(Error::invalid(format!("subsystem index {i} out of range")));
            }
            counts[i] += 1;
        }
        Ok(Self::from_counts_unchecked(subsystem, &counts))
    }

    pub fn from_counts(subsystem: Vec<usize>, counts: &[u64]) -> Result<Self> {
        if counts.len() != 1 << subsystem.len() {
            return Err(Error::invalid("count vector length must be 2^|S|"));
        }
        if counts.iter().sum::<u64>() == 0 {
            return Err(Error::invalid("no reads"));
        }
        Ok(Self::from_counts_unchecked(subsystem, counts))
    }

    fn from_counts_unchecked(subsystem: Vec<usize>, counts: &[u64]) -> Self {
        let total: u64 = counts.iter().sum();
        let probs = counts.iter().map(|&c| c as f64 / total as f64).collect();
        SubsystemDistribution { subsystem, n_reads: total, probs }
    }

    /// Empirical marginal of full-length reads on `subsystem`.
    pub fn from_reads(subsystem: Vec<usize>, reads: &[SpinConfig]) -> Result<Self> {
        if let Some(first) = reads.first() {
            check_indices(&subsystem, first.len())?;
        }
        let indices: Vec<usize> = reads.iter().map(|r| r.sub_index(&subsystem)).collect();
        Self::from_indices(subsystem, &indices)
    }

    /// Marginal of a normalised distribution over all `2^n` configurations.
    pub fn marginal_of(full: &[f64], n: usize, subsystem: &[usize]) -> Result<Self> {
        if full.len() != 1 << n {
            return Err(Error::invalid("full distribution length must be 2^n"));
        }
        check_indices(subsystem, n)?;
        let mut probs = vec![0.0; 1 << subsystem.len()];
        for (idx, &p) in full.iter().enumerate() {
            probs[pack(idx, subsystem)] += p;
        }
        Ok(SubsystemDistribution { subsystem: subsystem.to_vec(), n_reads: 0, probs })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Equal-weight mixture of distributions on the same subsystem; the read
    /// count is the total.
    pub fn pooled(dists: &[SubsystemDistribution]) -> Result<Self> {
        let first = dists.first().ok_or_else(|| Error::invalid("nothing to pool"))?;
        let mut probs = vec![0.0; first.len()];
        for d in dists {
            if d.subsystem != first.subsystem {
                return Err(Error::invalid("pooled distributions must share a subsystem"));
            }
            for (acc, p) in probs.iter_mut().zip(&d.probs) {
                *acc += p / dists.len() as f64;
            }
        }
        Ok(SubsystemDistribution {
            subsystem: first.subsystem.clone(),
            n_reads: dists.iter().map(|d| d.n_reads).sum(),
            probs,
        })
    }
}

/// Subsystem index of a full basis index.
pub(crate) fn pack(full_index: usize, subsystem: &[usize]) -> usize {
    subsystem
        .iter()
        .enumerate()
        .fold(0, |acc, (m, &v)| acc | (full_index >> v & 1) << m)
}

/// `TVD(P, Q) = 1/2 sum |P(x) - Q(x)|`.
pub fn tvd(p: &SubsystemDistribution, q: &SubsystemDistribution) -> Result<f64> {
    tvd_slices(&p.probs, &q.probs)
}

pub fn tvd_slices(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::invalid(format!(
            "support sizes differ: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    let d = 0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>();
    Ok(d.min(1.0))
}
