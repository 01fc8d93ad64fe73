use rand::Rng;
use serde::{Deserialize, Serialize};

use super::distribution::{tvd_slices, SubsystemDistribution};
use crate::error::{Error, Result};
use crate::rng;

pub const DEFAULT_RESAMPLES: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryResult {
    #[serde(rename = "M")]
    pub m: f64,
    /// `(a, b, TVD)` for every unordered pair `a < b`.
    pub pairwise: Vec<(usize, usize, f64)>,
    pub bootstrap_std: Option<f64>,
    pub n_resamples: usize,
}

fn max_pairwise(dists: &[&[f64]]) -> Result<(f64, Vec<(usize, usize, f64)>)> {
    let mut pairs = Vec::new();
    let mut m: f64 = 0.0;
    for a in 0..dists.len() {
        for b in a + 1..dists.len() {
            let d = tvd_slices(dists[a], dists[b])?;
            m = m.max(d);
            pairs.push((a, b, d));
        }
    }
    Ok((m, pairs))
}

/// `M = max_{a,b} TVD(P_a, P_b)`.
///
/// `raw_reads[a]` holds the per-read subsystem indices behind `dists[a]`;
/// when given, each preparation is resampled with replacement
/// `n_resamples` times and the standard deviation of `M` is reported.
pub fn memory_order_parameter(
    dists: &[SubsystemDistribution],
    raw_reads: Option<&[Vec<usize>]>,
    n_resamples: usize,
    seed: u64,
) -> Result<MemoryResult> {
    if dists.len() < 2 {
        return Err(Error::invalid(format!(
            "memory order parameter needs at least 2 distributions, got {}",
            dists.len()
        )));
    }
    let slices: Vec<&[f64]> = dists.iter().map(|d| d.probs.as_slice()).collect();
    let (m, pairwise) = max_pairwise(&slices)?;
    let bootstrap_std = match raw_reads {
        None => None,
        Some(reads) => {
            if reads.len() != dists.len() {
                return Err(Error::invalid("raw reads must be given for every distribution"));
            }
            Some(bootstrap(reads, dists[0].len(), n_resamples, seed)?)
        }
    };
    Ok(MemoryResult {
        m,
        pairwise,
        bootstrap_std,
        n_resamples: if raw_reads.is_some() { n_resamples } else { 0 },
    })
}

fn bootstrap(reads: &[Vec<usize>], k: usize, n_resamples: usize, seed: u64) -> Result<f64> {
    if reads.iter().any(|r| r.is_empty()) {
        return Err(Error::invalid("bootstrap needs at least one read per preparation"));
    }
    if n_resamples < 2 {
        return Ok(0.0);
    }
    let mut rng = rng::stream(seed, "bootstrap", &[]);
    let mut samples = Vec::with_capacity(n_resamples);
    let mut buffers = vec![vec![0.0; k]; reads.len()];
    for _ in 0..n_resamples {
        for (buf, prep) in buffers.iter_mut().zip(reads) {
            buf.iter_mut().for_each(|x| *x = 0.0);
            let w = 1.0 / prep.len() as f64;
            for _ in 0..prep.len() {
                buf[prep[rng.random_range(0..prep.len())]] += w;
            }
        }
        let slices: Vec<&[f64]> = buffers.iter().map(|b| b.as_slice()).collect();
        samples.push(max_pairwise(&slices)?.0);
    }
    let mean = samples.iter().sum::<f64>() / n_resamples as f64;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n_resamples - 1) as f64;
    Ok(var.sqrt())
}
