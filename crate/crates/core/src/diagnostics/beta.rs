use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaEstimate {
    pub beta: f64,
    /// Sample standard deviation across probes (0 for a single probe).
    pub std: f64,
    pub per_probe: Vec<f64>,
}

/// `beta = ln(n_down / n_up) / (2h)` per probe, averaged over probes.
///
/// A probe with field `h` has energy `h s`, so the up state costs `2h`
/// more than the down state.
pub fn estimate_beta_eff(counts: &[(u64, u64)], h: f64) -> Result<BetaEstimate> {
    for (probe, &(up, down)) in counts.iter().enumerate() {
        let which = match (up, down) {
            (0, _) => "up",
            (_, 0) => "down",
            _ => continue,
        };
        return Err(Error::DegenerateProbe { probe, which });
    }
    let freqs: Vec<(f64, f64)> = counts.iter().map(|&(u, d)| (u as f64, d as f64)).collect();
    estimate_beta_from_frequencies(&freqs, h)
}

/// Same estimator on real-valued (e.g. expected) counts.
pub fn estimate_beta_from_frequencies(counts: &[(f64, f64)], h: f64) -> Result<BetaEstimate> {
    if h == 0.0 || !h.is_finite() {
        return Err(Error::invalid("probe field h must be finite and non-zero"));
    }
    if counts.is_empty() {
        return Err(Error::invalid("no probes"));
    }
    let mut per_probe = Vec::with_capacity(counts.len());
    for (probe, &(up, down)) in counts.iter().enumerate() {
        if !(up > 0.0) {
            return Err(Error::DegenerateProbe { probe, which: "up" });
        }
        if !(down > 0.0) {
            return Err(Error::DegenerateProbe { probe, which: "down" });
        }
        per_probe.push((down / up).ln() / (2.0 * h));
    }
    let k = per_probe.len() as f64;
    let beta = per_probe.iter().sum::<f64>() / k;
    let std = if per_probe.len() > 1 {
        (per_probe.iter().map(|b| (b - beta).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(BetaEstimate { beta, std, per_probe })
}

/// Probability of reading `+1` on an isolated probe with field `h`.
pub fn probe_up_probability(beta: f64, h: f64) -> f64 {
    1.0 / (1.0 + (2.0 * beta * h).exp())
}

/// Expected `(n_up, n_down)` for `reads` reads.
pub fn expected_probe_counts(beta: f64, h: f64, reads: f64) -> (f64, f64) {
    // the down probability is the up probability of the reversed field,
    // which avoids cancellation in 1 - p
    (reads * probe_up_probability(beta, h), reads * probe_up_probability(beta, -h))
}

/// Delta-method standard error of the probe-averaged estimate.
pub fn beta_standard_error(beta: f64, h: f64, reads: u64, probes: usize) -> f64 {
    let p = probe_up_probability(beta, h);
    let per_probe = (1.0 / (reads as f64 * p * (1.0 - p))).sqrt() / (2.0 * h).abs();
    per_probe / (probes as f64).sqrt()
}

/// Simulated probe readout: `reads` independent Bernoulli draws per probe.
pub fn sample_probe_counts(beta: f64, h: f64, reads: u64, probes: usize, seed: u64) -> Vec<(u64, u64)> {
    let p = probe_up_probability(beta, h);
    (0..probes)
        .map(|probe| {
            let mut rng = rng::stream(seed, "beta-probe", &[probe as u64]);
            let up = (0..reads).filter(|_| rng.random::<f64>() < p).count() as u64;
            (up, reads - up)
        })
        .collect()
}
