use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map};

use super::{ReadSet, SamplerRequest};
use crate::error::{Error, Result};
use crate::model::SpinConfig;
use crate::rng;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SvmcMeasurement {
    /// `s = sign(n_z)`.
    #[default]
    Sign,
    /// `s = +1` with probability `(1 + n_z) / 2`.
    Probabilistic,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SvmcSettings {
    /// Weight of the optional `-ratio sum n_x` term.
    #[serde(default)]
    pub transverse_ratio: f64,
    #[serde(default)]
    pub measurement: SvmcMeasurement,
}

type Vec3 = [f64; 3];

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn uniform_direction<R: Rng>(rng: &mut R) -> Vec3 {
    let z: f64 = 2.0 * rng.random::<f64>() - 1.0;
    let phi = 2.0 * std::f64::consts::PI * rng.random::<f64>();
    let r = (1.0 - z * z).max(0.0).sqrt();
    [r * phi.cos(), r * phi.sin(), z]
}

/// Metropolis dynamics of unit vectors under
/// `H = sum h_i n_i^z + sum J_ij n_i . n_j - ratio sum n_i^x`,
/// each proposal a fresh uniform direction.
pub fn svmc_sample(req: &SamplerRequest, settings: &SvmcSettings) -> Result<ReadSet> {
    req.validate()?;
    if !settings.transverse_ratio.is_finite() {
        return Err(Error::invalid("transverse ratio must be finite"));
    }
    let adjacency = req.instance.adjacency();
    let mut vectors: Vec<Vec3> = req.initial.spins().iter().map(|&s| [0.0, 0.0, f64::from(s)]).collect();
    let mut order = req.movable_sites();
    let mut rng = rng::stream(req.seed, "sweep", &[0]);
    let mut measure_rng = rng::stream(req.seed, "svmc-measure", &[]);
    let mut accepted = 0u64;
    let mut proposed = 0u64;

    let mut sweep = |vectors: &mut Vec<Vec3>| {
        order.shuffle(&mut rng);
        for &k in &order {
            let mut field = [-settings.transverse_ratio, 0.0, adjacency.field(k)];
            for &(j, coupling) in adjacency.neighbors(k) {
                for c in 0..3 {
                    field[c] += coupling * vectors[j][c];
                }
            }
            let proposal = uniform_direction(&mut rng);
            let delta = dot(&field, &proposal) - dot(&field, &vectors[k]);
            proposed += 1;
            if delta <= 0.0 || rng.random::<f64>() < (-req.beta * delta).exp() {
                vectors[k] = proposal;
                accepted += 1;
            }
        }
    };
    for _ in 0..req.sweeps {
        sweep(&mut vectors);
    }
    let spacing = req.spacing();
    let mut reads = Vec::with_capacity(req.n_samples);
    for _ in 0..req.n_samples {
        for _ in 0..spacing {
            sweep(&mut vectors);
        }
        let spins: Vec<i8> = vectors
            .iter()
            .map(|v| match settings.measurement {
                SvmcMeasurement::Sign => {
                    if v[2] >= 0.0 {
                        1
                    } else {
                        -1
                    }
                }
                SvmcMeasurement::Probabilistic => {
                    if measure_rng.random::<f64>() < 0.5 * (1.0 + v[2]) {
                        1
                    } else {
                        -1
                    }
                }
            })
            .collect();
        reads.push(SpinConfig::new(spins).expect("projection yields +/-1"));
    }
    let mut extra = Map::new();
    extra.insert("transverse_ratio".into(), json!(settings.transverse_ratio));
    extra.insert("measurement".into(), json!(settings.measurement));
    extra.insert(
        "acceptance_rate".into(),
        json!(if proposed == 0 { 0.0 } else { accepted as f64 / proposed as f64 }),
    );
    Ok(ReadSet::from_request(req, "svmc", reads, extra))
}
