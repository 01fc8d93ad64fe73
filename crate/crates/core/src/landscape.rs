//! Exact enumeration of classical energy landscapes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{IsingInstance, SpinConfig};

pub const MAX_ENUMERATION_QUBITS: usize = 20;

/// Energies of all `2^n` configurations, indexed by packed configuration.
#[derive(Debug, Clone)]
pub struct EnergyTable {
    n: usize,
    energies: Vec<f64>,
}

/// Gray-code enumeration: each step flips one spin and applies its exact
/// fixed-point energy change, so entries equal [`IsingInstance::energy`]
/// bit for bit.
pub fn enumerate(instance: &IsingInstance) -> Result<EnergyTable> {
    let n = instance.n;
    if n > MAX_ENUMERATION_QUBITS {
        return Err(Error::Resource {
            what: "qubits for exact enumeration",
            value: n,
            cap: MAX_ENUMERATION_QUBITS,
        });
    }
    let exact = instance.exact_energy();
    let size = 1usize << n;
    let mut energies = vec![0.0; size];
    let mut index = 0usize;
    let mut raw = exact.raw_index(0);
    energies[0] = exact.to_f64(raw);
    for step in 1..size {
        let k = step.trailing_zeros() as usize;
        raw += exact.raw_flip_delta_index(index, k);
        index ^= 1 << k;
        energies[index] = exact.to_f64(raw);
    }
    Ok(EnergyTable { n, energies })
}

impl EnergyTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn energy(&self, index: usize) -> f64 {
        self.energies[index]
    }

    /// Lowest energy and the lowest index attaining it.
    pub fn ground(&self) -> (usize, f64) {
        let mut best = (0, self.energies[0]);
        for (idx, &e) in self.energies.iter().enumerate() {
            if e < best.1 {
                best = (idx, e);
            }
        }
        best
    }

    /// Normalised Boltzmann weights `exp(-beta (E - E_min)) / Z`.
    pub fn boltzmann(&self, beta: f64) -> Vec<f64> {
        let (_, e_min) = self.ground();
        let mut w: Vec<f64> = self.energies.iter().map(|&e| (-beta * (e - e_min)).exp()).collect();
        let z: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= z);
        w
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalMinimum {
    pub config: SpinConfig,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalMinima {
    /// Strict minima sorted by energy then index.
    pub minima: Vec<LocalMinimum>,
    /// Configurations no flip can lower but at least one flip leaves
    /// unchanged; excluded from `minima`.
    pub tie_blocked: usize,
}

/// Configurations where every single-spin flip strictly raises the energy.
pub fn local_minima(table: &EnergyTable) -> LocalMinima {
    let n = table.n;
    let mut minima = Vec::new();
    let mut tie_blocked = 0;
    for (idx, &e) in table.energies.iter().enumerate() {
        let mut strict = true;
        let mut lowerable = false;
        for k in 0..n {
            let ek = table.energies[idx ^ (1 << k)];
            if ek < e {
                lowerable = true;
                break;
            }
            if ek == e {
                strict = false;
            }
        }
        if lowerable {
            continue;
        }
        if strict {
            minima.push((idx, e));
        } else {
            tie_blocked += 1;
        }
    }
    minima.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    LocalMinima {
        minima: minima
            .into_iter()
            .map(|(idx, energy)| LocalMinimum {
                config: SpinConfig::from_index(idx, n),
                energy,
            })
            .collect(),
        tie_blocked,
    }
}

/// Steepest-descent basins: each configuration moves to the neighbour with
/// the most negative energy change (lowest flipped index on ties) until no
/// flip lowers the energy.
#[derive(Debug, Clone)]
pub struct Basins {
    /// Terminal configuration (packed) of every configuration's descent.
    pub root: Vec<usize>,
}

pub fn basins(table: &EnergyTable) -> Basins {
    let n = table.n;
    let size = table.energies.len();
    let next: Vec<usize> = (0..size)
        .map(|idx| {
            let e = table.energies[idx];
            let mut best = idx;
            let mut best_delta = 0.0;
            for k in 0..n {
                let j = idx ^ (1 << k);
                let delta = table.energies[j] - e;
                if delta < best_delta {
                    best_delta = delta;
                    best = j;
                }
            }
            best
        })
        .collect();
    let mut root = vec![usize::MAX; size];
    let mut path = Vec::new();
    for start in 0..size {
        let mut cur = start;
        while root[cur] == usize::MAX && next[cur] != cur {
            path.push(cur);
            cur = next[cur];
        }
        let r = if root[cur] == usize::MAX { cur } else { root[cur] };
        root[cur] = r;
        for v in path.drain(..) {
            root[v] = r;
        }
    }
    Basins { root }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinWeight {
    /// Configuration whose basin is reported.
    pub seed: SpinConfig,
    /// Bottom of that basin.
    pub minimum: SpinConfig,
    pub size: usize,
    pub weight: f64,
}

/// Boltzmann weight at `beta` of the basin containing each seed.
pub fn basin_weight(table: &EnergyTable, beta: f64, seeds: &[SpinConfig]) -> Result<Vec<BasinWeight>> {
    let basins = basins(table);
    let weights = table.boltzmann(beta);
    let size = weights.len();
    let mut mass = vec![0.0; size];
    let mut count = vec![0usize; size];
    for idx in 0..size {
        mass[basins.root[idx]] += weights[idx];
        count[basins.root[idx]] += 1;
    }
    seeds
        .iter()
        .map(|seed| {
            if seed.len() != table.n {
                return Err(Error::invalid("basin seed has the wrong length"));
            }
            let r = basins.root[seed.index()];
            Ok(BasinWeight {
                seed: seed.clone(),
                minimum: SpinConfig::from_index(r, table.n),
                size: count[r],
                weight: mass[r],
            })
        })
        .collect()
}

/// All basins with their weights at `beta`, sorted by minimum energy.
pub fn all_basin_weights(table: &EnergyTable, beta: f64) -> Vec<BasinWeight> {
    let basins = basins(table);
    let weights = table.boltzmann(beta);
    let size = weights.len();
    let mut mass = vec![0.0; size];
    let mut count = vec![0usize; size];
    for idx in 0..size {
        mass[basins.root[idx]] += weights[idx];
        count[basins.root[idx]] += 1;
    }
    let mut roots: Vec<usize> = (0..size).filter(|&i| count[i] > 0).collect();
    roots.sort_by(|&a, &b| table.energies[a].total_cmp(&table.energies[b]).then(a.cmp(&b)));
    roots
        .into_iter()
        .map(|r| BasinWeight {
            seed: SpinConfig::from_index(r, table.n),
            minimum: SpinConfig::from_index(r, table.n),
            size: count[r],
            weight: mass[r],
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeReport {
    pub n_local_minima: usize,
    pub global_minimum: LocalMinimum,
    /// Second-lowest local minimum by energy; absent for single-minimum landscapes.
    pub second_lowest_local_minimum: Option<LocalMinimum>,
    /// Energy gap between the two; absent with the second minimum.
    pub gap: Option<f64>,
    /// Lowest local minimum whose steepest-descent basin differs from the
    /// global minimum's basin.
    pub lowest_outside_global_basin: Option<LocalMinimum>,
    pub tie_blocked: usize,
    /// Set when the lowest-energy configuration is not a strict minimum
    /// (degenerate neighbour); it is then added to the minima count.
    pub degenerate_ground: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basin_weights: Option<BasinWeightsAt>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinWeightsAt {
    pub beta: f64,
    pub basins: Vec<BasinWeight>,
}

pub fn report(instance: &IsingInstance, beta: Option<f64>) -> Result<LandscapeReport> {
    let table = enumerate(instance)?;
    Ok(report_from_table(&table, beta))
}

pub fn report_from_table(table: &EnergyTable, beta: Option<f64>) -> LandscapeReport {
    let n = table.n;
    let found = local_minima(table);
    let (g_idx, g_energy) = table.ground();
    let mut minima = found.minima;
    let degenerate_ground = !minima.iter().any(|m| m.energy == g_energy);
    if degenerate_ground {
        minima.insert(
            0,
            LocalMinimum {
                config: SpinConfig::from_index(g_idx, n),
                energy: g_energy,
            },
        );
    }
    let global = minima[0].clone();
    let second = minima.get(1).cloned();
    let gap = second.as_ref().map(|s| s.energy - global.energy);

    let b = basins(table);
    let global_root = b.root[global.config.index()];
    let outside = minima
        .iter()
        .find(|m| b.root[m.config.index()] != global_root)
        .cloned();

    LandscapeReport {
        n_local_minima: minima.len(),
        global_minimum: global,
        second_lowest_local_minimum: second,
        gap,
        lowest_outside_global_basin: outside,
        tie_blocked: found.tie_blocked,
        degenerate_ground,
        basin_weights: beta.map(|beta| BasinWeightsAt {
            beta,
            basins: all_basin_weights(table, beta),
        }),
    }
}

/// Histogram of gaps over fixed-width bins `[lo + k w, lo + (k+1) w)`; the
/// last bin is closed on the right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapHistogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

pub fn gap_histogram(gaps: &[f64], lo: f64, hi: f64, bins: usize) -> Result<GapHistogram> {
    if bins == 0 || hi <= lo {
        return Err(Error::invalid("histogram needs bins >= 1 and hi > lo"));
    }
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|k| lo + width * k as f64).collect();
    let mut counts = vec![0; bins];
    for &g in gaps {
        if g < lo || g > hi {
            continue;
        }
        let k = (((g - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    Ok(GapHistogram { edges, counts })
}

impl GapHistogram {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_lo,bin_hi,count\n");
        for (k, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", self.edges[k], self.edges[k + 1], c));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Coupler, InstanceMeta, InstanceParams, FAMILY_CUSTOM};

    fn custom(n: usize, edges: &[(usize, usize, f64)], fields: Vec<f64>) -> IsingInstance {
        IsingInstance {
            n,
            edges: edges.iter().map(|&e| Coupler::from(e)).collect(),
            fields,
            subsystem: vec![0],
            meta: InstanceMeta {
                seed: 0,
                disorder: 0.0,
                frustration: 0.0,
                lambda: 1.0,
                family: FAMILY_CUSTOM.into(),
                decoupled_control: false,
            },
        }
    }

    fn ferro(n: usize, seed: u64) -> IsingInstance {
        InstanceParams {
            n,
            subsystem_size: 4,
            lambda: 1.0,
            disorder: 0.0,
            frustration: 0.0,
            seed,
        }
        .generate()
        .unwrap()
    }

    #[test]
    fn two_spin_table() {
        let inst = custom(2, &[(0, 1, -1.0)], vec![0.0, 0.0]);
        let t = enumerate(&inst).unwrap();
        assert_eq!(t.energies(), &[-1.0, 1.0, 1.0, -1.0]);
    }

    #[test]
    fn complete_ferromagnet_has_two_minima() {
        let inst = ferro(4, 1);
        let t = enumerate(&inst).unwrap();
        let m = local_minima(&t);
        assert_eq!(m.minima.len(), 2);
        assert_eq!(m.minima[0].config, SpinConfig::all_up(4));
        assert_eq!(m.minima[1].config, SpinConfig::all_down(4));
        let r = report_from_table(&t, None);
        assert_eq!(r.gap, Some(0.0));
        assert!(!r.degenerate_ground);
    }

    #[test]
    fn sparse_ferromagnet_minima_come_in_flipped_pairs() {
        // on a 3-regular graph, domains whose every spin keeps two aligned
        // neighbours are metastable as well
        let inst = ferro(12, 1);
        let t = enumerate(&inst).unwrap();
        let (_, e0) = t.ground();
        assert_eq!(t.energies().iter().filter(|&&e| e == e0).count(), 2);
        let m = local_minima(&t);
        assert!(m.minima.len() >= 2 && m.minima.len() % 2 == 0);
        let mut ground: Vec<_> = m.minima[..2].iter().map(|x| x.config.clone()).collect();
        ground.sort();
        assert_eq!(ground, vec![SpinConfig::all_down(12), SpinConfig::all_up(12)]);
        for x in &m.minima {
            assert!(m.minima.iter().any(|y| y.config == x.config.flipped() && y.energy == x.energy));
        }
    }

    #[test]
    fn strong_uniform_field_has_single_minimum() {
        let mut inst = ferro(10, 2);
        inst.fields = vec![-10.0; 10];
        let m = local_minima(&enumerate(&inst).unwrap());
        assert_eq!(m.minima.len(), 1);
        assert_eq!(m.minima[0].config, SpinConfig::all_up(10));
        let r = report(&inst, None).unwrap();
        assert_eq!(r.gap, None);
        assert_eq!(r.n_local_minima, 1);
    }

    #[test]
    fn ties_are_not_minima() {
        // Free spin 1: flipping it never changes the energy.
        let inst = custom(2, &[], vec![-1.0, 0.0]);
        let m = local_minima(&enumerate(&inst).unwrap());
        assert!(m.minima.is_empty());
        assert_eq!(m.tie_blocked, 2);
        let r = report(&inst, None).unwrap();
        assert!(r.degenerate_ground);
        assert_eq!(r.n_local_minima, 1);
    }

    #[test]
    fn basin_weights_at_zero_beta_follow_sizes() {
        let inst = InstanceParams {
            n: 10,
            subsystem_size: 4,
            lambda: 0.5,
            disorder: 1.0,
            frustration: 0.5,
            seed: 3,
        }
        .generate()
        .unwrap();
        let t = enumerate(&inst).unwrap();
        let all = all_basin_weights(&t, 0.0);
        let total: usize = all.iter().map(|b| b.size).sum();
        assert_eq!(total, 1 << 10);
        for b in &all {
            assert!((b.weight - b.size as f64 / 1024.0).abs() < 1e-12);
        }
        let sum: f64 = all_basin_weights(&t, 3.0).iter().map(|b| b.weight).sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_ferromagnet_basins_split_evenly() {
        let t = enumerate(&ferro(4, 5)).unwrap();
        for beta in [0.0, 0.1, 1.0, 7.0] {
            let w = basin_weight(&t, beta, &[SpinConfig::all_up(4), SpinConfig::all_down(4)]).unwrap();
            assert!((w[0].weight - 0.5).abs() < 1e-12, "{beta}: {}", w[0].weight);
            assert!((w[1].weight - 0.5).abs() < 1e-12);
        }
        // larger graphs have extra metastable basins, but the two ordered
        // ones still mirror each other
        let t = enumerate(&ferro(8, 5)).unwrap();
        for beta in [0.1, 1.0, 7.0] {
            let w = basin_weight(&t, beta, &[SpinConfig::all_up(8), SpinConfig::all_down(8)]).unwrap();
            assert!((w[0].weight - w[1].weight).abs() < 1e-12);
        }
    }

    #[test]
    fn unique_ground_state_basin_takes_all_weight_at_low_temperature() {
        let mut inst = ferro(8, 5);
        inst.fields = vec![-0.1; 8];
        let t = enumerate(&inst).unwrap();
        let w = basin_weight(&t, 500.0, &[SpinConfig::all_up(8)]).unwrap();
        assert!((w[0].weight - 1.0).abs() < 1e-12);
    }

    #[test]
    fn enumeration_cap() {
        let inst = custom(21, &[], vec![0.0; 21]);
        assert!(matches!(enumerate(&inst), Err(Error::Resource { .. })));
    }

    #[test]
    fn histogram_bins() {
        let h = gap_histogram(&[0.0, 0.5, 1.0, 2.0, 5.0], 0.0, 2.0, 4).unwrap();
        assert_eq!(h.counts, vec![1, 1, 1, 1]);
        assert!(h.to_csv().starts_with("bin_lo,bin_hi,count\n0,0.5,1\n"));
    }
}
