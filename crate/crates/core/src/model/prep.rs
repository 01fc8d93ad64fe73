//! Named initial-state preparations for the subsystem and the environment.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{IsingInstance, SpinConfig};
use crate::error::{Error, Result};
use crate::rng;

/// Largest environment for which `e-ground` is found by enumeration.
pub const MAX_E_GROUND_SIZE: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SPrep {
    AllUp,
    AllDown,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EPrep {
    AllUp,
    AllDown,
    Random,
    DomainWall,
    /// Exact ground state of the environment-only classical Hamiltonian.
    EGround,
}

impl SPrep {
    pub const STANDARD: [SPrep; 3] = [SPrep::AllUp, SPrep::AllDown, SPrep::Random];

    pub fn label(self) -> &'static str {
        match self {
            SPrep::AllUp => "all-up",
            SPrep::AllDown => "all-down",
            SPrep::Random => "random",
        }
    }

    pub fn parse(label: &str) -> Result<Self> {
        match label {
            "all-up" => Ok(SPrep::AllUp),
            "all-down" => Ok(SPrep::AllDown),
            "random" => Ok(SPrep::Random),
            other => Err(Error::invalid(format!("unknown subsystem preparation `{other}`"))),
        }
    }
}

impl EPrep {
    pub fn label(self) -> &'static str {
        match self {
            EPrep::AllUp => "all-up",
            EPrep::AllDown => "all-down",
            EPrep::Random => "random",
            EPrep::DomainWall => "domain-wall",
            EPrep::EGround => "e-ground",
        }
    }

    pub fn parse(label: &str) -> Result<Self> {
        match label {
            "all-up" => Ok(EPrep::AllUp),
            "all-down" => Ok(EPrep::AllDown),
            "random" => Ok(EPrep::Random),
            "domain-wall" => Ok(EPrep::DomainWall),
            "e-ground" => Ok(EPrep::EGround),
            other => Err(Error::invalid(format!("unknown environment preparation `{other}`"))),
        }
    }

    /// Whether the prepared environment is determined by the instance alone.
    pub fn is_deterministic(self) -> bool {
        !matches!(self, EPrep::Random)
    }
}

/// A subsystem preparation paired with an environment preparation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Preparation {
    #[serde(rename = "S")]
    pub s: SPrep,
    #[serde(rename = "E")]
    pub e: EPrep,
}

impl Preparation {
    pub fn new(s: SPrep, e: EPrep) -> Self {
        Preparation { s, e }
    }

    pub fn label(&self) -> String {
        format!("S={},E={}", self.s.label(), self.e.label())
    }

    /// The initial configuration. Random choices come from `seed`; the
    /// subsystem and environment draw from separate streams so the same
    /// environment is produced for every subsystem preparation.
    pub fn initial_config(&self, instance: &IsingInstance, seed: u64) -> Result<SpinConfig> {
        let env = self.environment_config(instance, seed)?;
        let s_size = instance.subsystem.len();
        let s_index = match self.s {
            SPrep::AllUp => 0,
            SPrep::AllDown => (1usize << s_size) - 1,
            SPrep::Random => {
                let mut r = rng::stream(seed, "prep/S-random", &[instance.n as u64]);
                (0..s_size).fold(0, |acc, m| if r.random::<bool>() { acc | 1 << m } else { acc })
            }
        };
        instance.compose(s_index, &env)
    }

    /// Environment spins (ordered as `instance.environment()`).
    pub fn environment_config(&self, instance: &IsingInstance, seed: u64) -> Result<SpinConfig> {
        let env = instance.environment();
        let m = env.len();
        Ok(match self.e {
            EPrep::AllUp => SpinConfig::all_up(m),
            EPrep::AllDown => SpinConfig::all_down(m),
            EPrep::Random => {
                let mut r = rng::stream(seed, "prep/E-random", &[instance.n as u64]);
                SpinConfig((0..m).map(|_| if r.random::<bool>() { 1 } else { -1 }).collect())
            }
            // First half of E (in index order) up, the rest down.
            EPrep::DomainWall => SpinConfig((0..m).map(|k| if k < m.div_ceil(2) { 1 } else { -1 }).collect()),
            EPrep::EGround => environment_ground_state(instance)?,
        })
    }
}

/// Lowest-energy environment configuration of the couplers and fields inside
/// `E` with `S` removed; ties go to the lowest packed index.
pub fn environment_ground_state(instance: &IsingInstance) -> Result<SpinConfig> {
    let env = instance.environment();
    let m = env.len();
    if m > MAX_E_GROUND_SIZE {
        return Err(Error::Resource {
            what: "|E| for e-ground enumeration",
            value: m,
            cap: MAX_E_GROUND_SIZE,
        });
    }
    let mut position = vec![usize::MAX; instance.n];
    for (k, &v) in env.iter().enumerate() {
        position[v] = k;
    }
    let fields: Vec<f64> = env.iter().map(|&v| instance.fields[v]).collect();
    let couplers: Vec<(usize, usize, f64)> = instance
        .edges
        .iter()
        .filter(|c| position[c.i] != usize::MAX && position[c.j] != usize::MAX)
        .map(|c| (position[c.i], position[c.j], c.coupling))
        .collect();
    let sub = IsingInstance {
        n: m,
        edges: couplers.into_iter().map(Into::into).collect(),
        fields,
        subsystem: vec![0],
        meta: instance.meta.clone(),
    };
    let exact = sub.exact_energy();
    let best = (0..1usize << m)
        .min_by_key(|&idx| exact.raw_index(idx))
        .expect("non-empty range");
    Ok(SpinConfig::from_index(best, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::InstanceParams;

    fn inst(w: f64) -> IsingInstance {
        InstanceParams {
            n: 12,
            subsystem_size: 4,
            lambda: 0.5,
            disorder: w,
            frustration: 0.0,
            seed: 4,
        }
        .generate()
        .unwrap()
    }

    #[test]
    fn standard_preparations() {
        let inst = inst(0.0);
        let up = Preparation::new(SPrep::AllUp, EPrep::AllUp).initial_config(&inst, 1).unwrap();
        assert_eq!(up, SpinConfig::all_up(12));
        let down = Preparation::new(SPrep::AllDown, EPrep::AllUp).initial_config(&inst, 1).unwrap();
        assert_eq!(down.sub_index(&inst.subsystem), 0b1111);
        assert_eq!(down.restrict(&inst.environment()), SpinConfig::all_up(8));
    }

    #[test]
    fn random_environment_is_shared_across_s_preparations() {
        let inst = inst(0.0);
        let a = Preparation::new(SPrep::AllUp, EPrep::Random).initial_config(&inst, 5).unwrap();
        let b = Preparation::new(SPrep::Random, EPrep::Random).initial_config(&inst, 5).unwrap();
        let env = inst.environment();
        assert_eq!(a.restrict(&env), b.restrict(&env));
    }

    #[test]
    fn domain_wall_splits_environment() {
        let inst = inst(0.0);
        let e = Preparation::new(SPrep::AllUp, EPrep::DomainWall)
            .environment_config(&inst, 0)
            .unwrap();
        assert_eq!(e.spins(), &[1, 1, 1, 1, -1, -1, -1, -1]);
    }

    #[test]
    fn e_ground_of_clean_ferromagnet_is_all_up() {
        // Ties between all-up and all-down go to the lower index (all-up).
        let e = environment_ground_state(&inst(0.0)).unwrap();
        assert_eq!(e, SpinConfig::all_up(8));
    }

    #[test]
    fn e_ground_respects_fields() {
        let inst = inst(1.0);
        let e = environment_ground_state(&inst).unwrap();
        let env = inst.environment();
        // No single flip inside E lowers the E-only energy.
        let energy = |c: &SpinConfig| -> f64 {
            let mut pos = vec![None; inst.n];
            for (k, &v) in env.iter().enumerate() {
                pos[v] = Some(k);
            }
            let mut total: f64 = env.iter().enumerate().map(|(k, &v)| inst.fields[v] * c.get(k) as f64).sum();
            for cpl in &inst.edges {
                if let (Some(a), Some(b)) = (pos[cpl.i], pos[cpl.j]) {
                    total += cpl.coupling * (c.get(a) * c.get(b)) as f64;
                }
            }
            total
        };
        let e0 = energy(&e);
        for k in 0..env.len() {
            let mut c = e.clone();
            c.flip(k);
            assert!(energy(&c) >= e0 - 1e-12);
        }
    }
}
