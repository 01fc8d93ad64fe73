//! Ising instances: the subsystem/environment Hamiltonian family.
//!
//! `H_P = sum_i h_i s_i + sum_(ij) J_ij s_i s_j` on a graph whose vertices
//! are split into a connected subsystem `S` and its environment `E`. Couplers
//! inside `S` and inside `E` are ferromagnetic (`J = -1`), couplers crossing
//! the boundary are stored already scaled to `-lambda`, and each coupler
//! inside `S` may be sign-flipped to `+1` (mixed frustration).

mod exact;
mod graph;
pub mod prep;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

pub use exact::ExactEnergy;
pub use graph::{generate_random_3regular, Graph};
pub use prep::{EPrep, Preparation, SPrep};

pub const FAMILY_RANDOM_3_REGULAR: &str = "random-3-regular";
pub const FAMILY_CUSTOM: &str = "custom";

/// A configuration of `n` Ising spins, each exactly `+1` or `-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i8>")]
pub struct SpinConfig(Vec<i8>);

impl TryFrom<Vec<i64>> for SpinConfig {
    type Error = Error;

    fn try_from(values: Vec<i64>) -> Result<Self> {
        values
            .iter()
            .enumerate()
            .map(|(k, &v)| match v {
                1 => Ok(1),
                -1 => Ok(-1),
                other => Err(Error::Validation(format!(
                    "spin {k} has value {other}, expected +1 or -1"
                ))),
            })
            .collect::<Result<Vec<i8>>>()
            .map(SpinConfig)
    }
}

impl From<SpinConfig> for Vec<i8> {
    fn from(c: SpinConfig) -> Self {
        c.0
    }
}

impl SpinConfig {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        Self::try_from(spins.into_iter().map(i64::from).collect::<Vec<_>>())
    }

    pub fn uniform(n: usize, spin: i8) -> Self {
        assert!(spin == 1 || spin == -1);
        SpinConfig(vec![spin; n])
    }

    pub fn all_up(n: usize) -> Self {
        Self::uniform(n, 1)
    }

    pub fn all_down(n: usize) -> Self {
        Self::uniform(n, -1)
    }

    /// Unpack a basis index (bit `k` set means spin `k` is `-1`).
    pub fn from_index(index: usize, n: usize) -> Self {
        SpinConfig((0..n).map(|k| if index >> k & 1 == 0 { 1 } else { -1 }).collect())
    }

    pub fn index(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (k, &s)| if s < 0 { acc | 1 << k } else { acc })
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn spins(&self) -> &[i8] {
        &self.0
    }

    pub fn get(&self, k: usize) -> i8 {
        self.0[k]
    }

    pub fn flip(&mut self, k: usize) {
        self.0[k] = -self.0[k];
    }

    pub fn flipped(&self) -> Self {
        SpinConfig(self.0.iter().map(|&s| -s).collect())
    }

    /// Spins at `indices`, in that order.
    pub fn restrict(&self, indices: &[usize]) -> SpinConfig {
        SpinConfig(indices.iter().map(|&k| self.0[k]).collect())
    }

    /// Packs the spins at `indices` into a subsystem index (bit `m` is
    /// `indices[m]`).
    pub fn sub_index(&self, indices: &[usize]) -> usize {
        indices
            .iter()
            .enumerate()
            .fold(0, |acc, (m, &k)| if self.0[k] < 0 { acc | 1 << m } else { acc })
    }
}

impl std::fmt::Display for SpinConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &s in &self.0 {
            f.write_str(if s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// One coupler `(i, j, J_ij)` with `i < j`; serialized as `[i, j, J]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(usize, usize, f64)", into = "(usize, usize, f64)")]
pub struct Coupler {
    pub i: usize,
    pub j: usize,
    pub coupling: f64,
}

impl From<(usize, usize, f64)> for Coupler {
    fn from((i, j, coupling): (usize, usize, f64)) -> Self {
        Coupler { i, j, coupling }
    }
}

impl From<Coupler> for (usize, usize, f64) {
    fn from(c: Coupler) -> Self {
        (c.i, c.j, c.coupling)
    }
}

/// Generation metadata; enough to regenerate a random-3-regular instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub seed: u64,
    #[serde(rename = "W")]
    pub disorder: f64,
    #[serde(rename = "p_S")]
    pub frustration: f64,
    pub lambda: f64,
    pub family: String,
    /// Set when `lambda == 0`: the subsystem is decoupled and the condition
    /// serves only as a control.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub decoupled_control: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingInstance {
    pub n: usize,
    pub edges: Vec<Coupler>,
    pub fields: Vec<f64>,
    pub subsystem: Vec<usize>,
    pub meta: InstanceMeta,
}

/// Parameters of the random-3-regular family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceParams {
    pub n: usize,
    pub subsystem_size: usize,
    pub lambda: f64,
    pub disorder: f64,
    pub frustration: f64,
    pub seed: u64,
}

impl InstanceParams {
    pub fn generate(&self) -> Result<IsingInstance> {
        let graph = generate_random_3regular(self.n, self.seed)?;
        build_instance(
            &graph,
            self.subsystem_size,
            self.lambda,
            self.disorder,
            self.frustration,
            self.seed,
        )
    }

    /// Recovers the parameters that produced a random-3-regular instance.
    pub fn from_instance(instance: &IsingInstance) -> Result<Self> {
        if instance.meta.family != FAMILY_RANDOM_3_REGULAR {
            return Err(Error::invalid(format!(
                "family `{}` cannot be regenerated from metadata",
                instance.meta.family
            )));
        }
        Ok(InstanceParams {
            n: instance.n,
            subsystem_size: instance.subsystem.len(),
            lambda: instance.meta.lambda,
            disorder: instance.meta.disorder,
            frustration: instance.meta.frustration,
            seed: instance.meta.seed,
        })
    }
}

/// Builds the Hamiltonian on `graph`.
///
/// `S` grows breadth-first from vertex 0. Couplers inside `S` draw their
/// sign flips (probability `frustration`) from one stream in edge order;
/// fields are i.i.d. uniform on `[-disorder, disorder]` from another.
pub fn build_instance(
    graph: &Graph,
    subsystem_size: usize,
    lambda: f64,
    disorder: f64,
    frustration: f64,
    seed: u64,
) -> Result<IsingInstance> {
    let n = graph.n;
    if subsystem_size == 0 || subsystem_size > n {
        return Err(Error::invalid(format!(
            "subsystem size {subsystem_size} outside [1, {n}]"
        )));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::invalid(format!("lambda = {lambda} outside [0, 1]")));
    }
    if !(disorder >= 0.0 && disorder.is_finite()) {
        return Err(Error::invalid(format!("disorder width W = {disorder} must be >= 0")));
    }
    if !(0.0..=1.0).contains(&frustration) {
        return Err(Error::invalid(format!("p_S = {frustration} outside [0, 1]")));
    }
    let subsystem = graph.bfs_cluster(0, subsystem_size).ok_or_else(|| {
        Error::Generation(format!(
            "cannot grow a connected subsystem of size {subsystem_size}: component of vertex 0 is smaller"
        ))
    })?;
    let mut in_s = vec![false; n];
    for &v in &subsystem {
        in_s[v] = true;
    }

    let mut flip_rng = rng::stream(seed, "instance/frustration", &[n as u64]);
    let mut field_rng = rng::stream(seed, "instance/fields", &[n as u64]);

    let edges = graph
        .edges
        .iter()
        .map(|&(i, j)| {
            let coupling = match (in_s[i], in_s[j]) {
                (true, true) => {
                    let u: f64 = flip_rng.random();
                    if u < frustration {
                        1.0
                    } else {
                        -1.0
                    }
                }
                (false, false) => -1.0,
                _ => -lambda,
            };
            Coupler { i, j, coupling }
        })
        .collect();
    let fields = (0..n)
        .map(|_| {
            let u: f64 = field_rng.random();
            disorder * (2.0 * u - 1.0)
        })
        .collect();

    let instance = IsingInstance {
        n,
        edges,
        fields,
        subsystem,
        meta: InstanceMeta {
            seed,
            disorder,
            frustration,
            lambda,
            family: FAMILY_RANDOM_3_REGULAR.to_string(),
            decoupled_control: lambda == 0.0,
        },
    };
    instance.validate()?;
    Ok(instance)
}

impl IsingInstance {
    /// Checks every structural invariant; called on deserialization paths.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n < 1 {
            return Err(Error::Validation("instance has no qubits".into()));
        }
        if self.fields.len() != n {
            return Err(Error::Validation(format!(
                "fields has length {}, expected {n}",
                self.fields.len()
            )));
        }
        let mut pairs = Vec::with_capacity(self.edges.len());
        for c in &self.edges {
            if c.i >= n || c.j >= n {
                return Err(Error::Validation(format!("coupler ({}, {}) out of range", c.i, c.j)));
            }
            if c.i == c.j {
                return Err(Error::Validation(format!("self-loop on vertex {}", c.i)));
            }
            if c.i > c.j {
                return Err(Error::Validation(format!("coupler ({}, {}) must have i < j", c.i, c.j)));
            }
            if !c.coupling.is_finite() {
                return Err(Error::Validation(format!("coupler ({}, {}) is not finite", c.i, c.j)));
            }
            pairs.push((c.i, c.j));
        }
        pairs.sort_unstable();
        if pairs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Validation("duplicate coupler".into()));
        }
        if self.fields.iter().any(|h| !h.is_finite()) {
            return Err(Error::Validation("non-finite field".into()));
        }
        if self.subsystem.is_empty() {
            return Err(Error::Validation("subsystem is empty".into()));
        }
        if self.subsystem.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Validation("subsystem must be sorted and distinct".into()));
        }
        if self.subsystem.iter().any(|&v| v >= n) {
            return Err(Error::Validation("subsystem index out of range".into()));
        }
        let graph = self.graph();
        if !graph::induced_connected(&graph.neighbors(), &self.subsystem) {
            return Err(Error::Validation("subsystem does not induce a connected subgraph".into()));
        }
        if self.meta.family == FAMILY_RANDOM_3_REGULAR {
            if n % 2 != 0 {
                return Err(Error::Validation("random-3-regular instance with odd n".into()));
            }
            if graph.degrees().iter().any(|&d| d != 3) {
                return Err(Error::Validation("random-3-regular instance is not 3-regular".into()));
            }
        }
        if !(0.0..=1.0).contains(&self.meta.lambda) {
            return Err(Error::Validation("lambda outside [0, 1]".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let instance: IsingInstance = serde_json::from_str(text)?;
        instance.validate()?;
        Ok(instance)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }

    pub fn graph(&self) -> Graph {
        Graph {
            n: self.n,
            edges: self.edges.iter().map(|c| (c.i, c.j)).collect(),
        }
    }

    pub fn boundary_scale(&self) -> f64 {
        self.meta.lambda
    }

    /// Environment vertices, sorted.
    pub fn environment(&self) -> Vec<usize> {
        let mut in_s = vec![false; self.n];
        for &v in &self.subsystem {
            in_s[v] = true;
        }
        (0..self.n).filter(|&v| !in_s[v]).collect()
    }

    pub fn in_subsystem(&self) -> Vec<bool> {
        let mut in_s = vec![false; self.n];
        for &v in &self.subsystem {
            in_s[v] = true;
        }
        in_s
    }

    /// Number of couplers with exactly one endpoint in `S`.
    pub fn boundary_edge_count(&self) -> usize {
        let in_s = self.in_subsystem();
        self.edges.iter().filter(|c| in_s[c.i] != in_s[c.j]).count()
    }

    /// `sum_i h_i s_i + sum J_ij s_i s_j`, evaluated exactly and rounded once.
    pub fn energy(&self, config: &SpinConfig) -> Result<f64> {
        if config.len() != self.n {
            return Err(Error::invalid(format!(
                "configuration has {} spins, instance has {}",
                config.len(),
                self.n
            )));
        }
        Ok(self.exact_energy().energy(config.spins()))
    }

    pub fn exact_energy(&self) -> ExactEnergy {
        ExactEnergy::new(self)
    }

    pub fn adjacency(&self) -> Adjacency {
        Adjacency::new(self)
    }

    /// Full configuration with `S` set from `s_index` and `E` from `env`.
    pub fn compose(&self, s_index: usize, env: &SpinConfig) -> Result<SpinConfig> {
        let environment = self.environment();
        if env.len() != environment.len() {
            return Err(Error::invalid(format!(
                "environment configuration has {} spins, |E| = {}",
                env.len(),
                environment.len()
            )));
        }
        let mut spins = vec![1i8; self.n];
        for (m, &v) in self.subsystem.iter().enumerate() {
            spins[v] = if s_index >> m & 1 == 0 { 1 } else { -1 };
        }
        for (m, &v) in environment.iter().enumerate() {
            spins[v] = env.get(m);
        }
        Ok(SpinConfig(spins))
    }
}

/// Compressed neighbour lists for the Monte Carlo kernels.
#[derive(Debug, Clone)]
pub struct Adjacency {
    offsets: Vec<usize>,
    neighbors: Vec<(usize, f64)>,
    fields: Vec<f64>,
}

impl Adjacency {
    pub fn new(instance: &IsingInstance) -> Self {
        let mut lists = vec![Vec::new(); instance.n];
        for c in &instance.edges {
            lists[c.i].push((c.j, c.coupling));
            lists[c.j].push((c.i, c.coupling));
        }
        let mut offsets = Vec::with_capacity(instance.n + 1);
        let mut neighbors = Vec::new();
        offsets.push(0);
        for list in lists {
            neighbors.extend(list);
            offsets.push(neighbors.len());
        }
        Adjacency {
            offsets,
            neighbors,
            fields: instance.fields.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.fields.len()
    }

    pub fn neighbors(&self, k: usize) -> &[(usize, f64)] {
        &self.neighbors[self.offsets[k]..self.offsets[k + 1]]
    }

    pub fn field(&self, k: usize) -> f64 {
        self.fields[k]
    }

    /// `h_k + sum_j J_kj s_j`.
    #[inline]
    pub fn local_field(&self, spins: &[i8], k: usize) -> f64 {
        self.neighbors(k)
            .iter()
            .fold(self.fields[k], |acc, &(j, coupling)| acc + coupling * f64::from(spins[j]))
    }

    /// Energy change from flipping spin `k`.
    #[inline]
    pub fn flip_delta(&self, spins: &[i8], k: usize) -> f64 {
        -2.0 * f64::from(spins[k]) * self.local_field(spins, k)
    }

    /// Plain floating-point energy, for the samplers' bookkeeping.
    pub fn energy(&self, spins: &[i8]) -> f64 {
        let mut e = 0.0;
        for k in 0..self.n() {
            let sk = f64::from(spins[k]);
            e += self.fields[k] * sk;
            for &(j, coupling) in self.neighbors(k) {
                if j > k {
                    e += coupling * sk * f64::from(spins[j]);
                }
            }
        }
        e
    }
}
