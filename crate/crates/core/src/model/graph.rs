//! Random 3-regular graphs from the pairing (configuration) model.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Simple undirected graph; edges are stored once with `i < j`, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::invalid(format!("self-loop on vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::invalid(format!("edge ({a}, {b}) out of range for n = {n}")));
            }
            out.push((a.min(b), a.max(b)));
        }
        out.sort_unstable();
        if out.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("duplicate edge"));
        }
        Ok(Graph { n, edges: out })
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let all: Vec<usize> = (0..self.n).collect();
        induced_connected(&self.neighbors(), &all)
    }

    /// Breadth-first growth from `start`, visiting neighbours in ascending
    /// index order; returns the first `size` vertices reached, sorted.
    pub fn bfs_cluster(&self, start: usize, size: usize) -> Option<Vec<usize>> {
        let adj = self.neighbors();
        let mut seen = vec![false; self.n];
        let mut order = Vec::with_capacity(size);
        let mut queue = std::collections::VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            if order.len() == size {
                order.sort_unstable();
                return Some(order);
            }
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        None
    }
}

/// Whether `vertices` induce a connected subgraph of the adjacency lists.
pub(crate) fn induced_connected(adj: &[Vec<usize>], vertices: &[usize]) -> bool {
    let Some(&first) = vertices.first() else {
        return true;
    };
    let mut member = vec![false; adj.len()];
    for &v in vertices {
        member[v] = true;
    }
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![first];
    seen[first] = true;
    let mut count = 0;
    while let Some(v) = stack.pop() {
        count += 1;
        for &w in &adj[v] {
            if member[w] && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    count == vertices.len()
}

const MAX_PAIRING_ATTEMPTS: usize = 100_000;

/// Uniform-ish simple connected 3-regular graph on `n` vertices.
///
/// Stubs are shuffled and paired; draws with self-loops, multi-edges or more
/// than one component are rejected and redrawn from the same stream, so the
/// result depends only on `(n, seed)`.
pub fn generate_random_3regular(n: usize, seed: u64) -> Result<Graph> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::invalid(format!(
            "random 3-regular graph needs an even n >= 4, got {n}"
        )));
    }
    let mut rng = rng::stream(seed, "graph/3-regular", &[n as u64]);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| [v, v, v]).collect();
    'attempt: for _ in 0..MAX_PAIRING_ATTEMPTS {
        stubs.shuffle(&mut rng);
        let mut edges = Vec::with_capacity(3 * n / 2);
        for pair in stubs.chunks_exact(2) {
            let (a, b) = (pair[0], pair[1]);
            if a == b {
                continue 'attempt;
            }
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        let graph = Graph { n, edges };
        if graph.is_connected() {
            return Ok(graph);
        }
    }
    Err(Error::Generation(format!(
        "no simple connected 3-regular graph on {n} vertices after {MAX_PAIRING_ATTEMPTS} draws"
    )))
}
