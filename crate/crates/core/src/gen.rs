//! Seeded instance generators.
//!
//! Randomness comes from SplitMix64 (Steele, Lea & Flood 2014) with its
//! published constants, so a corpus can be regenerated bit for bit by any
//! implementation: the state advances by `0x9E3779B97F4A7C15` and each output
//! is mixed with multipliers `0xBF58476D1CE4E5B9` and `0x94D049BB133111EB`.
//! Bounded draws use `next() % bound`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Discount, Graph, Layout, Vertex};
use crate::tree_exact::RootedTree;

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-ish draw from `0..bound`; `bound` must be positive.
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }

    /// Draw from the inclusive range `lo..=hi`.
    pub fn in_range(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.below(hi - lo + 1)
    }
}

/// Inclusive integer weight range for random instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WeightRange {
    pub lo: u64,
    pub hi: u64,
}

impl WeightRange {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if lo == 0 || hi < lo {
            return Err(Error::InvalidParameter(format!(
                "weight range {}..={} must be non-empty and positive",
                lo, hi
            )));
        }
        Ok(WeightRange { lo, hi })
    }
}

impl Default for WeightRange {
    fn default() -> Self {
        WeightRange { lo: 1, hi: 10 }
    }
}

/// Star-path family on which greedy realizes only `ell - 1 + k` edges while
/// the optimum realizes `2 k ell`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedyTight {
    #[serde(skip)]
    pub graph: Graph,
    pub k: usize,
    pub ell: usize,
    /// Star-by-star layout: `k` leaves, the center, the other `k` leaves.
    pub optimal_order: Vec<Vertex>,
    pub opt_value: f64,
    /// Greedy start vertex (the first center on the path).
    pub adversarial_start: Vertex,
    /// Tie-break preference: centers in path order, then the last center's
    /// leaves, then all other leaves.
    pub adversarial_preference: Vec<Vertex>,
    pub greedy_value: f64,
}

impl GreedyTight {
    pub fn optimal_layout(&self) -> Layout {
        Layout::from_order(self.graph.n(), self.optimal_order.clone())
            .expect("generated layout is a permutation")
    }

    pub fn discount(&self) -> Discount {
        Discount::step(self.k).expect("k >= 1")
    }

    pub fn center(&self, i: usize) -> Vertex {
        i + 1
    }
}

/// Builds the tight instance: centers `1..=ell` form a path and center `i`
/// owns leaves `ell + (i-1)*2k + 1 ..= ell + i*2k`.
pub fn gen_greedy_tight(k: usize, ell: usize) -> Result<GreedyTight> {
    if k == 0 || ell < 2 {
        return Err(Error::InvalidParameter(format!(
            "greedy-tight needs k >= 1 and ell >= 2 (got k = {}, ell = {})",
            k, ell
        )));
    }
    let n = (2 * k + 1) * ell;
    let leaf = |center: usize, j: usize| ell + (center - 1) * 2 * k + j + 1;
    let mut edges = Vec::new();
    for c in 1..ell {
        edges.push((c, c + 1, 1.0));
    }
    for c in 1..=ell {
        for j in 0..2 * k {
            edges.push((c, leaf(c, j), 1.0));
        }
    }
    let graph = Graph::new(n, edges)?;

    let mut optimal_order = Vec::with_capacity(n);
    for c in 1..=ell {
        optimal_order.extend((0..k).map(|j| leaf(c, j)));
        optimal_order.push(c);
        optimal_order.extend((k..2 * k).map(|j| leaf(c, j)));
    }

    let mut preference: Vec<Vertex> = (1..=ell).collect();
    preference.extend((0..2 * k).map(|j| leaf(ell, j)));
    for c in 1..ell {
        preference.extend((0..2 * k).map(|j| leaf(c, j)));
    }

    Ok(GreedyTight {
        graph,
        k,
        ell,
        optimal_order,
        opt_value: (2 * k * ell) as f64,
        adversarial_start: 1,
        adversarial_preference: preference,
        greedy_value: (ell - 1 + k) as f64,
    })
}

/// Random tree on `1..=n` rooted at 1: vertex `v >= 2` attaches to a parent
/// drawn uniformly from `1..v`, with an integer weight drawn from `weights`.
pub fn gen_random_tree(n: usize, seed: u64, weights: WeightRange) -> Result<RootedTree> {
    if n == 0 {
        return Err(Error::InvalidParameter("a tree needs at least one vertex".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for v in 2..=n {
        let parent = 1 + rng.below(v as u64 - 1) as usize;
        let w = rng.in_range(weights.lo, weights.hi) as f64;
        edges.push((parent, v, w));
    }
    let graph = Graph::new(n, edges)?;
    RootedTree::new(&graph, 1)
}

/// `m` distinct random edges on `1..=n` with integer weights from `weights`.
pub fn gen_random_graph(n: usize, m: usize, seed: u64, weights: WeightRange) -> Result<Graph> {
    let max_m = n * n.saturating_sub(1) / 2;
    if m > max_m {
        return Err(Error::InvalidParameter(format!(
            "{} edges requested but {} vertices allow at most {}",
            m, n, max_m
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let mut pairs = Vec::with_capacity(max_m);
    for u in 1..=n {
        for v in u + 1..=n {
            pairs.push((u, v));
        }
    }
    // partial Fisher-Yates: the first m slots become a uniform m-subset
    for i in 0..m {
        let j = i + rng.below((pairs.len() - i) as u64) as usize;
        pairs.swap(i, j);
    }
    let mut chosen: Vec<(Vertex, Vertex)> = pairs[..m].to_vec();
    chosen.sort_unstable();
    let edges: Vec<_> = chosen
        .into_iter()
        .map(|(u, v)| (u, v, rng.in_range(weights.lo, weights.hi) as f64))
        .collect();
    Graph::new(n, edges)
}
