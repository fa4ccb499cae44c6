//! Graph, discount and layout types plus the objective every solver maximizes.
//!
//! Vertices are dense 1-based ids `1..=n`. Per-vertex arrays are sized `n + 1`
//! with slot 0 unused so that ids index them directly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

pub type Vertex = usize;

/// Absolute tolerance for comparing objective values that are not exactly representable.
pub const TOLERANCE: f64 = 1e-9;

/// An undirected edge with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Edge {
    pub u: Vertex,
    pub v: Vertex,
    pub w: f64,
}

impl Edge {
    pub fn other(&self, x: Vertex) -> Vertex {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Undirected graph with strictly positive edge weights and no parallel edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(Vertex, f64)>>,
}

impl Graph {
    /// Builds a graph from undirected edges. Repeated pairs are summed; the
    /// stored edge list is sorted by `(u, v)` with `u < v`.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex, f64)>) -> Result<Self> {
        let mut merged: BTreeMap<(Vertex, Vertex), f64> = BTreeMap::new();
        for (u, v, w) in edges {
            check_endpoint(u, n)?;
            check_endpoint(v, n)?;
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidWeight { u, v, weight: w });
            }
            *merged.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
        }
        let edges: Vec<Edge> = merged
            .into_iter()
            .map(|((u, v), w)| Edge { u, v, w })
            .collect();
        let mut adj = vec![Vec::new(); n + 1];
        for e in &edges {
            adj[e.u].push((e.v, e.w));
            adj[e.v].push((e.u, e.w));
        }
        for list in &mut adj {
            list.sort_by_key(|&(x, _)| x);
        }
        Ok(Graph { n, edges, adj })
    }

    pub fn edgeless(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n + 1],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `v` with edge weights, sorted by neighbor id.
    pub fn neighbors(&self, v: Vertex) -> &[(Vertex, f64)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn weight(&self, u: Vertex, v: Vertex) -> Option<f64> {
        let list = &self.adj[u];
        list.binary_search_by_key(&v, |&(x, _)| x)
            .ok()
            .map(|i| list[i].1)
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        1..=self.n
    }

    /// Renames every vertex `v` to `perm[v - 1]`.
    pub fn relabel(&self, perm: &[Vertex]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::InvalidParameter(format!(
                "relabeling has {} entries, graph has {} vertices",
                perm.len(),
                self.n
            )));
        }
        Graph::new(
            self.n,
            self.edges.iter().map(|e| (perm[e.u - 1], perm[e.v - 1], e.w)),
        )
    }
}

fn check_endpoint(v: Vertex, n: usize) -> Result<()> {
    if v == 0 || v > n {
        Err(Error::VertexOutOfRange { vertex: v, n })
    } else {
        Ok(())
    }
}

/// Combines a directed arc list into an undirected graph: the weight of `{u, v}`
/// is the sum of the weights of all arcs `(u, v)` and `(v, u)`.
pub fn merge_directed(n: usize, arcs: &[(Vertex, Vertex, f64)]) -> Result<Graph> {
    Graph::new(n, arcs.iter().copied())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DiscountKind {
    /// `f(i) = 1` for `i <= k`.
    Step,
    /// `f(1) = 1`, `f(i) = max(0, 1 - i/k)` for `2 <= i <= k`.
    Linear,
    /// Explicit values `f(1)..f(k)`.
    Table(Vec<f64>),
}

/// Non-increasing discount with `f(1) = 1`, stored for distances `1..=k`;
/// every larger distance is discounted to zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discount {
    table: Vec<f64>,
}

impl Discount {
    pub fn new(kind: DiscountKind, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidDiscount("window k must be at least 1".into()));
        }
        let table = match kind {
            DiscountKind::Step => vec![1.0; k],
            DiscountKind::Linear => (1..=k)
                .map(|i| {
                    if i == 1 {
                        1.0
                    } else {
                        (1.0 - i as f64 / k as f64).max(0.0)
                    }
                })
                .collect(),
            DiscountKind::Table(values) => {
                if values.len() != k {
                    return Err(Error::InvalidDiscount(format!(
                        "table has {} values but k = {}",
                        values.len(),
                        k
                    )));
                }
                values
            }
        };
        Self::from_table(table)
    }

    pub fn step(k: usize) -> Result<Self> {
        Self::new(DiscountKind::Step, k)
    }

    pub fn linear(k: usize) -> Result<Self> {
        Self::new(DiscountKind::Linear, k)
    }

    pub fn from_table(table: Vec<f64>) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::InvalidDiscount("table is empty".into()));
        }
        if table[0] != 1.0 {
            return Err(Error::InvalidDiscount(format!("f(1) = {} but must be 1", table[0])));
        }
        for (i, &x) in table.iter().enumerate() {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::InvalidDiscount(format!("f({}) = {} is outside [0, 1]", i + 1, x)));
            }
        }
        if let Some(i) = table.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::InvalidDiscount(format!(
                "f({}) = {} < f({}) = {}",
                i + 1,
                table[i],
                i + 2,
                table[i + 1]
            )));
        }
        Ok(Discount { table })
    }

    pub fn k(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// `f(distance)`; zero beyond the window.
    #[inline]
    pub fn at(&self, distance: usize) -> f64 {
        if distance == 0 || distance > self.table.len() {
            0.0
        } else {
            self.table[distance - 1]
        }
    }
}

/// A vertex ordering: `order[i]` sits at position `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    order: Vec<Vertex>,
    position: Vec<usize>,
}

impl Layout {
    pub fn from_order(n: usize, order: Vec<Vertex>) -> Result<Self> {
        if order.len() != n {
            return Err(Error::InvalidLayout(format!(
                "layout lists {} vertices, expected {}",
                order.len(),
                n
            )));
        }
        let mut position = vec![0; n + 1];
        for (i, &v) in order.iter().enumerate() {
            if v == 0 || v > n {
                return Err(Error::InvalidLayout(format!("vertex {} is out of range 1..={}", v, n)));
            }
            if position[v] != 0 {
                return Err(Error::InvalidLayout(format!("vertex {} appears twice", v)));
            }
            position[v] = i + 1;
        }
        Ok(Layout { order, position })
    }

    pub fn identity(n: usize) -> Self {
        Layout {
            order: (1..=n).collect(),
            position: (0..=n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[Vertex] {
        &self.order
    }

    /// 1-based position of `v`.
    #[inline]
    pub fn position(&self, v: Vertex) -> usize {
        self.position[v]
    }

    pub fn reversed(&self) -> Self {
        let order: Vec<Vertex> = self.order.iter().rev().copied().collect();
        Layout::from_order(self.n(), order).expect("reversal of a permutation is a permutation")
    }

    pub fn into_order(self) -> Vec<Vertex> {
        self.order
    }
}

fn check_layout(g: &Graph, layout: &Layout) -> Result<()> {
    if layout.n() != g.n() {
        return Err(Error::InvalidLayout(format!(
            "layout has {} vertices but the graph has {}",
            layout.n(),
            g.n()
        )));
    }
    Ok(())
}

/// Ext-TSP objective: sum over edges of `f(|d_u - d_v|) * w(u, v)`.
pub fn score(g: &Graph, layout: &Layout, f: &Discount) -> Result<f64> {
    check_layout(g, layout)?;
    Ok(score_unchecked(g, layout, f))
}

pub(crate) fn score_unchecked(g: &Graph, layout: &Layout, f: &Discount) -> f64 {
    g.edges()
        .iter()
        .map(|e| f.at(layout.position(e.u).abs_diff(layout.position(e.v))) * e.w)
        .sum()
}

/// Scores a vertex sequence directly; `pos` is scratch space of length `n + 1`.
pub(crate) fn score_order(g: &Graph, order: &[Vertex], f: &Discount, pos: &mut [usize]) -> f64 {
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i + 1;
    }
    g.edges()
        .iter()
        .map(|e| f.at(pos[e.u].abs_diff(pos[e.v])) * e.w)
        .sum()
}

/// Edges whose endpoints lie at most `k` positions apart.
pub fn realized_edges(g: &Graph, layout: &Layout, k: usize) -> Result<Vec<Edge>> {
    check_layout(g, layout)?;
    Ok(g.edges()
        .iter()
        .filter(|e| layout.position(e.u).abs_diff(layout.position(e.v)) <= k)
        .copied()
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Greedy,
    CycleCover,
    LocalSearch,
    TreeExact,
    BruteForce,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Greedy,
        Algorithm::CycleCover,
        Algorithm::LocalSearch,
        Algorithm::TreeExact,
        Algorithm::BruteForce,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::CycleCover => "cycle-cover",
            Algorithm::LocalSearch => "local-search",
            Algorithm::TreeExact => "tree-exact",
            Algorithm::BruteForce => "brute-force",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm '{}'", s)))
    }
}

/// Result of a solver run. `value` is always the score of `layout`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub layout: Layout,
    pub value: f64,
    pub stats: BTreeMap<String, u64>,
}

impl SolveReport {
    /// Scores `layout` from scratch and wraps it.
    pub fn new(algorithm: Algorithm, g: &Graph, f: &Discount, layout: Layout) -> Result<Self> {
        let value = score(g, &layout, f)?;
        Ok(SolveReport {
            algorithm,
            layout,
            value,
            stats: BTreeMap::new(),
        })
    }

    pub fn with_stat(mut self, name: &str, value: u64) -> Self {
        self.stats.insert(name.to_string(), value);
        self
    }

    pub fn stat(&self, name: &str) -> Option<u64> {
        self.stats.get(name).copied()
    }
}
