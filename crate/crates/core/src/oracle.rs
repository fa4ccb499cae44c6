//! Exhaustive references. Deliberately naive: every solver is checked
//! against these at small sizes, so they must stay obvious by inspection.

use crate::error::{Error, Result};
use crate::model::{score_order, Discount, Edge, Graph, Layout};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Largest vertex count accepted by [`brute_force_opt_with`].
    pub max_vertices: usize,
    /// Largest edge count accepted by [`brute_force_2matching_with`].
    pub max_edges: usize,
    /// Skip orderings whose reversal is enumerated as well.
    pub reversal_pruning: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_vertices: 10,
            max_edges: 20,
            reversal_pruning: true,
        }
    }
}

/// Rearranges `items` into the next lexicographic permutation. Returns false
/// (leaving `items` sorted ascending) after the last one.
pub fn next_permutation<T: Ord>(items: &mut [T]) -> bool {
    if items.len() < 2 {
        return false;
    }
    let mut i = items.len() - 1;
    while i > 0 && items[i - 1] >= items[i] {
        i -= 1;
    }
    if i == 0 {
        items.reverse();
        return false;
    }
    let mut j = items.len() - 1;
    while items[j] <= items[i - 1] {
        j -= 1;
    }
    items.swap(i - 1, j);
    items[i..].reverse();
    true
}

pub fn brute_force_opt(g: &Graph, f: &Discount) -> Result<(Layout, f64)> {
    brute_force_opt_with(g, f, &OracleConfig::default())
}

/// Maximum of the objective over all `n!` orderings.
pub fn brute_force_opt_with(g: &Graph, f: &Discount, cfg: &OracleConfig) -> Result<(Layout, f64)> {
    let n = g.n();
    if n > cfg.max_vertices {
        return Err(Error::LimitExceeded {
            what: "vertex count",
            actual: n,
            limit: cfg.max_vertices,
        });
    }
    let mut order: Vec<usize> = (1..=n).collect();
    let mut pos = vec![0; n + 1];
    let mut best_order = order.clone();
    let mut best = f64::NEG_INFINITY;
    loop {
        // every ordering with first > last is the reversal of one with first < last
        let skip = cfg.reversal_pruning && n >= 2 && order[0] > order[n - 1];
        if !skip {
            let value = score_order(g, &order, f, &mut pos);
            if value > best {
                best = value;
                best_order.copy_from_slice(&order);
            }
        }
        if !next_permutation(&mut order) {
            break;
        }
    }
    let best = best.max(0.0);
    Ok((Layout::from_order(n, best_order)?, best))
}

pub fn brute_force_2matching(g: &Graph) -> Result<Vec<Edge>> {
    brute_force_2matching_with(g, &OracleConfig::default())
}

/// Maximum-weight edge subset with every degree at most 2, by include/exclude
/// search over the edge list pruned only on the degree constraint.
pub fn brute_force_2matching_with(g: &Graph, cfg: &OracleConfig) -> Result<Vec<Edge>> {
    let m = g.m();
    if m > cfg.max_edges {
        return Err(Error::LimitExceeded {
            what: "edge count",
            actual: m,
            limit: cfg.max_edges,
        });
    }

    struct Search<'a> {
        edges: &'a [Edge],
        degree: Vec<u8>,
        chosen: Vec<bool>,
        weight: f64,
        best: Vec<bool>,
        best_weight: f64,
    }

    impl Search<'_> {
        fn run(&mut self, i: usize) {
            if i == self.edges.len() {
                if self.weight > self.best_weight {
                    self.best_weight = self.weight;
                    self.best.copy_from_slice(&self.chosen);
                }
                return;
            }
            let e = self.edges[i];
            if self.degree[e.u] < 2 && self.degree[e.v] < 2 {
                self.degree[e.u] += 1;
                self.degree[e.v] += 1;
                self.chosen[i] = true;
                self.weight += e.w;
                self.run(i + 1);
                self.weight -= e.w;
                self.chosen[i] = false;
                self.degree[e.u] -= 1;
                self.degree[e.v] -= 1;
            }
            self.run(i + 1);
        }
    }

    let mut search = Search {
        edges: g.edges(),
        degree: vec![0; g.n() + 1],
        chosen: vec![false; m],
        weight: 0.0,
        best: vec![false; m],
        best_weight: f64::NEG_INFINITY,
    };
    search.run(0);
    Ok(g.edges()
        .iter()
        .zip(&search.best)
        .filter(|(_, &keep)| keep)
        .map(|(e, _)| *e)
        .collect())
}
