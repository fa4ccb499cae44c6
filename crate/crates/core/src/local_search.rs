//! Move-based local search. A move pulls `ell` vertices out of the current
//! ordering (the rest keep their relative order) and appends them at the end
//! in their best internal order. Each iteration applies the best move and
//! stops once no move gains at least `delta / n` times the current score.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::greedy::{greedy, GreedyOptions};
use crate::model::{score_order, Algorithm, Discount, Graph, Layout, SolveReport, Vertex, TOLERANCE};
use crate::oracle::next_permutation;

pub const DEFAULT_FACTORIAL_LIMIT: usize = 7;

#[derive(Debug, Clone, PartialEq)]
pub struct LocalSearchOptions {
    /// Number of vertices moved per step; `k <= ell <= n`.
    pub ell: usize,
    /// Relative improvement threshold; 0 runs to a true local optimum.
    pub delta: f64,
    /// Starting layout; `None` starts from the default greedy run.
    pub init: Option<Layout>,
    /// Largest subset whose orderings may be enumerated.
    pub factorial_limit: usize,
    /// Evaluate the moves of an iteration on the rayon pool.
    pub parallel: bool,
}

impl LocalSearchOptions {
    pub fn new(ell: usize, delta: f64) -> Self {
        LocalSearchOptions {
            ell,
            delta,
            init: None,
            factorial_limit: DEFAULT_FACTORIAL_LIMIT,
            parallel: true,
        }
    }
}

/// Best ordering of `subset` by the weight of the edges inside it, measured
/// with distances inside the sub-ordering. Ties keep the lexicographically
/// first ordering.
pub fn optimal_subsequence(
    g: &Graph,
    subset: &[Vertex],
    f: &Discount,
    factorial_limit: usize,
) -> Result<(Vec<Vertex>, f64)> {
    if subset.len() > factorial_limit {
        return Err(Error::LimitExceeded {
            what: "subset size",
            actual: subset.len(),
            limit: factorial_limit,
        });
    }
    let mut perm = subset.to_vec();
    perm.sort_unstable();
    if perm.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidParameter("subset contains a repeated vertex".into()));
    }
    if let Some(&v) = perm.iter().find(|&&v| v == 0 || v > g.n()) {
        return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
    }
    let mut inside = vec![false; g.n() + 1];
    for &v in &perm {
        inside[v] = true;
    }
    let internal: Vec<_> = g
        .edges()
        .iter()
        .filter(|e| inside[e.u] && inside[e.v])
        .copied()
        .collect();
    let mut pos = vec![0usize; g.n() + 1];
    let mut best = (perm.clone(), f64::NEG_INFINITY);
    loop {
        for (i, &v) in perm.iter().enumerate() {
            pos[v] = i;
        }
        let value: f64 = internal
            .iter()
            .map(|e| f.at(pos[e.u].abs_diff(pos[e.v])) * e.w)
            .sum();
        if value > best.1 {
            best = (perm.clone(), value);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.1 = best.1.max(0.0);
    Ok(best)
}

/// All `size`-subsets of `1..=n` in lexicographic order.
pub fn combinations(n: usize, size: usize) -> Vec<Vec<Vertex>> {
    let mut out = Vec::new();
    if size > n {
        return out;
    }
    let mut cur: Vec<Vertex> = (1..=size).collect();
    loop {
        out.push(cur.clone());
        // advance the rightmost position that still has room
        let mut i = size;
        while i > 0 && cur[i - 1] == n - size + i {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for j in i..size {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

#[derive(Debug, Clone)]
struct Move {
    subset_index: usize,
    order: Vec<Vertex>,
    value: f64,
}

/// Best append-at-end move for one subset, scored on the full layout.
fn evaluate_move(g: &Graph, f: &Discount, current: &[Vertex], subset: &[Vertex], subset_index: usize) -> Move {
    let n = g.n();
    let mut chosen = vec![false; n + 1];
    for &v in subset {
        chosen[v] = true;
    }
    let mut seq: Vec<Vertex> = current.iter().copied().filter(|&v| !chosen[v]).collect();
    let head = seq.len();
    seq.extend_from_slice(subset);
    let mut pos = vec![0usize; n + 1];
    let mut best = Move {
        subset_index,
        order: seq.clone(),
        value: f64::NEG_INFINITY,
    };
    loop {
        let value = score_order(g, &seq, f, &mut pos);
        if value > best.value {
            best.value = value;
            best.order.copy_from_slice(&seq);
        }
        if !next_permutation(&mut seq[head..]) {
            break;
        }
    }
    best
}

fn better(a: Move, b: Move) -> Move {
    if b.value > a.value || (b.value == a.value && b.subset_index < a.subset_index) {
        b
    } else {
        a
    }
}

pub fn local_search_solve(g: &Graph, f: &Discount, opts: &LocalSearchOptions) -> Result<SolveReport> {
    let started = Instant::now();
    let n = g.n();
    let k = f.k();
    if opts.ell < k || opts.ell > n {
        return Err(Error::InvalidParameter(format!(
            "ell = {} must satisfy k = {} <= ell <= n = {}",
            opts.ell, k, n
        )));
    }
    if opts.ell > opts.factorial_limit {
        return Err(Error::LimitExceeded {
            what: "ell",
            actual: opts.ell,
            limit: opts.factorial_limit,
        });
    }
    if !(opts.delta.is_finite() && opts.delta >= 0.0) {
        return Err(Error::InvalidParameter(format!("delta = {} must be a finite non-negative number", opts.delta)));
    }

    let init = match &opts.init {
        Some(layout) => {
            if layout.n() != n {
                return Err(Error::InvalidLayout(format!(
                    "initial layout has {} vertices, graph has {}",
                    layout.n(),
                    n
                )));
            }
            layout.clone()
        }
        None => greedy(g, f, &GreedyOptions::default())?.layout,
    };

    let subsets = combinations(n, opts.ell);
    let mut current: Vec<Vertex> = init.into_order();
    let mut pos = vec![0usize; n + 1];
    let mut value = score_order(g, &current, f, &mut pos);
    let mut accepted = 0u64;
    let mut evaluated = 0u64;

    loop {
        let eval = |(i, s): (usize, &Vec<Vertex>)| evaluate_move(g, f, &current, s, i);
        let best = if opts.parallel {
            subsets.par_iter().enumerate().map(eval).reduce_with(better)
        } else {
            subsets.iter().enumerate().map(eval).reduce(better)
        };
        evaluated += subsets.len() as u64;
        let Some(best) = best else { break };
        let gain = best.value - value;
        if gain > TOLERANCE && gain >= opts.delta / n as f64 * value {
            current = best.order;
            value = best.value;
            accepted += 1;
        } else {
            break;
        }
    }

    let layout = Layout::from_order(n, current)?;
    Ok(SolveReport::new(Algorithm::LocalSearch, g, f, layout)?
        .with_stat("moves_accepted", accepted)
        .with_stat("moves_evaluated", evaluated)
        .with_stat("millis", started.elapsed().as_millis() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_random_graph, WeightRange};
    use crate::model::score;
    use crate::oracle::brute_force_opt;

    #[test]
    fn combinations_in_order() {
        assert_eq!(
            combinations(4, 2),
            vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![3, 4]]
        );
        assert_eq!(combinations(3, 3), vec![vec![1, 2, 3]]);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
        assert_eq!(combinations(8, 4).len(), 70);
    }

    #[test]
    fn subsequence_of_an_edge() {
        let g = Graph::new(3, [(1, 2, 4.0), (2, 3, 1.0)]).unwrap();
        let f = Discount::step(1).unwrap();
        let (order, value) = optimal_subsequence(&g, &[2, 1], &f, 7).unwrap();
        assert_eq!(value, 4.0);
        assert_eq!(order, vec![1, 2]);
    }

    #[test]
    fn subsequence_of_everything_is_the_optimum() {
        let g = gen_random_graph(6, 9, 4, WeightRange::default()).unwrap();
        let f = Discount::linear(3).unwrap();
        let all: Vec<_> = (1..=6).collect();
        let (_, v) = optimal_subsequence(&g, &all, &f, 7).unwrap();
        assert!((v - brute_force_opt(&g, &f).unwrap().1).abs() <= TOLERANCE);
    }

    #[test]
    fn subsequence_limits() {
        let g = Graph::edgeless(9);
        let f = Discount::step(1).unwrap();
        let big: Vec<_> = (1..=8).collect();
        assert!(matches!(
            optimal_subsequence(&g, &big, &f, 7),
            Err(Error::LimitExceeded { actual: 8, .. })
        ));
        assert!(optimal_subsequence(&g, &[1, 1], &f, 7).is_err());
        assert!(optimal_subsequence(&g, &[10], &f, 7).is_err());
    }

    #[test]
    fn single_edge_is_already_optimal() {
        let g = Graph::new(2, [(1, 2, 3.0)]).unwrap();
        let r = local_search_solve(&g, &Discount::step(1).unwrap(), &LocalSearchOptions::new(2, 0.0)).unwrap();
        assert_eq!(r.value, 3.0);
        assert_eq!(r.stat("moves_accepted"), Some(0));
    }

    #[test]
    fn parameter_checks() {
        let g = gen_random_graph(6, 8, 1, WeightRange::default()).unwrap();
        let f = Discount::step(3).unwrap();
        assert!(local_search_solve(&g, &f, &LocalSearchOptions::new(2, 0.0)).is_err());
        assert!(local_search_solve(&g, &f, &LocalSearchOptions::new(7, 0.0)).is_err());
        assert!(local_search_solve(&g, &f, &LocalSearchOptions::new(3, -0.1)).is_err());
        assert!(local_search_solve(&g, &f, &LocalSearchOptions::new(3, f64::NAN)).is_err());
        let mut opts = LocalSearchOptions::new(3, 0.0);
        opts.init = Some(Layout::identity(5));
        assert!(local_search_solve(&g, &f, &opts).is_err());
    }

    #[test]
    fn never_worse_than_the_start() {
        let f = Discount::linear(2).unwrap();
        for seed in 0..20 {
            let g = gen_random_graph(7, 10, seed, WeightRange::default()).unwrap();
            let init = Layout::identity(7);
            let start = score(&g, &init, &f).unwrap();
            let mut opts = LocalSearchOptions::new(3, 0.0);
            opts.init = Some(init);
            let r = local_search_solve(&g, &f, &opts).unwrap();
            assert!(r.value >= start);
        }
    }

    #[test]
    fn parallel_and_sequential_runs_agree() {
        let f = Discount::step(2).unwrap();
        for seed in 0..10 {
            let g = gen_random_graph(8, 13, seed, WeightRange::new(1, 3).unwrap()).unwrap();
            let mut opts = LocalSearchOptions::new(4, 0.0);
            let a = local_search_solve(&g, &f, &opts).unwrap();
            opts.parallel = false;
            let b = local_search_solve(&g, &f, &opts).unwrap();
            assert_eq!(a.layout, b.layout);
            assert_eq!(a.stat("moves_accepted"), b.stat("moves_accepted"));
        }
    }
}
