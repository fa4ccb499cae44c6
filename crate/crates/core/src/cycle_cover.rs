//! Cycle-cover approximation: take a maximum-weight simple 2-matching, break
//! every cycle at its lightest edge and lay the resulting paths end to end.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::matching::max_weight_matching;
use crate::model::{Algorithm, Discount, Edge, Graph, Layout, SolveReport, Vertex};

/// Edge subset in which every vertex has degree at most 2.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TwoMatching {
    pub edges: Vec<Edge>,
}

impl TwoMatching {
    pub fn weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn max_degree(&self, n: usize) -> usize {
        let mut deg = vec![0usize; n + 1];
        for e in &self.edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }
}

/// A simple path, listed from its smaller endpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub vertices: Vec<Vertex>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathSet {
    /// Ordered by smallest vertex id.
    pub paths: Vec<Path>,
    /// One edge per broken cycle.
    pub removed: Vec<Edge>,
}

impl PathSet {
    pub fn weight(&self) -> f64 {
        self.paths.iter().map(|p| p.weight).sum()
    }

    pub fn removed_weight(&self) -> f64 {
        self.removed.iter().map(|e| e.w).sum()
    }
}

/// Exact maximum-weight simple 2-matching.
///
/// Each vertex `v` is split into two copies and each edge `e = {u, v}` into a
/// gadget `a_e - b_e` with `a_e` joined to both copies of `u` and `b_e` to both
/// copies of `v`, all at weight `w(e)`. A matching gains `2 w(e)` when both
/// gadget ends reach vertex copies and at most `w(e)` otherwise, so a maximum
/// matching weighs `w(E)` plus a maximum 2-matching, read off as the fully
/// used gadgets.
pub fn max_weight_2matching(g: &Graph) -> TwoMatching {
    let n = g.n();
    let m = g.m();
    if m == 0 {
        return TwoMatching::default();
    }
    let copy = |v: Vertex, i: usize| 2 * (v - 1) + i;
    let base = 2 * n;
    let mut edges = Vec::with_capacity(5 * m);
    for (i, e) in g.edges().iter().enumerate() {
        let a = base + 2 * i;
        let b = a + 1;
        edges.push((copy(e.u, 0), a, e.w));
        edges.push((copy(e.u, 1), a, e.w));
        edges.push((copy(e.v, 0), b, e.w));
        edges.push((copy(e.v, 1), b, e.w));
        edges.push((a, b, e.w));
    }
    let mate = max_weight_matching(base + 2 * m, &edges);
    let chosen = g
        .edges()
        .iter()
        .enumerate()
        .filter(|&(i, _)| {
            let a = base + 2 * i;
            matches!((mate[a], mate[a + 1]), (Some(x), Some(y)) if x < base && y < base)
        })
        .map(|(_, e)| *e)
        .collect();
    TwoMatching { edges: chosen }
}

/// Splits a 2-matching into paths, dropping the lightest edge of every cycle
/// (ties: lexicographically smallest endpoint pair).
pub fn break_cycles(a: &TwoMatching, g: &Graph) -> Result<PathSet> {
    let n = g.n();
    let mut adj: Vec<Vec<(Vertex, usize)>> = vec![Vec::new(); n + 1];
    for (i, e) in a.edges.iter().enumerate() {
        if e.u == 0 || e.v > n || e.u >= e.v {
            return Err(Error::Internal(format!("malformed 2-matching edge ({}, {})", e.u, e.v)));
        }
        adj[e.u].push((e.v, i));
        adj[e.v].push((e.u, i));
    }
    if let Some(v) = (1..=n).find(|&v| adj[v].len() > 2) {
        return Err(Error::Internal(format!("vertex {} has degree {} in the 2-matching", v, adj[v].len())));
    }

    let mut seen = vec![false; n + 1];
    let mut out = PathSet::default();
    for start in 1..=n {
        if seen[start] || adj[start].is_empty() {
            continue;
        }
        let mut comp = Vec::new();
        let mut edge_ids = Vec::new();
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(x) = stack.pop() {
            comp.push(x);
            for &(y, ei) in &adj[x] {
                if x < y {
                    edge_ids.push(ei);
                }
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        let is_cycle = edge_ids.len() == comp.len();
        let mut removed = None;
        if is_cycle {
            let lightest = edge_ids
                .iter()
                .copied()
                .min_by(|&x, &y| {
                    let (ex, ey) = (a.edges[x], a.edges[y]);
                    ex.w.total_cmp(&ey.w).then((ex.u, ex.v).cmp(&(ey.u, ey.v)))
                })
                .unwrap();
            removed = Some(lightest);
            out.removed.push(a.edges[lightest]);
        }
        let live = |ei: usize| Some(ei) != removed;
        let first = *comp
            .iter()
            .filter(|&&x| adj[x].iter().filter(|&&(_, ei)| live(ei)).count() == 1)
            .min()
            .ok_or_else(|| Error::Internal("component without an endpoint".into()))?;
        let mut vertices = vec![first];
        let mut weight = 0.0;
        let mut prev_edge = None;
        let mut cur = first;
        loop {
            let step = adj[cur]
                .iter()
                .find(|&&(_, ei)| live(ei) && Some(ei) != prev_edge)
                .copied();
            match step {
                Some((y, ei)) => {
                    weight += a.edges[ei].w;
                    vertices.push(y);
                    prev_edge = Some(ei);
                    cur = y;
                }
                None => break,
            }
        }
        if vertices.len() != comp.len() {
            return Err(Error::Internal("path walk did not cover its component".into()));
        }
        out.paths.push(Path { vertices, weight });
    }
    Ok(out)
}

/// Lays out `paths` in the given order, then every vertex not on any path by id.
pub fn concatenate(n: usize, paths: &[Path], order: &[usize]) -> Result<Layout> {
    let mut seq = Vec::with_capacity(n);
    let mut used = vec![false; n + 1];
    for &i in order {
        for &v in &paths[i].vertices {
            used[v] = true;
            seq.push(v);
        }
    }
    seq.extend((1..=n).filter(|&v| !used[v]));
    Layout::from_order(n, seq)
}

#[derive(Debug, Clone)]
pub struct CycleCoverRun {
    pub report: SolveReport,
    pub matching: TwoMatching,
    pub paths: PathSet,
}

pub fn cycle_cover_solve(g: &Graph, f: &Discount) -> Result<SolveReport> {
    Ok(cycle_cover_run(g, f)?.report)
}

/// Full pipeline, keeping the intermediate 2-matching and path set. Paths are
/// concatenated by descending weight, ties by smallest vertex id.
pub fn cycle_cover_run(g: &Graph, f: &Discount) -> Result<CycleCoverRun> {
    let started = Instant::now();
    let matching = max_weight_2matching(g);
    let paths = break_cycles(&matching, g)?;
    let mut order: Vec<usize> = (0..paths.paths.len()).collect();
    order.sort_by(|&x, &y| {
        let (px, py) = (&paths.paths[x], &paths.paths[y]);
        py.weight
            .total_cmp(&px.weight)
            .then(px.vertices.iter().min().cmp(&py.vertices.iter().min()))
    });
    let layout = concatenate(g.n(), &paths.paths, &order)?;
    let report = SolveReport::new(Algorithm::CycleCover, g, f, layout)?
        .with_stat("matching_edges", matching.edges.len() as u64)
        .with_stat("cycles_broken", paths.removed.len() as u64)
        .with_stat("paths", paths.paths.len() as u64)
        .with_stat("millis", started.elapsed().as_millis() as u64);
    Ok(CycleCoverRun {
        report,
        matching,
        paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_random_graph, SplitMix64, WeightRange};
    use crate::oracle::{brute_force_2matching, brute_force_opt};

    fn unit(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::new(n, edges.iter().map(|&(u, v)| (u, v, 1.0))).unwrap()
    }

    #[test]
    fn two_matching_examples() {
        let g = Graph::new(2, [(1, 2, 4.0)]).unwrap();
        assert_eq!(max_weight_2matching(&g).edges, g.edges().to_vec());
        let tri = unit(3, &[(1, 2), (2, 3), (1, 3)]);
        assert_eq!(max_weight_2matching(&tri).edges.len(), 3);
        assert!(max_weight_2matching(&Graph::edgeless(4)).edges.is_empty());
        let star = Graph::new(5, [(1, 2, 1.0), (1, 3, 2.0), (1, 4, 3.0), (1, 5, 4.0)]).unwrap();
        assert_eq!(max_weight_2matching(&star).weight(), 7.0);
    }

    #[test]
    fn two_matching_matches_oracle() {
        let mut rng = SplitMix64::new(5);
        for seed in 0..120 {
            let n = 3 + rng.below(6) as usize;
            let max_m = (n * (n - 1) / 2).min(14);
            let m = rng.below(max_m as u64 + 1) as usize;
            let g = gen_random_graph(n, m, seed, WeightRange::new(1, 6).unwrap()).unwrap();
            let a = max_weight_2matching(&g);
            assert!(a.max_degree(n) <= 2);
            let oracle: f64 = brute_force_2matching(&g).unwrap().iter().map(|e| e.w).sum();
            assert_eq!(a.weight(), oracle, "seed {}", seed);
        }
    }

    #[test]
    fn triangle_breaks_at_first_pair() {
        let tri = unit(3, &[(1, 2), (2, 3), (1, 3)]);
        let a = max_weight_2matching(&tri);
        let p = break_cycles(&a, &tri).unwrap();
        assert_eq!(p.removed.len(), 1);
        assert_eq!((p.removed[0].u, p.removed[0].v), (1, 2));
        assert_eq!(p.paths.len(), 1);
        assert_eq!(p.paths[0].vertices, vec![1, 3, 2]);
        assert_eq!(p.paths[0].weight, 2.0);
    }

    #[test]
    fn paths_are_left_alone() {
        let g = unit(5, &[(1, 2), (2, 3), (4, 5)]);
        let a = TwoMatching {
            edges: g.edges().to_vec(),
        };
        let p = break_cycles(&a, &g).unwrap();
        assert!(p.removed.is_empty());
        let seqs: Vec<_> = p.paths.iter().map(|p| p.vertices.clone()).collect();
        assert_eq!(seqs, vec![vec![1, 2, 3], vec![4, 5]]);
    }

    #[test]
    fn cycle_loses_unique_lightest_edge() {
        let g = Graph::new(4, [(1, 2, 5.0), (2, 3, 1.0), (3, 4, 5.0), (1, 4, 5.0)]).unwrap();
        let a = TwoMatching {
            edges: g.edges().to_vec(),
        };
        let p = break_cycles(&a, &g).unwrap();
        assert_eq!((p.removed[0].u, p.removed[0].v, p.removed[0].w), (2, 3, 1.0));
        assert_eq!(p.paths[0].vertices, vec![2, 1, 4, 3]);
        assert_eq!(p.weight(), 15.0);
    }

    #[test]
    fn degree_three_is_rejected() {
        let g = unit(4, &[(1, 2), (1, 3), (1, 4)]);
        let a = TwoMatching {
            edges: g.edges().to_vec(),
        };
        assert!(matches!(break_cycles(&a, &g), Err(Error::Internal(_))));
    }

    #[test]
    fn triangle_solution() {
        let tri = unit(3, &[(1, 2), (2, 3), (1, 3)]);
        let f = Discount::step(2).unwrap();
        let r = cycle_cover_solve(&tri, &f).unwrap();
        assert_eq!(r.layout.order(), &[1, 3, 2]);
        assert_eq!(r.value, 3.0);
        assert_eq!(brute_force_opt(&tri, &f).unwrap().1, 3.0);
    }

    #[test]
    fn path_graph_is_solved_exactly() {
        let g = Graph::new(5, [(1, 2, 2.0), (2, 3, 1.0), (3, 4, 4.0), (4, 5, 3.0)]).unwrap();
        let f = Discount::linear(3).unwrap();
        let r = cycle_cover_solve(&g, &f).unwrap();
        assert_eq!(r.value, g.total_weight());
        assert_eq!(r.value, brute_force_opt(&g, &f).unwrap().1);
    }

    #[test]
    fn isolated_vertices_go_last() {
        let g = Graph::new(5, [(2, 4, 1.0)]).unwrap();
        let r = cycle_cover_solve(&g, &Discount::step(1).unwrap()).unwrap();
        assert_eq!(r.layout.order(), &[2, 4, 1, 3, 5]);
    }
}
