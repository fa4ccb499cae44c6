//! Greedy sequencing: repeatedly append the unplaced neighbor joined to the
//! last-placed vertex by the heaviest edge.
//!
//! When the last vertex has no unplaced neighbor the walk restarts at the
//! unplaced vertex incident to the heaviest edge among unplaced vertices, or
//! at the best-ranked unplaced vertex if no such edge remains. `Start::Auto`
//! applies the same rule to pick the first vertex.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::model::{Algorithm, Discount, Graph, Layout, SolveReport, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Start {
    #[default]
    Auto,
    Vertex(Vertex),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Among equal weights prefer the smaller vertex id.
    #[default]
    LowestId,
    /// Prefer vertices earlier in the list; unlisted vertices come after all
    /// listed ones, by id.
    Preference(Vec<Vertex>),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GreedyOptions {
    pub start: Start,
    pub tie_break: TieBreak,
}

/// Total-order wrapper so weights can live in a heap.
#[derive(Debug, Clone, Copy, PartialEq)]
struct W(f64);

impl Eq for W {}

impl PartialOrd for W {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for W {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

fn ranks(g: &Graph, tie_break: &TieBreak) -> Result<Vec<usize>> {
    let n = g.n();
    match tie_break {
        TieBreak::LowestId => Ok((0..=n).collect()),
        TieBreak::Preference(list) => {
            let mut rank = vec![usize::MAX; n + 1];
            for (i, &v) in list.iter().enumerate() {
                if v == 0 || v > n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
                if rank[v] != usize::MAX {
                    return Err(Error::InvalidParameter(format!(
                        "vertex {} appears twice in the preference list",
                        v
                    )));
                }
                rank[v] = i;
            }
            for (v, r) in rank.iter_mut().enumerate().skip(1) {
                if *r == usize::MAX {
                    *r = list.len() + v;
                }
            }
            Ok(rank)
        }
    }
}

fn check_start(g: &Graph, start: &Start) -> Result<()> {
    match *start {
        Start::Vertex(v) if v == 0 || v > g.n() => Err(Error::VertexOutOfRange { vertex: v, n: g.n() }),
        _ => Ok(()),
    }
}

type EdgeKey = (W, Reverse<usize>, Reverse<usize>);

/// Orders an edge as a restart candidate: heavier first, then by the rank of
/// its better endpoint, then by the rank of the other. Returns the key and the
/// endpoint to jump to.
fn edge_key(u: Vertex, v: Vertex, w: f64, rank: &[usize]) -> (EdgeKey, Vertex) {
    let (a, b) = if rank[u] < rank[v] { (u, v) } else { (v, u) };
    ((W(w), Reverse(rank[a]), Reverse(rank[b])), a)
}

/// Heap-based greedy running in O(m log n).
pub fn greedy(g: &Graph, f: &Discount, opts: &GreedyOptions) -> Result<SolveReport> {
    let started = Instant::now();
    let n = g.n();
    if n == 0 {
        return Err(Error::InvalidParameter("greedy needs a nonempty graph".into()));
    }
    check_start(g, &opts.start)?;
    let rank = ranks(g, &opts.tie_break)?;

    let mut placed = vec![false; n + 1];
    let mut priority = vec![0.0_f64; n + 1];
    let mut version = vec![0u64; n + 1];
    let mut heap: BinaryHeap<(W, Reverse<usize>, Vertex, u64)> = BinaryHeap::new();
    let mut edge_heap: BinaryHeap<(EdgeKey, Vertex, Vertex)> = g
        .edges()
        .iter()
        .map(|e| {
            let (key, _) = edge_key(e.u, e.v, e.w, &rank);
            (key, e.u, e.v)
        })
        .collect();
    let mut by_rank: Vec<Vertex> = (1..=n).collect();
    by_rank.sort_by_key(|&v| rank[v]);
    let mut rank_cursor = 0;

    let mut order = Vec::with_capacity(n);
    let mut updates = 0u64;
    let mut restarts = 0u64;
    let mut last: Option<Vertex> = None;

    while order.len() < n {
        let mut next = None;
        if last.is_some() {
            while let Some(&(W(w), _, v, ver)) = heap.peek() {
                if placed[v] || ver != version[v] || w <= 0.0 {
                    heap.pop();
                    continue;
                }
                next = Some(v);
                break;
            }
        }
        let next = match (next, last, &opts.start) {
            (Some(v), _, _) => v,
            (None, None, Start::Vertex(s)) => *s,
            (None, _, _) => {
                if last.is_some() {
                    restarts += 1;
                }
                let mut pick = None;
                while let Some(&(_, u, v)) = edge_heap.peek() {
                    if placed[u] || placed[v] {
                        edge_heap.pop();
                        continue;
                    }
                    pick = Some(edge_key(u, v, 0.0, &rank).1);
                    break;
                }
                match pick {
                    Some(v) => v,
                    None => {
                        while placed[by_rank[rank_cursor]] {
                            rank_cursor += 1;
                        }
                        by_rank[rank_cursor]
                    }
                }
            }
        };

        placed[next] = true;
        order.push(next);
        if let Some(prev) = last {
            for &(x, _) in g.neighbors(prev) {
                if !placed[x] && priority[x] != 0.0 {
                    priority[x] = 0.0;
                    version[x] += 1;
                    updates += 1;
                }
            }
        }
        for &(x, w) in g.neighbors(next) {
            if !placed[x] {
                priority[x] = w;
                version[x] += 1;
                updates += 1;
                heap.push((W(w), Reverse(rank[x]), x, version[x]));
            }
        }
        last = Some(next);
    }

    let layout = Layout::from_order(n, order)?;
    Ok(SolveReport::new(Algorithm::Greedy, g, f, layout)?
        .with_stat("priority_updates", updates)
        .with_stat("restarts", restarts)
        .with_stat("millis", started.elapsed().as_millis() as u64))
}

/// Same decisions as [`greedy`], found by rescanning the whole edge list at
/// every step (O(n m)). Kept as an independent cross-check.
pub fn greedy_naive(g: &Graph, f: &Discount, opts: &GreedyOptions) -> Result<SolveReport> {
    let n = g.n();
    if n == 0 {
        return Err(Error::InvalidParameter("greedy needs a nonempty graph".into()));
    }
    check_start(g, &opts.start)?;
    let rank = ranks(g, &opts.tie_break)?;
    let mut placed = vec![false; n + 1];
    let mut order = Vec::with_capacity(n);
    let mut last: Option<Vertex> = None;

    while order.len() < n {
        let mut next: Option<(f64, Vertex)> = None;
        if let Some(u) = last {
            for e in g.edges() {
                let x = if e.u == u {
                    e.v
                } else if e.v == u {
                    e.u
                } else {
                    continue;
                };
                if placed[x] {
                    continue;
                }
                let better = match next {
                    None => true,
                    Some((bw, bx)) => e.w > bw || (e.w == bw && rank[x] < rank[bx]),
                };
                if better {
                    next = Some((e.w, x));
                }
            }
        }
        let v = match (next, last, &opts.start) {
            (Some((_, x)), _, _) => x,
            (None, None, Start::Vertex(s)) => *s,
            (None, _, _) => {
                let mut best: Option<(EdgeKey, Vertex)> = None;
                for e in g.edges() {
                    if placed[e.u] || placed[e.v] {
                        continue;
                    }
                    let cand = edge_key(e.u, e.v, e.w, &rank);
                    if best.as_ref().is_none_or(|b| cand.0 > b.0) {
                        best = Some(cand);
                    }
                }
                match best {
                    Some((_, x)) => x,
                    None => (1..=n).filter(|&x| !placed[x]).min_by_key(|&x| rank[x]).unwrap(),
                }
            }
        };
        placed[v] = true;
        order.push(v);
        last = Some(v);
    }
    SolveReport::new(Algorithm::Greedy, g, f, Layout::from_order(n, order)?)
}
