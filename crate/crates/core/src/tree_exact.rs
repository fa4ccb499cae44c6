//! Exact solver for trees, polynomial for fixed window `k`.
//!
//! Some optimal layout places each connected component of its realized edges
//! contiguously. Processing vertices bottom-up, the optimum for the subtree
//! `T_z` is therefore the best choice of a root component `C` containing `z`
//! and an ordering of `C`, plus the already known optima of the subtrees
//! hanging below `C` (its *dangling* children).
//!
//! Components smaller than `k` are enumerated directly. Larger ones are found
//! as best paths through a graph of window states `(z, sigma, R)`: `sigma` is
//! the last `k` vertices placed and `R` the tree edges incident on `sigma`
//! that the placed prefix has realized. For a vertex `t` outside `sigma`, an
//! *entry port* is a `sigma` vertex whose tree path to `t` avoids the rest of
//! `sigma`; the port is closed when the first edge of that path is in `R`. A
//! state is valid when every component of `T_z - sigma` has all ports closed
//! (already laid out or dangling) or all open (untouched). Vertices in
//! untouched components are *reachable* and may be appended next.
//!
//! Paths are maximized layer by layer (layer = number of vertices placed), so
//! the search is well defined whether or not the state graph has cycles.

use std::collections::HashMap;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::model::{Algorithm, Discount, Graph, Layout, SolveReport, Vertex, TOLERANCE};
use crate::oracle::next_permutation;

const NONE: usize = usize::MAX;

/// Default work budget, compared against `n^(2k+3)`.
pub const DEFAULT_BUDGET: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct RootedTree {
    graph: Graph,
    root: Vertex,
    /// `parent[root] == 0`.
    parent: Vec<Vertex>,
    /// Weight of the edge to the parent.
    up_weight: Vec<f64>,
    children: Vec<Vec<Vertex>>,
    post_order: Vec<Vertex>,
}

impl RootedTree {
    /// Roots `g` at `root`; fails unless `g` is connected with `n - 1` edges.
    pub fn new(g: &Graph, root: Vertex) -> Result<Self> {
        let n = g.n();
        if n == 0 {
            return Err(Error::NotATree("the graph has no vertices".into()));
        }
        if root == 0 || root > n {
            return Err(Error::VertexOutOfRange { vertex: root, n });
        }
        if g.m() != n - 1 {
            return Err(Error::NotATree(format!("{} vertices but {} edges", n, g.m())));
        }
        let mut parent = vec![0; n + 1];
        let mut up_weight = vec![0.0; n + 1];
        let mut children = vec![Vec::new(); n + 1];
        let mut seen = vec![false; n + 1];
        let mut pre_order = Vec::with_capacity(n);
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(x) = stack.pop() {
            pre_order.push(x);
            for &(y, w) in g.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = x;
                    up_weight[y] = w;
                    children[x].push(y);
                    stack.push(y);
                }
            }
        }
        if pre_order.len() != n {
            return Err(Error::NotATree("the graph is disconnected".into()));
        }
        for list in &mut children {
            list.sort_unstable();
        }
        let post_order = pre_order.into_iter().rev().collect();
        Ok(RootedTree {
            graph: g.clone(),
            root,
            parent,
            up_weight,
            children,
            post_order,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        match self.parent[v] {
            0 => None,
            p => Some(p),
        }
    }

    pub fn children(&self, v: Vertex) -> &[Vertex] {
        &self.children[v]
    }

    /// Every vertex after all of its descendants.
    pub fn post_order(&self) -> &[Vertex] {
        &self.post_order
    }

    /// Vertices of the subtree rooted at `z`, in preorder.
    pub fn subtree(&self, z: Vertex) -> Vec<Vertex> {
        let mut out = Vec::new();
        let mut stack = vec![z];
        while let Some(x) = stack.pop() {
            out.push(x);
            stack.extend(self.children[x].iter().rev());
        }
        out
    }

    #[inline]
    fn adjacent(&self, a: Vertex, b: Vertex) -> bool {
        self.parent[a] == b || self.parent[b] == a
    }

    /// Tree edges are named by their child endpoint.
    #[inline]
    fn edge_id(&self, a: Vertex, b: Vertex) -> Vertex {
        if self.parent[a] == b {
            a
        } else {
            b
        }
    }
}

/// A window state of the search for the subtree rooted at `z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TupleState {
    pub z: Vertex,
    /// Last `k` vertices placed, oldest first.
    pub sigma: Vec<Vertex>,
    /// Realized edges incident on `sigma`, by child endpoint, sorted.
    pub realized: Vec<Vertex>,
}

/// Optimum of one rooted subtree.
#[derive(Debug, Clone, PartialEq)]
pub struct SubtreeSolution {
    pub z: Vertex,
    pub value: f64,
    /// Ordering of the vertices of `T_z`.
    pub layout: Vec<Vertex>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeExactConfig {
    /// Refuse when `n^(2k+3)` exceeds this.
    pub budget: f64,
}

impl Default for TreeExactConfig {
    fn default() -> Self {
        TreeExactConfig { budget: DEFAULT_BUDGET }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Untouched,
    Done,
}

#[derive(Debug, Default)]
struct Component {
    /// `(port in sigma, neighbour in the component, closed)`.
    ports: Vec<(Vertex, Vertex, bool)>,
    members: Vec<Vertex>,
}

/// Components of `T_z - sigma` with their entry ports.
#[derive(Debug)]
struct Analysis {
    comp_of: Vec<usize>,
    comps: Vec<Component>,
    status: Vec<Status>,
}

/// Shared context for the subtree rooted at `z`.
struct Subproblem<'a> {
    tree: &'a RootedTree,
    f: &'a Discount,
    z: Vertex,
    in_subtree: Vec<bool>,
    members: Vec<Vertex>,
    dangling: &'a [f64],
}

impl<'a> Subproblem<'a> {
    fn new(tree: &'a RootedTree, f: &'a Discount, z: Vertex, dangling: &'a [f64]) -> Self {
        let members = tree.subtree(z);
        let mut in_subtree = vec![false; tree.n() + 1];
        for &v in &members {
            in_subtree[v] = true;
        }
        Subproblem {
            tree,
            f,
            z,
            in_subtree,
            members,
            dangling,
        }
    }

    /// Tree neighbours of `x` inside `T_z`.
    fn neighbours(&self, x: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        let up = if x != self.z { self.tree.parent(x) } else { None };
        up.into_iter().chain(self.tree.children(x).iter().copied())
    }

    fn edge_weight(&self, a: Vertex, b: Vertex) -> f64 {
        self.tree.up_weight[self.tree.edge_id(a, b)]
    }

    /// `None` when some component has both open and closed ports.
    fn analyze(&self, sigma: &[Vertex], realized: &[Vertex]) -> Option<Analysis> {
        let n = self.tree.n();
        let mut in_sigma = vec![false; n + 1];
        for &v in sigma {
            in_sigma[v] = true;
        }
        let mut comp_of = vec![NONE; n + 1];
        let mut comps: Vec<Component> = Vec::new();
        for &start in &self.members {
            if in_sigma[start] || comp_of[start] != NONE {
                continue;
            }
            let id = comps.len();
            let mut comp = Component::default();
            comp_of[start] = id;
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                comp.members.push(x);
                for y in self.neighbours(x) {
                    if !in_sigma[y] && comp_of[y] == NONE {
                        comp_of[y] = id;
                        stack.push(y);
                    }
                }
            }
            comps.push(comp);
        }
        for &u in sigma {
            for y in self.neighbours(u) {
                if !in_sigma[y] {
                    let closed = realized.binary_search(&self.tree.edge_id(u, y)).is_ok();
                    comps[comp_of[y]].ports.push((u, y, closed));
                }
            }
        }
        let mut status = Vec::with_capacity(comps.len());
        for c in &comps {
            let closed = c.ports.iter().filter(|p| p.2).count();
            if closed == 0 {
                status.push(Status::Untouched);
            } else if closed == c.ports.len() {
                status.push(Status::Done);
            } else {
                return None;
            }
        }
        Some(Analysis {
            comp_of,
            comps,
            status,
        })
    }

    /// Outgoing transitions of a valid state, in increasing order of the
    /// appended vertex.
    fn successors(&self, state: &TupleState) -> Result<Vec<(TupleState, f64)>> {
        let k = self.f.k();
        let sigma = &state.sigma;
        let analysis = self
            .analyze(sigma, &state.realized)
            .ok_or_else(|| Error::Internal(format!("invalid state {:?}", state)))?;
        let u = sigma[0];
        let tree = self.tree;
        let u_parent_placed = u == self.z || state.realized.binary_search(&u).is_ok();

        let mut candidates: Vec<Vertex> = analysis
            .comps
            .iter()
            .zip(&analysis.status)
            .filter(|(_, s)| **s == Status::Untouched)
            .flat_map(|(c, _)| c.members.iter().copied())
            .collect();
        candidates.sort_unstable();

        let mut out = Vec::new();
        'next: for v in candidates {
            if !u_parent_placed && tree.parent[u] != v {
                continue;
            }
            // every child of u left unplaced becomes dangling, which needs u
            // to be its only port and v outside its subtree
            let mut gain = 0.0;
            for &c in tree.children(u) {
                if c == v || state.realized.binary_search(&c).is_ok() {
                    continue;
                }
                let cid = analysis.comp_of[c];
                if analysis.comps[cid].ports.len() != 1 || analysis.comp_of[v] == cid {
                    continue 'next;
                }
                gain += self.dangling[c];
            }
            let mut new_sigma = Vec::with_capacity(k);
            new_sigma.extend_from_slice(&sigma[1..]);
            new_sigma.push(v);
            let mut realized: Vec<Vertex> = state
                .realized
                .iter()
                .copied()
                .filter(|&c| new_sigma.contains(&c) || new_sigma.contains(&tree.parent[c]))
                .collect();
            for (i, &x) in sigma.iter().enumerate() {
                if tree.adjacent(x, v) {
                    gain += self.f.at(k - i) * self.edge_weight(x, v);
                    realized.push(tree.edge_id(x, v));
                }
            }
            realized.sort_unstable();
            realized.dedup();
            let next = TupleState {
                z: self.z,
                sigma: new_sigma,
                realized,
            };
            debug_assert!(self.analyze(&next.sigma, &next.realized).is_some());
            out.push((next, gain));
        }
        Ok(out)
    }

    /// Total dangling value if the state may end the component, else `None`.
    fn sink_weight(&self, state: &TupleState) -> Option<f64> {
        let analysis = self.analyze(&state.sigma, &state.realized)?;
        let mut total = 0.0;
        for (c, s) in analysis.comps.iter().zip(&analysis.status) {
            if *s == Status::Done {
                continue;
            }
            match c.ports.as_slice() {
                [(u, y, _)] if self.tree.parent[*y] == *u => total += self.dangling[*y],
                _ => return None,
            }
        }
        Some(total)
    }

    /// Initial states: every ordered `k`-tuple of `T_z` with `R` = tree edges
    /// inside the tuple, weighted by their discounted value.
    fn sources(&self) -> Vec<(TupleState, f64)> {
        let k = self.f.k();
        let mut out = Vec::new();
        if self.members.len() < k {
            return out;
        }
        let mut sorted = self.members.clone();
        sorted.sort_unstable();
        let mut tuple = Vec::with_capacity(k);
        let mut used = vec![false; self.tree.n() + 1];
        self.extend_source(&sorted, &mut tuple, &mut used, &mut out);
        out
    }

    fn extend_source(
        &self,
        pool: &[Vertex],
        tuple: &mut Vec<Vertex>,
        used: &mut [bool],
        out: &mut Vec<(TupleState, f64)>,
    ) {
        let k = self.f.k();
        if tuple.len() == k {
            let mut realized = Vec::new();
            let mut weight = 0.0;
            for i in 0..k {
                for j in i + 1..k {
                    if self.tree.adjacent(tuple[i], tuple[j]) {
                        realized.push(self.tree.edge_id(tuple[i], tuple[j]));
                        weight += self.f.at(j - i) * self.edge_weight(tuple[i], tuple[j]);
                    }
                }
            }
            realized.sort_unstable();
            out.push((
                TupleState {
                    z: self.z,
                    sigma: tuple.clone(),
                    realized,
                },
                weight,
            ));
            return;
        }
        for &v in pool {
            if !used[v] {
                used[v] = true;
                tuple.push(v);
                self.extend_source(pool, tuple, used, out);
                tuple.pop();
                used[v] = false;
            }
        }
    }

    /// Discounted weight of the tree edges inside `order` plus the values of
    /// the subtrees hanging off it. `order` must be a connected set holding `z`.
    fn component_value(&self, order: &[Vertex]) -> (f64, Vec<Vertex>) {
        let n = self.tree.n();
        let mut pos = vec![0usize; n + 1];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i + 1;
        }
        let mut value = 0.0;
        let mut dangling = Vec::new();
        for &v in order {
            for &c in self.tree.children(v) {
                if pos[c] != 0 {
                    value += self.f.at(pos[v].abs_diff(pos[c])) * self.tree.up_weight[c];
                } else {
                    value += self.dangling[c];
                    dangling.push(c);
                }
            }
        }
        dangling.sort_unstable();
        (value, dangling)
    }

    /// Best root component with fewer than `k` vertices.
    fn best_small_component(&self) -> (f64, Vec<Vertex>) {
        let k = self.f.k();
        let mut best = (f64::NEG_INFINITY, vec![self.z]);
        let mut seen = std::collections::HashSet::new();
        let mut frontier = vec![vec![self.z]];
        while let Some(set) = frontier.pop() {
            let mut order = set.clone();
            loop {
                let (value, _) = self.component_value(&order);
                if value > best.0 {
                    best = (value, order.clone());
                }
                if !next_permutation(&mut order) {
                    break;
                }
            }
            if set.len() + 1 >= k {
                continue;
            }
            for &x in &set {
                for y in self.neighbours(x) {
                    if set.contains(&y) {
                        continue;
                    }
                    let mut bigger = set.clone();
                    bigger.push(y);
                    bigger.sort_unstable();
                    if seen.insert(bigger.clone()) {
                        frontier.push(bigger);
                    }
                }
            }
        }
        best
    }

    /// Best root component with at least `k` vertices, as a maximum-weight
    /// source-to-sink walk through the state graph.
    fn best_component_path(&self, counter: &mut u64) -> Result<Option<(f64, Vec<Vertex>)>> {
        struct Node {
            state: TupleState,
            value: f64,
            prev: usize,
        }

        let k = self.f.k();
        let size = self.members.len();
        if size < k {
            return Ok(None);
        }
        let mut layers: Vec<Vec<Node>> = Vec::new();
        let mut index: HashMap<TupleState, usize> = HashMap::new();
        let mut layer = Vec::new();
        for (state, w) in self.sources() {
            index.insert(state.clone(), layer.len());
            layer.push(Node {
                state,
                value: w,
                prev: NONE,
            });
        }
        *counter += layer.len() as u64;
        layers.push(layer);

        let mut best: Option<(f64, usize, usize)> = None;
        for depth in 0..=(size - k) {
            for (i, node) in layers[depth].iter().enumerate() {
                if let Some(w) = self.sink_weight(&node.state) {
                    let total = node.value + w;
                    if best.is_none_or(|b| total > b.0) {
                        best = Some((total, depth, i));
                    }
                }
            }
            if depth == size - k {
                break;
            }
            index.clear();
            let mut next: Vec<Node> = Vec::new();
            for (i, node) in layers[depth].iter().enumerate() {
                for (state, w) in self.successors(&node.state)? {
                    let value = node.value + w;
                    match index.get(&state) {
                        Some(&j) => {
                            if value > next[j].value {
                                next[j].value = value;
                                next[j].prev = i;
                            }
                        }
                        None => {
                            index.insert(state.clone(), next.len());
                            next.push(Node { state, value, prev: i });
                        }
                    }
                }
            }
            *counter += next.len() as u64;
            if next.is_empty() {
                break;
            }
            layers.push(next);
        }

        let Some((total, depth, mut i)) = best else {
            return Ok(None);
        };
        let mut appended = Vec::new();
        for d in (1..=depth).rev() {
            let node = &layers[d][i];
            appended.push(*node.state.sigma.last().unwrap());
            i = node.prev;
        }
        let mut order = layers[0][i].state.sigma.clone();
        appended.reverse();
        order.extend(appended);
        Ok(Some((total, order)))
    }

    /// Checks that `order` is a valid root component whose realized edges are
    /// exactly its induced tree edges and whose value matches `claimed`.
    fn verify_component(&self, order: &[Vertex], claimed: f64) -> Result<Vec<Vertex>> {
        let n = self.tree.n();
        let k = self.f.k();
        let mut pos = vec![0usize; n + 1];
        for (i, &v) in order.iter().enumerate() {
            if !self.in_subtree[v] || pos[v] != 0 {
                return Err(Error::Internal(format!("component ordering {:?} is not a set of T_{}", order, self.z)));
            }
            pos[v] = i + 1;
        }
        if pos[self.z] == 0 {
            return Err(Error::Internal(format!("component {:?} misses its root {}", order, self.z)));
        }
        for &v in order {
            if v != self.z {
                let p = self.tree.parent[v];
                if pos[p] == 0 {
                    return Err(Error::Internal(format!("component {:?} is disconnected at {}", order, v)));
                }
                if order.len() >= k && pos[p].abs_diff(pos[v]) > k {
                    return Err(Error::Internal(format!("edge ({}, {}) of the component is not realized", v, p)));
                }
            }
        }
        let (value, dangling) = self.component_value(order);
        if (value - claimed).abs() > TOLERANCE * (1.0 + claimed.abs()) {
            return Err(Error::Internal(format!(
                "component {:?} is worth {} but the search reported {}",
                order, value, claimed
            )));
        }
        Ok(dangling)
    }
}

/// Best root component of size `< k` for the subtree rooted at `z`, given the
/// optima of all strictly lower subtrees in `dangling` (indexed by vertex).
pub fn enumerate_small_components(
    t: &RootedTree,
    z: Vertex,
    f: &Discount,
    dangling: &[f64],
) -> (f64, Vec<Vertex>) {
    Subproblem::new(t, f, z, dangling).best_small_component()
}

/// Transitions out of `s` with their weights.
pub fn tuple_successors(
    s: &TupleState,
    t: &RootedTree,
    f: &Discount,
    dangling: &[f64],
) -> Result<Vec<(TupleState, f64)>> {
    if s.sigma.len() != f.k() {
        return Err(Error::Internal(format!("state window has {} vertices, k = {}", s.sigma.len(), f.k())));
    }
    Subproblem::new(t, f, s.z, dangling).successors(s)
}

/// Source states of the search for `z` with their weights.
pub fn source_edges(z: Vertex, t: &RootedTree, f: &Discount) -> Vec<(TupleState, f64)> {
    Subproblem::new(t, f, z, &[]).sources()
}

/// Weight of the edge from `s` to the sink, if there is one.
pub fn sink_edge(s: &TupleState, t: &RootedTree, f: &Discount, dangling: &[f64]) -> Option<f64> {
    Subproblem::new(t, f, s.z, dangling).sink_weight(s)
}

/// Whether every component of `T_z - sigma` has all entry ports open or all closed.
pub fn is_valid_state(s: &TupleState, t: &RootedTree, f: &Discount) -> bool {
    Subproblem::new(t, f, s.z, &[]).analyze(&s.sigma, &s.realized).is_some()
}

/// Best root component of size `>= k`: `(value, ordering)`, or `None` when
/// `T_z` has fewer than `k` vertices.
pub fn best_component_path(
    z: Vertex,
    t: &RootedTree,
    f: &Discount,
    dangling: &[f64],
) -> Result<Option<(f64, Vec<Vertex>)>> {
    let mut states = 0;
    Subproblem::new(t, f, z, dangling).best_component_path(&mut states)
}

fn estimate_work(n: usize, k: usize) -> f64 {
    (n as f64).powi(2 * k as i32 + 3)
}

/// Optimal values and layouts for every subtree, in post-order.
pub fn solve_subtrees(
    t: &RootedTree,
    f: &Discount,
    cfg: &TreeExactConfig,
    states: &mut u64,
) -> Result<Vec<Option<SubtreeSolution>>> {
    let n = t.n();
    let estimate = estimate_work(n, f.k());
    if estimate > cfg.budget {
        return Err(Error::BudgetExceeded {
            estimate,
            budget: cfg.budget,
        });
    }
    let mut values = vec![0.0; n + 1];
    let mut solutions: Vec<Option<SubtreeSolution>> = vec![None; n + 1];
    for &z in t.post_order() {
        let sub = Subproblem::new(t, f, z, &values);
        let (mut value, mut order) = sub.best_small_component();
        if let Some((v, o)) = sub.best_component_path(states)? {
            if v > value {
                value = v;
                order = o;
            }
        }
        let dangling = sub.verify_component(&order, value)?;
        let mut layout = order;
        for c in dangling {
            let below = solutions[c]
                .as_ref()
                .ok_or_else(|| Error::Internal(format!("subtree {} solved out of order", c)))?;
            layout.extend_from_slice(&below.layout);
        }
        values[z] = value;
        solutions[z] = Some(SubtreeSolution { z, value, layout });
    }
    Ok(solutions)
}

pub fn tree_opt(t: &RootedTree, f: &Discount) -> Result<SolveReport> {
    tree_opt_with(t, f, &TreeExactConfig::default())
}

pub fn tree_opt_with(t: &RootedTree, f: &Discount, cfg: &TreeExactConfig) -> Result<SolveReport> {
    let started = Instant::now();
    let mut states = 0u64;
    let mut solutions = solve_subtrees(t, f, cfg, &mut states)?;
    let root = solutions[t.root()]
        .take()
        .ok_or_else(|| Error::Internal("root subtree was not solved".into()))?;
    let layout = Layout::from_order(t.n(), root.layout)?;
    let report = SolveReport::new(Algorithm::TreeExact, t.graph(), f, layout)?;
    if (report.value - root.value).abs() > TOLERANCE * (1.0 + root.value.abs()) {
        return Err(Error::Internal(format!(
            "assembled layout scores {} but the optimum is {}",
            report.value, root.value
        )));
    }
    Ok(report
        .with_stat("states_generated", states)
        .with_stat("millis", started.elapsed().as_millis() as u64))
}

/// Roots `g` at vertex 1 and solves it exactly.
pub fn tree_opt_graph(g: &Graph, f: &Discount) -> Result<SolveReport> {
    tree_opt(&RootedTree::new(g, 1)?, f)
}
