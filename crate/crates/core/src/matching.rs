//! Maximum-weight matching in general graphs.
//!
//! Edmonds' blossom algorithm in the primal-dual form described by Galil
//! ("Efficient Algorithms for Finding Maximum Matching in Graphs", 1986),
//! following the structure of Joris van Rantwijk's reference implementation.
//! Runs in O(n^3). Vertices are 0-based here; the solvers translate.

const NONE: usize = usize::MAX;

/// Computes a maximum-weight (not necessarily maximum-cardinality) matching.
///
/// `edges` are `(i, j, w)` with `i != j`, at most one edge per pair and
/// vertices in `0..n`. Returns `mate` with `mate[v] = Some(u)` when `v` is
/// matched to `u`.
pub fn max_weight_matching(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Option<usize>> {
    if edges.is_empty() || n == 0 {
        return vec![None; n];
    }
    let mut state = Blossom::new(n, edges);
    state.solve();
    state
        .mate
        .iter()
        .map(|&p| if p == NONE { None } else { Some(state.endpoint[p]) })
        .collect()
}

struct Blossom<'a> {
    nvertex: usize,
    edges: &'a [(usize, usize, f64)],
    /// `endpoint[p]` is the vertex at end `p` of edge `p / 2`.
    endpoint: Vec<usize>,
    /// Remote endpoints of the edges incident on each vertex.
    neighbend: Vec<Vec<usize>>,
    /// `mate[v]` is the remote endpoint of the matched edge, or NONE.
    mate: Vec<usize>,
    /// 0 free, 1 S, 2 T (5 marks a blossom during scanning).
    label: Vec<u8>,
    labelend: Vec<usize>,
    inblossom: Vec<usize>,
    blossomparent: Vec<usize>,
    blossomchilds: Vec<Vec<usize>>,
    blossombase: Vec<usize>,
    blossomendps: Vec<Vec<usize>>,
    bestedge: Vec<usize>,
    blossombestedges: Vec<Option<Vec<usize>>>,
    unusedblossoms: Vec<usize>,
    dualvar: Vec<f64>,
    allowedge: Vec<bool>,
    queue: Vec<usize>,
}

impl<'a> Blossom<'a> {
    fn new(n: usize, edges: &'a [(usize, usize, f64)]) -> Self {
        let nedge = edges.len();
        let maxweight = edges.iter().map(|e| e.2).fold(0.0_f64, f64::max);
        let endpoint: Vec<usize> = (0..2 * nedge)
            .map(|p| if p % 2 == 0 { edges[p / 2].0 } else { edges[p / 2].1 })
            .collect();
        let mut neighbend = vec![Vec::new(); n];
        for (k, &(i, j, _)) in edges.iter().enumerate() {
            neighbend[i].push(2 * k + 1);
            neighbend[j].push(2 * k);
        }
        let mut blossombase: Vec<usize> = (0..n).collect();
        blossombase.extend(std::iter::repeat_n(NONE, n));
        let mut dualvar = vec![maxweight; n];
        dualvar.extend(std::iter::repeat_n(0.0, n));
        Blossom {
            nvertex: n,
            edges,
            endpoint,
            neighbend,
            mate: vec![NONE; n],
            label: vec![0; 2 * n],
            labelend: vec![NONE; 2 * n],
            inblossom: (0..n).collect(),
            blossomparent: vec![NONE; 2 * n],
            blossomchilds: vec![Vec::new(); 2 * n],
            blossombase,
            blossomendps: vec![Vec::new(); 2 * n],
            bestedge: vec![NONE; 2 * n],
            blossombestedges: vec![None; 2 * n],
            unusedblossoms: (n..2 * n).collect(),
            dualvar,
            allowedge: vec![false; nedge],
            queue: Vec::new(),
        }
    }

    /// Twice the slack of edge `k` (not valid inside blossoms).
    fn slack(&self, k: usize) -> f64 {
        let (i, j, w) = self.edges[k];
        self.dualvar[i] + self.dualvar[j] - 2.0 * w
    }

    fn blossom_leaves(&self, b: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![b];
        while let Some(t) = stack.pop() {
            if t < self.nvertex {
                out.push(t);
            } else {
                stack.extend(self.blossomchilds[t].iter().rev().copied());
            }
        }
        out
    }

    /// Labels the top-level blossom containing `w` with `t`, reached through
    /// the edge with remote endpoint `p`.
    fn assign_label(&mut self, w: usize, t: u8, p: usize) {
        let b = self.inblossom[w];
        debug_assert!(self.label[w] == 0 && self.label[b] == 0);
        self.label[w] = t;
        self.label[b] = t;
        self.labelend[w] = p;
        self.labelend[b] = p;
        self.bestedge[w] = NONE;
        self.bestedge[b] = NONE;
        if t == 1 {
            let leaves = self.blossom_leaves(b);
            self.queue.extend(leaves);
        } else if t == 2 {
            // the base is the only vertex of b with an external mate
            let base = self.blossombase[b];
            debug_assert!(self.mate[base] != NONE);
            let mb = self.mate[base];
            self.assign_label(self.endpoint[mb], 1, mb ^ 1);
        }
    }

    /// Traces back from `v` and `w` to find either a new blossom (returns its
    /// base) or an augmenting path (returns NONE).
    fn scan_blossom(&mut self, mut v: usize, mut w: usize) -> usize {
        let mut path = Vec::new();
        let mut base = NONE;
        while v != NONE || w != NONE {
            let mut b = self.inblossom[v];
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            debug_assert_eq!(self.label[b], 1);
            path.push(b);
            self.label[b] = 5;
            if self.labelend[b] == NONE {
                // reached a single vertex root
                v = NONE;
            } else {
                v = self.endpoint[self.labelend[b]];
                b = self.inblossom[v];
                debug_assert_eq!(self.label[b], 2);
                v = self.endpoint[self.labelend[b]];
            }
            if w != NONE {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = 1;
        }
        base
    }

    /// Builds a blossom with the given base through S-vertices joined by edge `k`.
    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];
        let b = self.unusedblossoms.pop().expect("blossom pool exhausted");
        self.blossombase[b] = base;
        self.blossomparent[b] = NONE;
        self.blossomparent[bb] = b;
        let mut path = Vec::new();
        let mut endps = Vec::new();
        while bv != bb {
            self.blossomparent[bv] = b;
            path.push(bv);
            endps.push(self.labelend[bv]);
            v = self.endpoint[self.labelend[bv]];
            bv = self.inblossom[v];
        }
        path.push(bb);
        path.reverse();
        endps.reverse();
        endps.push(2 * k);
        while bw != bb {
            self.blossomparent[bw] = b;
            path.push(bw);
            endps.push(self.labelend[bw] ^ 1);
            w = self.endpoint[self.labelend[bw]];
            bw = self.inblossom[w];
        }
        debug_assert_eq!(self.label[bb], 1);
        self.label[b] = 1;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = 0.0;
        self.blossomchilds[b] = path.clone();
        self.blossomendps[b] = endps;
        for leaf in self.blossom_leaves(b) {
            if self.label[self.inblossom[leaf]] == 2 {
                // T-vertices become S-vertices inside the new blossom
                self.queue.push(leaf);
            }
            self.inblossom[leaf] = b;
        }
        // least-slack edges from the new blossom to each neighbouring S-blossom
        let mut bestedgeto = vec![NONE; 2 * self.nvertex];
        for &sub in &path {
            let nblists: Vec<Vec<usize>> = match self.blossombestedges[sub].take() {
                Some(list) => vec![list],
                None => self
                    .blossom_leaves(sub)
                    .into_iter()
                    .map(|leaf| self.neighbend[leaf].iter().map(|p| p / 2).collect())
                    .collect(),
            };
            for nblist in nblists {
                for kk in nblist {
                    let (mut i, mut j, _) = self.edges[kk];
                    if self.inblossom[j] == b {
                        std::mem::swap(&mut i, &mut j);
                    }
                    let _ = i;
                    let bj = self.inblossom[j];
                    if bj != b
                        && self.label[bj] == 1
                        && (bestedgeto[bj] == NONE || self.slack(kk) < self.slack(bestedgeto[bj]))
                    {
                        bestedgeto[bj] = kk;
                    }
                }
            }
            self.bestedge[sub] = NONE;
        }
        let best: Vec<usize> = bestedgeto.into_iter().filter(|&x| x != NONE).collect();
        self.bestedge[b] = NONE;
        for &kk in &best {
            if self.bestedge[b] == NONE || self.slack(kk) < self.slack(self.bestedge[b]) {
                self.bestedge[b] = kk;
            }
        }
        self.blossombestedges[b] = Some(best);
    }

    /// Expands blossom `b` into its sub-blossoms.
    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        let childs = self.blossomchilds[b].clone();
        for &s in &childs {
            self.blossomparent[s] = NONE;
            if s < self.nvertex {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s] == 0.0 {
                self.expand_blossom(s, endstage);
            } else {
                for leaf in self.blossom_leaves(s) {
                    self.inblossom[leaf] = s;
                }
            }
        }
        if !endstage && self.label[b] == 2 {
            // relabel the sub-blossoms along the even path from the entry
            // child to the base
            let len = childs.len() as isize;
            let at = |j: isize| -> usize { childs[j.rem_euclid(len) as usize] };
            let endps = self.blossomendps[b].clone();
            let endp_at = |j: isize| -> usize { endps[j.rem_euclid(len) as usize] };
            let entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
            let mut j = childs.iter().position(|&c| c == entrychild).unwrap() as isize;
            let (jstep, endptrick): (isize, usize) = if j & 1 == 1 {
                j -= len;
                (1, 0)
            } else {
                (-1, 1)
            };
            let mut p = self.labelend[b];
            while j != 0 {
                let q = self.endpoint[p ^ 1];
                self.label[q] = 0;
                let r = self.endpoint[endp_at(j - endptrick as isize) ^ endptrick ^ 1];
                self.label[r] = 0;
                self.assign_label(q, 2, p);
                self.allowedge[endp_at(j - endptrick as isize) / 2] = true;
                j += jstep;
                p = endp_at(j - endptrick as isize) ^ endptrick;
                self.allowedge[p / 2] = true;
                j += jstep;
            }
            let bv = at(j);
            let q = self.endpoint[p ^ 1];
            self.label[q] = 2;
            self.label[bv] = 2;
            self.labelend[q] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = NONE;
            j += jstep;
            while at(j) != entrychild {
                let bv = at(j);
                if self.label[bv] == 1 {
                    // already labeled S through another path
                    j += jstep;
                    continue;
                }
                let leaves = self.blossom_leaves(bv);
                if let Some(&v) = leaves.iter().find(|&&v| self.label[v] != 0) {
                    debug_assert_eq!(self.label[v], 2);
                    debug_assert_eq!(self.inblossom[v], bv);
                    self.label[v] = 0;
                    let mb = self.mate[self.blossombase[bv]];
                    let r = self.endpoint[mb];
                    self.label[r] = 0;
                    let le = self.labelend[v];
                    self.assign_label(v, 2, le);
                }
                j += jstep;
            }
        }
        self.label[b] = 0;
        self.labelend[b] = NONE;
        self.blossomchilds[b].clear();
        self.blossomendps[b].clear();
        self.blossombase[b] = NONE;
        self.blossombestedges[b] = None;
        self.bestedge[b] = NONE;
        self.unusedblossoms.push(b);
    }

    /// Swaps matched and unmatched edges along the even path through blossom
    /// `b` from vertex `v` to the base.
    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != b {
            t = self.blossomparent[t];
        }
        if t >= self.nvertex {
            self.augment_blossom(t, v);
        }
        let childs = self.blossomchilds[b].clone();
        let endps = self.blossomendps[b].clone();
        let len = childs.len() as isize;
        let at = |j: isize| -> usize { childs[j.rem_euclid(len) as usize] };
        let endp_at = |j: isize| -> usize { endps[j.rem_euclid(len) as usize] };
        let i = childs.iter().position(|&c| c == t).unwrap();
        let mut j = i as isize;
        let (jstep, endptrick): (isize, usize) = if i & 1 == 1 {
            j -= len;
            (1, 0)
        } else {
            (-1, 1)
        };
        while j != 0 {
            j += jstep;
            let t = at(j);
            let p = endp_at(j - endptrick as isize) ^ endptrick;
            if t >= self.nvertex {
                self.augment_blossom(t, self.endpoint[p]);
            }
            j += jstep;
            let t = at(j);
            if t >= self.nvertex {
                self.augment_blossom(t, self.endpoint[p ^ 1]);
            }
            self.mate[self.endpoint[p]] = p ^ 1;
            self.mate[self.endpoint[p ^ 1]] = p;
        }
        self.blossomchilds[b].rotate_left(i);
        self.blossomendps[b].rotate_left(i);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
        debug_assert_eq!(self.blossombase[b], v);
    }

    /// Augments the matching along the path through edge `k`.
    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for (mut s, mut p) in [(v, 2 * k + 1), (w, 2 * k)] {
            loop {
                let bs = self.inblossom[s];
                debug_assert_eq!(self.label[bs], 1);
                if bs >= self.nvertex {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p;
                if self.labelend[bs] == NONE {
                    // reached a single vertex root
                    break;
                }
                let t = self.endpoint[self.labelend[bs]];
                let bt = self.inblossom[t];
                debug_assert_eq!(self.label[bt], 2);
                s = self.endpoint[self.labelend[bt]];
                let j = self.endpoint[self.labelend[bt] ^ 1];
                debug_assert_eq!(self.blossombase[bt], t);
                if bt >= self.nvertex {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }

    fn solve(&mut self) {
        let n = self.nvertex;
        for _stage in 0..n {
            self.label.iter_mut().for_each(|x| *x = 0);
            self.bestedge.iter_mut().for_each(|x| *x = NONE);
            for b in n..2 * n {
                self.blossombestedges[b] = None;
            }
            self.allowedge.iter_mut().for_each(|x| *x = false);
            self.queue.clear();
            for v in 0..n {
                if self.mate[v] == NONE && self.label[self.inblossom[v]] == 0 {
                    self.assign_label(v, 1, NONE);
                }
            }

            let mut augmented = false;
            loop {
                while !augmented {
                    let Some(v) = self.queue.pop() else { break };
                    debug_assert_eq!(self.label[self.inblossom[v]], 1);
                    let ends = self.neighbend[v].clone();
                    for p in ends {
                        let k = p / 2;
                        let w = self.endpoint[p];
                        if self.inblossom[v] == self.inblossom[w] {
                            continue;
                        }
                        let mut kslack = 0.0;
                        if !self.allowedge[k] {
                            kslack = self.slack(k);
                            if kslack <= 0.0 {
                                self.allowedge[k] = true;
                            }
                        }
                        if self.allowedge[k] {
                            if self.label[self.inblossom[w]] == 0 {
                                self.assign_label(w, 2, p ^ 1);
                            } else if self.label[self.inblossom[w]] == 1 {
                                let base = self.scan_blossom(v, w);
                                if base != NONE {
                                    self.add_blossom(base, k);
                                } else {
                                    self.augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if self.label[w] == 0 {
                                // w is inside a T-blossom but not yet reached
                                self.label[w] = 2;
                                self.labelend[w] = p ^ 1;
                            }
                        } else if self.label[self.inblossom[w]] == 1 {
                            let b = self.inblossom[v];
                            if self.bestedge[b] == NONE || kslack < self.slack(self.bestedge[b]) {
                                self.bestedge[b] = k;
                            }
                        } else if self.label[w] == 0
                            && (self.bestedge[w] == NONE || kslack < self.slack(self.bestedge[w]))
                        {
                            self.bestedge[w] = k;
                        }
                    }
                }
                if augmented {
                    break;
                }

                // no augmenting path under the current duals: adjust them
                let mut deltatype = 1;
                let mut delta = self.dualvar[..n].iter().copied().fold(f64::INFINITY, f64::min);
                let mut deltaedge = NONE;
                let mut deltablossom = NONE;
                for v in 0..n {
                    if self.label[self.inblossom[v]] == 0 && self.bestedge[v] != NONE {
                        let d = self.slack(self.bestedge[v]);
                        if d < delta {
                            delta = d;
                            deltatype = 2;
                            deltaedge = self.bestedge[v];
                        }
                    }
                }
                for b in 0..2 * n {
                    if self.blossomparent[b] == NONE && self.label[b] == 1 && self.bestedge[b] != NONE {
                        let d = self.slack(self.bestedge[b]) / 2.0;
                        if d < delta {
                            delta = d;
                            deltatype = 3;
                            deltaedge = self.bestedge[b];
                        }
                    }
                }
                for b in n..2 * n {
                    if self.blossombase[b] != NONE
                        && self.blossomparent[b] == NONE
                        && self.label[b] == 2
                        && self.dualvar[b] < delta
                    {
                        delta = self.dualvar[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }

                for v in 0..n {
                    match self.label[self.inblossom[v]] {
                        1 => self.dualvar[v] -= delta,
                        2 => self.dualvar[v] += delta,
                        _ => {}
                    }
                }
                for b in n..2 * n {
                    if self.blossombase[b] != NONE && self.blossomparent[b] == NONE {
                        match self.label[b] {
                            1 => self.dualvar[b] += delta,
                            2 => self.dualvar[b] -= delta,
                            _ => {}
                        }
                    }
                }

                match deltatype {
                    1 => break,
                    2 => {
                        self.allowedge[deltaedge] = true;
                        let (mut i, mut j, _) = self.edges[deltaedge];
                        if self.label[self.inblossom[i]] == 0 {
                            std::mem::swap(&mut i, &mut j);
                        }
                        let _ = j;
                        self.queue.push(i);
                    }
                    3 => {
                        self.allowedge[deltaedge] = true;
                        let (i, _, _) = self.edges[deltaedge];
                        self.queue.push(i);
                    }
                    _ => self.expand_blossom(deltablossom, false),
                }
            }

            if !augmented {
                break;
            }
            for b in n..2 * n {
                if self.blossomparent[b] == NONE
                    && self.blossombase[b] != NONE
                    && self.label[b] == 1
                    && self.dualvar[b] == 0.0
                {
                    self.expand_blossom(b, true);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weight(edges: &[(usize, usize, f64)], mate: &[Option<usize>]) -> f64 {
        edges
            .iter()
            .filter(|&&(i, j, _)| mate[i] == Some(j))
            .map(|e| e.2)
            .sum()
    }

    /// Exhaustive maximum-weight matching over all edge subsets.
    fn brute(n: usize, edges: &[(usize, usize, f64)]) -> f64 {
        let mut best = 0.0_f64;
        for mask in 0u32..(1 << edges.len()) {
            let mut used = vec![false; n];
            let mut w = 0.0;
            let mut ok = true;
            for (k, &(i, j, wt)) in edges.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    if used[i] || used[j] {
                        ok = false;
                        break;
                    }
                    used[i] = true;
                    used[j] = true;
                    w += wt;
                }
            }
            if ok {
                best = best.max(w);
            }
        }
        best
    }

    fn check(n: usize, edges: &[(usize, usize, f64)], expected: f64) {
        let mate = max_weight_matching(n, edges);
        for v in 0..n {
            if let Some(u) = mate[v] {
                assert_eq!(mate[u], Some(v));
            }
        }
        assert_eq!(weight(edges, &mate), expected);
    }

    #[test]
    fn empty_and_single() {
        assert_eq!(max_weight_matching(0, &[]), vec![]);
        assert_eq!(max_weight_matching(3, &[]), vec![None; 3]);
        check(2, &[(0, 1, 1.0)], 1.0);
    }

    #[test]
    fn small_graphs() {
        check(3, &[(0, 1, 10.0), (1, 2, 11.0)], 11.0);
        check(4, &[(0, 1, 5.0), (1, 2, 11.0), (2, 3, 5.0)], 11.0);
        check(4, &[(0, 1, 5.0), (1, 2, 9.0), (2, 3, 5.0)], 10.0);
    }

    #[test]
    fn blossom_cases() {
        // S-blossom, then augment
        check(4, &[(0, 1, 8.0), (0, 2, 9.0), (1, 2, 10.0), (2, 3, 7.0)], 15.0);
        // blossom relabel and expansion
        check(
            6,
            &[(0, 1, 8.0), (0, 2, 8.0), (1, 2, 10.0), (1, 3, 12.0), (2, 4, 12.0), (3, 4, 14.0), (3, 5, 12.0)],
            brute(
                6,
                &[(0, 1, 8.0), (0, 2, 8.0), (1, 2, 10.0), (1, 3, 12.0), (2, 4, 12.0), (3, 4, 14.0), (3, 5, 12.0)],
            ),
        );
        // nested blossoms
        let e = [
            (0, 1, 19.0),
            (0, 2, 20.0),
            (0, 7, 8.0),
            (1, 2, 25.0),
            (1, 3, 18.0),
            (2, 4, 18.0),
            (3, 4, 13.0),
            (3, 6, 7.0),
            (4, 5, 7.0),
        ];
        check(8, &e, brute(8, &e));
        let e = [
            (0, 1, 45.0),
            (0, 4, 45.0),
            (1, 2, 50.0),
            (2, 3, 45.0),
            (3, 4, 50.0),
            (0, 5, 30.0),
            (2, 8, 35.0),
            (3, 7, 35.0),
            (4, 6, 26.0),
            (8, 9, 5.0),
        ];
        check(10, &e, brute(10, &e));
        let e = [
            (0, 1, 40.0),
            (0, 2, 40.0),
            (1, 2, 60.0),
            (1, 3, 55.0),
            (2, 4, 55.0),
            (3, 4, 50.0),
            (0, 7, 15.0),
            (4, 6, 30.0),
            (6, 5, 10.0),
            (7, 9, 10.0),
            (3, 8, 30.0),
        ];
        check(10, &e, brute(10, &e));
    }

    #[test]
    fn fractional_weights() {
        let e = [(0, 1, 0.5), (1, 2, 0.75), (2, 3, 0.5), (0, 3, 0.25)];
        check(4, &e, brute(4, &e));
    }

    #[test]
    fn random_graphs_match_exhaustive_search() {
        let mut rng = crate::gen::SplitMix64::new(99);
        for _ in 0..400 {
            let n = 2 + rng.below(7) as usize;
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.below(100) < 55 && edges.len() < 16 {
                        edges.push((i, j, (1 + rng.below(12)) as f64));
                    }
                }
            }
            check(n, &edges, brute(n, &edges));
        }
    }
}
