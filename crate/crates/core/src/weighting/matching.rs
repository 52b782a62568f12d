//! Maximum-cardinality matching (Edmonds' blossom algorithm) and maximum
//! 2-distance matching.

use std::collections::VecDeque;

use crate::graph::Graph;
use crate::scalar::Weight;
use crate::solver::bb::branch_and_bound;

const NONE: usize = usize::MAX;

struct Blossom<'a> {
    adj: Vec<&'a [usize]>,
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    blossom: Vec<bool>,
}

impl Blossom<'_> {
    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.adj.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.blossom[self.base[v]] = true;
            self.blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    /// BFS for an augmenting path from `root`; returns its free endpoint.
    fn find_path(&mut self, root: usize) -> Option<usize> {
        let n = self.adj.len();
        self.used.fill(false);
        self.parent.fill(NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        let mut q = VecDeque::from([root]);
        while let Some(v) = q.pop_front() {
            for i in 0..self.adj[v].len() {
                let to = self.adj[v][i];
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    self.blossom.fill(false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for u in 0..n {
                        if self.blossom[self.base[u]] {
                            self.base[u] = cur;
                            if !self.used[u] {
                                self.used[u] = true;
                                q.push_back(u);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    let m = self.mate[to];
                    self.used[m] = true;
                    q.push_back(m);
                }
            }
        }
        None
    }
}

/// A maximum-cardinality matching as sorted `(a, b)` pairs with `a < b`.
pub fn maximum_matching<W: Weight>(g: &Graph<W>) -> Vec<(usize, usize)> {
    let n = g.n();
    let mut m = Blossom {
        adj: (0..n).map(|v| g.neighbors(v)).collect(),
        mate: vec![NONE; n],
        parent: vec![NONE; n],
        base: (0..n).collect(),
        used: vec![false; n],
        blossom: vec![false; n],
    };
    // greedy start
    for &(a, b) in g.edges() {
        if m.mate[a] == NONE && m.mate[b] == NONE {
            m.mate[a] = b;
            m.mate[b] = a;
        }
    }
    for root in 0..n {
        if m.mate[root] != NONE {
            continue;
        }
        if let Some(mut v) = m.find_path(root) {
            while v != NONE {
                let pv = m.parent[v];
                let ppv = m.mate[pv];
                m.mate[v] = pv;
                m.mate[pv] = v;
                v = ppv;
            }
        }
    }
    let mut out: Vec<(usize, usize)> = (0..n)
        .filter(|&v| m.mate[v] != NONE && v < m.mate[v])
        .map(|v| (v, m.mate[v]))
        .collect();
    out.sort_unstable();
    out
}

/// True when the edges are pairwise vertex-disjoint edges of `g`.
pub fn is_matching<W: Weight>(g: &Graph<W>, edges: &[(usize, usize)]) -> bool {
    let mut used = vec![false; g.n()];
    for &(a, b) in edges {
        if a >= g.n() || b >= g.n() || !g.has_edge(a, b) || used[a] || used[b] {
            return false;
        }
        used[a] = true;
        used[b] = true;
    }
    true
}

fn edges_conflict<W: Weight>(g: &Graph<W>, e: (usize, usize), f: (usize, usize)) -> bool {
    [e.0, e.1]
        .iter()
        .any(|&x| [f.0, f.1].iter().any(|&y| x == y || g.has_edge(x, y)))
}

/// Edge-conflict graph: one vertex per edge of `g`, adjacent when the two
/// edges share an endpoint or have endpoints joined by an edge.
pub fn edge_conflict_graph<W: Weight>(g: &Graph<W>) -> Graph<f64> {
    let edges = g.edges();
    let mut conflicts = Vec::new();
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            if edges_conflict(g, edges[i], edges[j]) {
                conflicts.push((i, j));
            }
        }
    }
    Graph::build(edges.len(), &conflicts, None).expect("conflict graph is simple")
}

/// True when `edges` is a matching with no two edges joined by an edge.
pub fn is_two_distance_matching<W: Weight>(g: &Graph<W>, edges: &[(usize, usize)]) -> bool {
    is_matching(g, edges)
        && (0..edges.len())
            .all(|i| (i + 1..edges.len()).all(|j| !edges_conflict(g, edges[i], edges[j])))
}

/// Maximum 2-distance matching, solved exactly as a maximum independent
/// set of the edge-conflict graph.
pub fn two_distance_matching<W: Weight>(g: &Graph<W>) -> Vec<(usize, usize)> {
    let conflict = edge_conflict_graph(g);
    let chosen = branch_and_bound(&conflict, None).solution;
    let out: Vec<(usize, usize)> = chosen.into_iter().map(|i| g.edges()[i]).collect();
    assert!(
        is_two_distance_matching(g, &out),
        "2-distance matching failed validation"
    );
    out
}
