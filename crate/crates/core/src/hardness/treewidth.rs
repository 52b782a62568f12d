//! Tree decompositions from min-fill elimination orderings.

use serde::{Deserialize, Serialize};

use crate::bitset::Bitset;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Weight;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDecomposition {
    /// Each bag sorted ascending.
    pub bags: Vec<Vec<usize>>,
    pub tree_edges: Vec<(usize, usize)>,
    pub width: usize,
}

impl TreeDecomposition {
    pub fn new(bags: Vec<Vec<usize>>, tree_edges: Vec<(usize, usize)>) -> Self {
        let bags: Vec<Vec<usize>> = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        let width = bags
            .iter()
            .map(Vec::len)
            .max()
            .unwrap_or(1)
            .saturating_sub(1);
        Self {
            bags,
            tree_edges,
            width,
        }
    }

    /// Checks the tree shape and the three decomposition axioms against `g`.
    pub fn validate<W: Weight>(&self, g: &Graph<W>) -> Result<()> {
        let nb = self.bags.len();
        let fail = |m: String| Err(Error::InvalidDecomposition(m));
        if g.n() > 0 && nb == 0 {
            return fail("no bags".into());
        }
        // tree: nb-1 edges and connected
        if nb > 0 && self.tree_edges.len() != nb - 1 {
            return fail(format!(
                "{} tree edges for {nb} bags; not a tree",
                self.tree_edges.len()
            ));
        }
        let mut tadj = vec![Vec::new(); nb];
        for &(a, b) in &self.tree_edges {
            if a >= nb || b >= nb || a == b {
                return fail(format!("bad tree edge ({a},{b})"));
            }
            tadj[a].push(b);
            tadj[b].push(a);
        }
        if nb > 0 && reachable(&tadj, 0, |_| true) != nb {
            return fail("tree edges do not connect all bags".into());
        }
        let mut holders = vec![Vec::new(); g.n()];
        for (i, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if v >= g.n() {
                    return fail(format!("bag {i} holds unknown vertex {v}"));
                }
                holders[v].push(i);
            }
        }
        if let Some(v) = holders.iter().position(Vec::is_empty) {
            return fail(format!("vertex {v} is in no bag"));
        }
        let masks: Vec<Bitset> = self
            .bags
            .iter()
            .map(|b| Bitset::from_iter(g.n(), b.iter().copied()))
            .collect();
        for &(a, b) in g.edges() {
            if !holders[a].iter().any(|&i| masks[i].contains(b)) {
                return fail(format!("edge ({a},{b}) is in no bag"));
            }
        }
        for (v, hs) in holders.iter().enumerate() {
            let inside = |i: usize| masks[i].contains(v);
            if reachable(&tadj, hs[0], inside) != hs.len() {
                return fail(format!("bags holding vertex {v} are not connected"));
            }
        }
        Ok(())
    }
}

fn reachable(adj: &[Vec<usize>], start: usize, allowed: impl Fn(usize) -> bool) -> usize {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![start];
    seen[start] = true;
    let mut count = 0;
    while let Some(u) = stack.pop() {
        count += 1;
        for &w in &adj[u] {
            if !seen[w] && allowed(w) {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    count
}

/// Min-fill elimination ordering: repeatedly eliminate the vertex whose
/// remaining neighborhood needs the fewest fill edges (ties: lowest index).
pub fn minfill_ordering<W: Weight>(g: &Graph<W>) -> Vec<usize> {
    elimination(g).0
}

fn elimination<W: Weight>(g: &Graph<W>) -> (Vec<usize>, Vec<Vec<usize>>) {
    let n = g.n();
    let mut adj: Vec<Bitset> = (0..n).map(|v| g.neighbor_mask(v).clone()).collect();
    let mut alive = Bitset::full(n);
    let mut order = Vec::with_capacity(n);
    let mut higher = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best = (usize::MAX, usize::MAX);
        for v in alive.iter() {
            let fill = fill_in(&adj, v);
            if fill < best.0 {
                best = (fill, v);
                if fill == 0 {
                    break;
                }
            }
        }
        let v = best.1;
        let nbrs: Vec<usize> = adj[v].iter().collect();
        for &a in &nbrs {
            let mut add = adj[v].clone();
            add.remove(a);
            adj[a].union_with(&add);
            adj[a].remove(v);
        }
        alive.remove(v);
        adj[v] = Bitset::new(n);
        order.push(v);
        higher.push(nbrs);
    }
    (order, higher)
}

fn fill_in(adj: &[Bitset], v: usize) -> usize {
    let nv = &adj[v];
    let deg = nv.count();
    let mut present = 0;
    for u in nv.iter() {
        present += adj[u].intersection_count(nv);
    }
    // each present neighbor pair counted twice
    deg * deg.saturating_sub(1) / 2 - present / 2
}

/// Tree decomposition induced by the min-fill elimination ordering.
pub fn minfill_treewidth<W: Weight>(g: &Graph<W>) -> TreeDecomposition {
    let (order, higher) = elimination(g);
    decomposition_from_elimination(g.n(), &order, &higher)
}

/// Bags `{v} ∪ N⁺(v)`; each bag hangs off the bag of its earliest-eliminated
/// higher neighbor. Component roots are chained so the result is one tree.
fn decomposition_from_elimination(
    n: usize,
    order: &[usize],
    higher: &[Vec<usize>],
) -> TreeDecomposition {
    if n == 0 {
        return TreeDecomposition::new(Vec::new(), Vec::new());
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut bags = Vec::with_capacity(n);
    let mut edges = Vec::with_capacity(n - 1);
    let mut roots = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        let mut bag = higher[i].clone();
        bag.push(v);
        bags.push(bag);
        match higher[i].iter().map(|&u| pos[u]).min() {
            Some(p) => edges.push((i, p)),
            None => roots.push(i),
        }
    }
    for w in roots.windows(2) {
        edges.push((w[0], w[1]));
    }
    TreeDecomposition::new(bags, edges)
}

/// Width of the best elimination ordering, by exhaustive search over
/// orderings with memoization on eliminated subsets. Exponential; `n ≤ 16`.
pub fn exact_treewidth<W: Weight>(g: &Graph<W>) -> Result<usize> {
    let n = g.n();
    if n > 16 {
        return Err(Error::TooLarge { n, max: 16 });
    }
    if n == 0 {
        return Ok(0);
    }
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u))
        .collect();
    // q(S, v): vertices outside S ∪ {v} reachable from v through S
    let q = |s: u32, v: usize| -> u32 {
        let mut seen = 1u32 << v;
        let mut stack = vec![v];
        let mut out = 0u32;
        while let Some(u) = stack.pop() {
            let mut nb = adj[u] & !seen;
            while nb != 0 {
                let w = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                seen |= 1 << w;
                if s >> w & 1 == 1 {
                    stack.push(w);
                } else {
                    out |= 1 << w;
                }
            }
        }
        out
    };
    let full = (1u32 << n) - 1;
    let mut tw = vec![usize::MAX; 1 << n];
    tw[0] = 0;
    for s in 1..=full {
        let mut best = usize::MAX;
        let mut bits = s;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let rest = s & !(1 << v);
            let cand = tw[rest as usize].max(q(rest, v).count_ones() as usize);
            best = best.min(cand);
        }
        tw[s as usize] = best;
    }
    Ok(tw[full as usize])
}
