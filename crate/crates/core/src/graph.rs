//! Canonical weighted graph and the QUBO cost of the MWIS problem.

use crate::bitset::Bitset;
use crate::error::{Error, Result};
use crate::scalar::Weight;

/// Simple undirected vertex-weighted graph.
///
/// Immutable after construction. Edges are stored canonically as sorted
/// `(i, j)` pairs with `i < j`; adjacency is also kept as neighbor lists and
/// as bitsets for constant-time conflict tests.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph<W = f64> {
    n: usize,
    edges: Vec<(usize, usize)>,
    weights: Vec<W>,
    adj: Vec<Vec<usize>>,
    masks: Vec<Bitset>,
}

/// A 0/1 assignment `x ∈ {0,1}ⁿ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(pub Vec<bool>);

impl Assignment {
    pub fn zeros(n: usize) -> Self {
        Self(vec![false; n])
    }

    /// Indicator vector of a vertex set.
    pub fn indicator(n: usize, set: &[usize]) -> Self {
        let mut bits = vec![false; n];
        for &v in set {
            bits[v] = true;
        }
        Self(bits)
    }

    /// Bit `i` of `index` is vertex `i`.
    pub fn from_index(n: usize, index: u64) -> Self {
        Self((0..n).map(|i| (index >> i) & 1 == 1).collect())
    }

    pub fn to_index(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | ((b as u64) << i))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ones(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }

    /// Character `i` is vertex `i`.
    pub fn to_bitstring(&self) -> String {
        self.0.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn from_bitstring(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidParameter(format!(
                    "bitstring character {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl<W: Weight> Graph<W> {
    /// Builds a graph, canonicalizing the edge list. Missing weights default to 1.
    pub fn build(n: usize, edges: &[(usize, usize)], weights: Option<Vec<W>>) -> Result<Self> {
        let mut canon = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            canon.push((a.min(b), a.max(b)));
        }
        canon.sort_unstable();
        canon.dedup();
        let weights = match weights {
            Some(w) => {
                if w.len() != n {
                    return Err(Error::LengthMismatch {
                        expected: n,
                        got: w.len(),
                    });
                }
                if let Some((i, bad)) = w.iter().enumerate().find(|(_, w)| !w.is_admissible()) {
                    return Err(Error::InvalidWeight {
                        index: i,
                        value: format!("{bad:?}"),
                    });
                }
                w
            }
            None => vec![W::one(); n],
        };
        let mut adj = vec![Vec::new(); n];
        let mut masks = vec![Bitset::new(n); n];
        for &(a, b) in &canon {
            adj[a].push(b);
            adj[b].push(a);
            masks[a].insert(b);
            masks[b].insert(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Self {
            n,
            edges: canon,
            weights,
            adj,
            masks,
        })
    }

    /// Graph with `n` vertices, no edges, unit weights.
    pub fn empty(n: usize) -> Self {
        Self::build(n, &[], None).expect("empty graph is valid")
    }

    /// Same topology with new weights.
    pub fn with_weights(&self, weights: Vec<W>) -> Result<Self> {
        Self::build(self.n, &self.edges, Some(weights))
    }

    /// Same weights converted to another scalar type.
    pub fn map_weights<V: Weight>(&self, f: impl Fn(W) -> V) -> Result<Graph<V>> {
        Graph::build(
            self.n,
            &self.edges,
            Some(self.weights.iter().map(|&w| f(w)).collect()),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn weights(&self) -> &[W] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> W {
        self.weights[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn neighbor_mask(&self, v: usize) -> &Bitset {
        &self.masks[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n && b < self.n && self.masks[a].contains(b)
    }

    pub fn max_weight(&self) -> W {
        self.weights.iter().fold(W::zero(), |acc, &w| acc.max_of(w))
    }

    pub fn total_weight(&self) -> W {
        crate::scalar::total(self.weights.iter().copied())
    }

    /// Sum of weights of the given vertices.
    pub fn set_weight(&self, set: &[usize]) -> W {
        crate::scalar::total(set.iter().map(|&v| self.weights[v]))
    }

    /// `α = 2·max w`, or 1 for an all-zero weight vector.
    pub fn default_penalty(&self) -> W {
        let m = self.max_weight();
        if m > W::zero() {
            W::two() * m
        } else {
            W::one()
        }
    }

    /// Complement graph on the same vertex set and weights.
    pub fn complement(&self) -> Self {
        let mut edges = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if !self.has_edge(i, j) {
                    edges.push((i, j));
                }
            }
        }
        Self::build(self.n, &edges, Some(self.weights.clone())).expect("complement is simple")
    }

    /// Induced subgraph on `vertices`, renumbered in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.n];
        for (k, &v) in vertices.iter().enumerate() {
            pos[v] = k;
        }
        let mut edges = Vec::new();
        for &(a, b) in &self.edges {
            if pos[a] != usize::MAX && pos[b] != usize::MAX {
                edges.push((pos[a], pos[b]));
            }
        }
        let weights = vertices.iter().map(|&v| self.weights[v]).collect();
        Self::build(vertices.len(), &edges, Some(weights)).expect("induced subgraph is simple")
    }

    /// True iff no edge has both endpoints in `set`.
    pub fn is_independent_set(&self, set: &[usize]) -> Result<bool> {
        let mut seen = Bitset::new(self.n);
        for &v in set {
            if v >= self.n {
                return Err(Error::VertexOutOfRange {
                    vertex: v,
                    n: self.n,
                });
            }
            seen.insert(v);
        }
        Ok(set.iter().all(|&v| !self.masks[v].intersects(&seen)))
    }

    /// `α·Σ_{(i,j)∈E} x_i x_j − Σ_i w_i x_i`.
    pub fn qubo_cost(&self, x: &Assignment, alpha: W) -> Result<W> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        if !(alpha > W::zero()) {
            return Err(Error::InvalidParameter(format!(
                "penalty must be positive, got {alpha:?}"
            )));
        }
        let x = &x.0;
        let mut violations = W::zero();
        for &(a, b) in &self.edges {
            if x[a] && x[b] {
                violations += W::one();
            }
        }
        let gain = crate::scalar::total((0..self.n).filter(|&i| x[i]).map(|i| self.weights[i]));
        Ok(alpha * violations - gain)
    }

    /// Number of edges with both endpoints selected.
    pub fn violated_edges(&self, x: &Assignment) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| x.0[a] && x.0[b])
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;
    use proptest::prelude::*;

    fn p3() -> Graph {
        Graph::build(3, &[(0, 1), (1, 2)], None).unwrap()
    }

    #[test]
    fn default_unit_weights() {
        let g = p3();
        assert_eq!(g.weights(), &[1.0, 1.0, 1.0]);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = Graph::<f64>::build(3, &[(0, 1), (1, 0), (0, 1)], None).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            Graph::<f64>::build(2, &[(0, 0)], None),
            Err(Error::SelfLoop(0))
        ));
        assert!(matches!(
            Graph::<f64>::build(2, &[(0, 2)], None),
            Err(Error::VertexOutOfRange { vertex: 2, n: 2 })
        ));
        assert!(matches!(
            Graph::build(2, &[], Some(vec![1.0, -1.0])),
            Err(Error::InvalidWeight { index: 1, .. })
        ));
        assert!(matches!(
            Graph::build(2, &[], Some(vec![f64::NAN, 1.0])),
            Err(Error::InvalidWeight { index: 0, .. })
        ));
        assert!(matches!(
            Graph::build(2, &[], Some(vec![1.0])),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn independence() {
        let g = p3();
        assert!(g.is_independent_set(&[0, 2]).unwrap());
        assert!(!g.is_independent_set(&[0, 1]).unwrap());
        assert!(g.is_independent_set(&[]).unwrap());
        assert!(g.is_independent_set(&[5]).is_err());
    }

    #[test]
    fn qubo_examples() {
        let g = p3();
        let c = |s: &str| {
            g.qubo_cost(&Assignment::from_bitstring(s).unwrap(), 2.0)
                .unwrap()
        };
        assert_eq!(c("101"), -2.0);
        assert_eq!(c("110"), 0.0);
        assert_eq!(c("000"), 0.0);
        assert!(g.qubo_cost(&Assignment::zeros(2), 2.0).is_err());
        assert!(g.qubo_cost(&Assignment::zeros(3), 0.0).is_err());
    }

    #[test]
    fn index_roundtrip() {
        let a = Assignment::from_bitstring("1011").unwrap();
        assert_eq!(a.to_index(), 0b1101);
        assert_eq!(Assignment::from_index(4, 0b1101), a);
    }

    fn arb_graph() -> impl Strategy<Value = Graph<Rational64>> {
        (1usize..=10).prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .collect();
            let m = pairs.len();
            (
                proptest::collection::vec(any::<bool>(), m),
                proptest::collection::vec(0i64..20, n),
            )
                .prop_map(move |(keep, ws)| {
                    let edges: Vec<_> = pairs
                        .iter()
                        .zip(&keep)
                        .filter_map(|(&e, &k)| k.then_some(e))
                        .collect();
                    let ws = ws.into_iter().map(|w| Rational64::new(w, 4)).collect();
                    Graph::build(n, &edges, Some(ws)).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn qubo_minimizer_is_mwis(g in arb_graph()) {
            let n = g.n();
            let alpha = g.default_penalty();
            let mut best_cost = None::<Rational64>;
            let mut best_is = Rational64::from_integer(0);
            let mut minimizers_independent = true;
            let costs: Vec<_> = (0..1u64 << n)
                .map(|idx| g.qubo_cost(&Assignment::from_index(n, idx), alpha).unwrap())
                .collect();
            let min = costs.iter().copied().fold(costs[0], |a, b| if b < a { b } else { a });
            for idx in 0..1u64 << n {
                let x = Assignment::from_index(n, idx);
                let set = x.ones();
                let indep = g.is_independent_set(&set).unwrap();
                if indep {
                    best_is = best_is.max_of(g.set_weight(&set));
                }
                if costs[idx as usize] == min && !indep {
                    minimizers_independent = false;
                }
                best_cost = Some(best_cost.map_or(costs[idx as usize], |c| c.min_of(costs[idx as usize])));
            }
            prop_assert!(minimizers_independent);
            prop_assert_eq!(-best_cost.unwrap(), best_is);
        }

        #[test]
        fn independence_matches_cost(g in arb_graph(), mask in any::<u64>()) {
            let x = Assignment::from_index(g.n(), mask & ((1u64 << g.n()) - 1));
            let set = x.ones();
            let cost = g.qubo_cost(&x, g.default_penalty()).unwrap();
            let w = g.set_weight(&set);
            prop_assert_eq!(g.is_independent_set(&set).unwrap(), cost == -w);
        }
    }
}
