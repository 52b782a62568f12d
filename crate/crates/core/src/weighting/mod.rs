//! Vertex-weighting schemes and the combinatorial subroutines behind them.

pub mod centrality;
pub mod matching;

use std::fmt;

use rand::distributions::{Distribution, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::rng;
use crate::scalar::Weight;
use crate::solver::bb::branch_and_bound;

pub use centrality::{betweenness_centrality, closeness_centrality};
pub use matching::{
    is_matching, is_two_distance_matching, maximum_matching, two_distance_matching,
};

pub const DEFAULT_DELTA_BAR: f64 = 1000.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Unweighted,
    UniformRandom,
    DegreeCentrality,
    Matching,
    TwoDistanceMatching,
    DegreeBased,
    Annihilation,
    MaxClique,
    Closeness,
    Betweenness,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 10] = [
        SchemeKind::Unweighted,
        SchemeKind::UniformRandom,
        SchemeKind::DegreeCentrality,
        SchemeKind::Matching,
        SchemeKind::TwoDistanceMatching,
        SchemeKind::DegreeBased,
        SchemeKind::Annihilation,
        SchemeKind::MaxClique,
        SchemeKind::Closeness,
        SchemeKind::Betweenness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Unweighted => "unweighted",
            SchemeKind::UniformRandom => "uniform_random",
            SchemeKind::DegreeCentrality => "degree_centrality",
            SchemeKind::Matching => "matching",
            SchemeKind::TwoDistanceMatching => "two_distance_matching",
            SchemeKind::DegreeBased => "degree_based",
            SchemeKind::Annihilation => "annihilation",
            SchemeKind::MaxClique => "max_clique",
            SchemeKind::Closeness => "closeness",
            SchemeKind::Betweenness => "betweenness",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Unknown {
                what: "weighting scheme",
                name: s.to_string(),
            })
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightScheme {
    pub kind: SchemeKind,
    #[serde(default = "default_delta_bar")]
    pub delta_bar: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_delta_bar() -> f64 {
    DEFAULT_DELTA_BAR
}

impl WeightScheme {
    pub fn new(kind: SchemeKind) -> Self {
        Self {
            kind,
            delta_bar: DEFAULT_DELTA_BAR,
            seed: 0,
        }
    }

    pub fn with_delta_bar(mut self, delta_bar: f64) -> Self {
        self.delta_bar = delta_bar;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_bar.is_finite() && self.delta_bar > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "delta_bar must be positive and finite, got {}",
                self.delta_bar
            )));
        }
        Ok(())
    }
}

/// Largest `k` with the `k` smallest degrees summing to at most `|E|`,
/// and those `k` vertices (ascending degree, then index).
pub fn annihilation_number<W: Weight>(g: &Graph<W>) -> (usize, Vec<usize>) {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| (g.degree(v), v));
    let m = g.edge_count();
    let mut sum = 0;
    let mut k = 0;
    for &v in &order {
        sum += g.degree(v);
        if sum > m {
            break;
        }
        k += 1;
    }
    order.truncate(k);
    (k, order)
}

/// Exact maximum clique, as a maximum independent set of the complement.
pub fn maximum_clique<W: Weight>(g: &Graph<W>) -> Vec<usize> {
    let co: Graph<f64> = g.complement().map_weights(|_| 1.0).expect("unit weights");
    branch_and_bound(&co, None).solution
}

fn matched_weights<W: Weight>(g: &Graph<W>, matching: &[(usize, usize)]) -> Vec<W> {
    let mut matched = vec![false; g.n()];
    for &(a, b) in matching {
        matched[a] = true;
        matched[b] = true;
    }
    (0..g.n())
        .map(|v| {
            if matched[v] {
                W::one()
            } else {
                W::lit(0.1) * W::from_usize(g.degree(v) + 1).expect("degree fits")
            }
        })
        .collect()
}

fn require_two(g: &Graph<impl Weight>, what: &str) -> Result<()> {
    if g.n() < 2 {
        return Err(Error::Undefined(format!(
            "{what} needs at least 2 vertices, got {}",
            g.n()
        )));
    }
    Ok(())
}

/// Copy of `g` reweighted by `scheme`.
pub fn apply_scheme<W: Weight>(g: &Graph<W>, scheme: &WeightScheme) -> Result<Graph<W>> {
    scheme.validate()?;
    let n = g.n();
    let num = |x: usize| W::from_usize(x).expect("count fits the weight type");
    let weights: Vec<W> = match scheme.kind {
        SchemeKind::Unweighted => vec![W::one(); n],
        SchemeKind::UniformRandom => {
            if scheme.delta_bar < 0.1 {
                return Err(Error::InvalidParameter(format!(
                    "uniform weights on [0.1, delta_bar] need delta_bar >= 0.1, got {}",
                    scheme.delta_bar
                )));
            }
            let dist = Uniform::new_inclusive(0.1, scheme.delta_bar);
            let mut r = rng(scheme.seed);
            (0..n).map(|_| W::lit(dist.sample(&mut r))).collect()
        }
        SchemeKind::DegreeCentrality => {
            require_two(g, "degree centrality")?;
            let max = g.degrees().into_iter().max().unwrap_or(0);
            let db = W::lit(scheme.delta_bar);
            (0..n)
                .map(|v| {
                    // edgeless: every vertex has the maximum degree
                    if max == 0 {
                        W::one() + db
                    } else {
                        W::one() + db * num(g.degree(v)) / num(max)
                    }
                })
                .collect()
        }
        SchemeKind::Matching => matched_weights(g, &maximum_matching(g)),
        SchemeKind::TwoDistanceMatching => matched_weights(g, &two_distance_matching(g)),
        SchemeKind::DegreeBased => {
            let min = g.degrees().into_iter().min().unwrap_or(0);
            (0..n)
                .map(|v| {
                    if g.degree(v) == min {
                        W::lit(0.1)
                    } else {
                        num(1000) * num(g.degree(v) + 1)
                    }
                })
                .collect()
        }
        SchemeKind::Annihilation => {
            let (_, set) = annihilation_number(g);
            let mut w = vec![W::lit(0.1); n];
            for v in set {
                w[v] = num(1000);
            }
            w
        }
        SchemeKind::MaxClique => {
            let mut w = vec![num(1000); n];
            for v in maximum_clique(g) {
                w[v] = W::one();
            }
            w
        }
        SchemeKind::Closeness => {
            let cc = closeness_centrality(g)?;
            let max = cc.iter().copied().fold(0.0, f64::max);
            cc.iter().map(|c| W::lit(1.0 + 999.0 * c / max)).collect()
        }
        SchemeKind::Betweenness => {
            require_two(g, "betweenness centrality")?;
            let cb = betweenness_centrality(g);
            let max = cb.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = cb.iter().copied().fold(f64::INFINITY, f64::min);
            let span = max - min;
            // relative tolerance: Brandes sums of equal values can differ in the last bits
            if span <= 1e-12 * max.abs().max(1.0) {
                vec![W::lit(0.1); n]
            } else {
                cb.iter()
                    .map(|c| W::lit(0.1 + 999.0 * (c - min) / span))
                    .collect()
            }
        }
    };
    debug_assert!(weights.iter().all(|w| w.is_admissible() && *w > W::zero()));
    g.with_weights(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn p3() -> Graph {
        Graph::build(3, &[(0, 1), (1, 2)], None).unwrap()
    }

    fn k(n: usize) -> Graph {
        let e: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Graph::build(n, &e, None).unwrap()
    }

    fn weights(g: &Graph, kind: SchemeKind) -> Vec<f64> {
        apply_scheme(g, &WeightScheme::new(kind))
            .unwrap()
            .weights()
            .to_vec()
    }

    #[test]
    fn scheme_examples() {
        assert_eq!(
            weights(&p3(), SchemeKind::DegreeCentrality),
            vec![501.0, 1001.0, 501.0]
        );
        assert_eq!(weights(&k(4), SchemeKind::DegreeBased), vec![0.1; 4]);
        assert_eq!(weights(&p3(), SchemeKind::Matching), vec![1.0, 1.0, 0.2]);
        assert_eq!(weights(&p3(), SchemeKind::Unweighted), vec![1.0; 3]);
        assert_eq!(
            weights(&p3(), SchemeKind::DegreeBased),
            vec![0.1, 3000.0, 0.1]
        );
        assert_eq!(
            weights(&p3(), SchemeKind::Annihilation),
            vec![1000.0, 0.1, 1000.0]
        );
        assert_eq!(
            weights(&p3(), SchemeKind::Betweenness),
            vec![0.1, 999.1, 0.1]
        );
        assert_eq!(weights(&k(4), SchemeKind::Betweenness), vec![0.1; 4]);
        assert_eq!(
            weights(&p3(), SchemeKind::Closeness),
            vec![667.0, 1000.0, 667.0]
        );
        let clique = weights(&p3(), SchemeKind::MaxClique);
        assert_eq!(clique.iter().filter(|&&w| w == 1.0).count(), 2);
    }

    #[test]
    fn uniform_random_is_seeded_and_in_range() {
        let g = Graph::<f64>::empty(50);
        let s = WeightScheme::new(SchemeKind::UniformRandom).with_seed(3);
        let a = apply_scheme(&g, &s).unwrap();
        assert_eq!(a, apply_scheme(&g, &s).unwrap());
        assert!(a.weights().iter().all(|&w| (0.1..=1000.0).contains(&w)));
        assert_ne!(a, apply_scheme(&g, &s.with_seed(4)).unwrap());
    }

    #[test]
    fn rejections() {
        let one = Graph::<f64>::empty(1);
        for kind in [
            SchemeKind::DegreeCentrality,
            SchemeKind::Closeness,
            SchemeKind::Betweenness,
        ] {
            assert!(apply_scheme(&one, &WeightScheme::new(kind)).is_err());
        }
        let bad = WeightScheme::new(SchemeKind::DegreeCentrality).with_delta_bar(0.0);
        assert!(apply_scheme(&p3(), &bad).is_err());
        assert!(SchemeKind::parse("nope").is_err());
        assert_eq!(
            SchemeKind::parse("max_clique").unwrap(),
            SchemeKind::MaxClique
        );
    }

    #[test]
    fn exact_degree_centrality() {
        let g = Graph::<Rational64>::build(4, &[(0, 1), (1, 2), (1, 3)], None).unwrap();
        let w = apply_scheme(
            &g,
            &WeightScheme::new(SchemeKind::DegreeCentrality).with_delta_bar(10.0),
        )
        .unwrap();
        let third = Rational64::new(1, 3);
        assert_eq!(
            w.weights(),
            &[
                Rational64::from_integer(1) + third * 10,
                Rational64::from_integer(11),
                Rational64::from_integer(1) + third * 10,
                Rational64::from_integer(1) + third * 10
            ]
        );
        let m = apply_scheme(&g, &WeightScheme::new(SchemeKind::Matching)).unwrap();
        assert_eq!(m.weight(3), Rational64::new(1, 5));
    }

    #[test]
    fn annihilation_examples() {
        let star = Graph::<f64>::build(4, &[(0, 1), (0, 2), (0, 3)], None).unwrap();
        assert_eq!(annihilation_number(&star), (3, vec![1, 2, 3]));
        assert_eq!(annihilation_number(&Graph::<f64>::empty(4)).0, 4);
        assert_eq!(annihilation_number(&k(3)).0, 1);
    }

    #[test]
    fn clique_examples() {
        assert_eq!(maximum_clique(&k(5)).len(), 5);
        let c5 = Graph::<f64>::build(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)], None).unwrap();
        assert_eq!(maximum_clique(&c5).len(), 2);
    }
}
