//! Shortest-path centralities with unit edge lengths.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hardness::components;
use crate::scalar::Weight;

fn bfs_distances<W: Weight>(g: &Graph<W>, s: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    dist[s] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        for &v in g.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
        }
    }
    dist
}

/// `C_C(v) = (n−1)/Σ_u d(v,u)`; defined only for connected graphs with
/// at least two vertices.
pub fn closeness_centrality<W: Weight>(g: &Graph<W>) -> Result<Vec<f64>> {
    let n = g.n();
    if n < 2 {
        return Err(Error::Undefined(format!(
            "closeness centrality needs at least 2 vertices, got {n}"
        )));
    }
    let comps = components(g).len();
    if comps > 1 {
        return Err(Error::Disconnected { components: comps });
    }
    Ok((0..n)
        .map(|v| {
            let total: usize = bfs_distances(g, v).iter().sum();
            (n - 1) as f64 / total as f64
        })
        .collect())
}

/// Unnormalized betweenness `C_B(v) = Σ σ_st(v)/σ_st` over ordered pairs
/// `s ≠ t`, both different from `v` (Brandes accumulation).
pub fn betweenness_centrality<W: Weight>(g: &Graph<W>) -> Vec<f64> {
    let n = g.n();
    let mut cb = vec![0.0; n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0; n];
    let mut order = Vec::with_capacity(n);
    for s in 0..n {
        sigma.fill(0.0);
        dist.fill(usize::MAX);
        delta.fill(0.0);
        order.clear();
        sigma[s] = 1.0;
        dist[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            order.push(u);
            for &v in g.neighbors(u) {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    q.push_back(v);
                }
                if dist[v] == dist[u] + 1 {
                    sigma[v] += sigma[u];
                }
            }
        }
        for &w in order.iter().rev() {
            for &v in g.neighbors(w) {
                if dist[v] != usize::MAX && dist[v] + 1 == dist[w] {
                    delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
                }
            }
            if w != s {
                cb[w] += delta[w];
            }
        }
    }
    cb
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closeness_examples() {
        let k3 = Graph::<f64>::build(3, &[(0, 1), (1, 2), (0, 2)], None).unwrap();
        assert_eq!(closeness_centrality(&k3).unwrap(), vec![1.0; 3]);
        let p3 = Graph::<f64>::build(3, &[(0, 1), (1, 2)], None).unwrap();
        assert_eq!(
            closeness_centrality(&p3).unwrap(),
            vec![2.0 / 3.0, 1.0, 2.0 / 3.0]
        );
        let c4 = Graph::<f64>::build(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], None).unwrap();
        assert_eq!(closeness_centrality(&c4).unwrap(), vec![0.75; 4]);
        let split = Graph::<f64>::build(4, &[(0, 1), (2, 3)], None).unwrap();
        assert!(matches!(
            closeness_centrality(&split),
            Err(Error::Disconnected { components: 2 })
        ));
        assert!(closeness_centrality(&Graph::<f64>::empty(1)).is_err());
    }

    #[test]
    fn betweenness_examples() {
        let p3 = Graph::<f64>::build(3, &[(0, 1), (1, 2)], None).unwrap();
        assert_eq!(betweenness_centrality(&p3), vec![0.0, 2.0, 0.0]);
        let k4 = Graph::<f64>::build(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], None)
            .unwrap();
        assert_eq!(betweenness_centrality(&k4), vec![0.0; 4]);
        // C4: each vertex lies on one of the two shortest paths between its
        // two neighbors, in both directions
        let c4 = Graph::<f64>::build(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], None).unwrap();
        assert_eq!(betweenness_centrality(&c4), vec![1.0; 4]);
    }
}
