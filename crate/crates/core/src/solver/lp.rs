//! Edge-formulation LP relaxation of MWIS,
//! `max Σ w_i x_i  s.t.  x_i + x_j ≤ 1 (ij ∈ E), 0 ≤ x ≤ 1`.
//!
//! The optimum is half-integral and equals half the maximum-weight
//! independent set of the bipartite double cover (copies `v⁻`, `v⁺`, with
//! `u⁻v⁺` and `v⁻u⁺` for every edge `uv`). That bipartite problem is the
//! complement of a minimum-weight vertex cover, which is a minimum s-t cut.

use std::collections::VecDeque;

use crate::graph::Graph;
use crate::scalar::Weight;

struct Arc<W> {
    to: usize,
    cap: W,
}

/// Dinic max-flow over any [`Weight`] capacity type.
struct FlowNetwork<W> {
    arcs: Vec<Arc<W>>,
    out: Vec<Vec<usize>>,
}

impl<W: Weight> FlowNetwork<W> {
    fn new(n: usize) -> Self {
        Self {
            arcs: Vec::new(),
            out: vec![Vec::new(); n],
        }
    }

    fn add(&mut self, a: usize, b: usize, cap: W) {
        self.out[a].push(self.arcs.len());
        self.arcs.push(Arc { to: b, cap });
        self.out[b].push(self.arcs.len());
        self.arcs.push(Arc {
            to: a,
            cap: W::zero(),
        });
    }

    fn levels(&self, s: usize) -> Vec<usize> {
        let mut level = vec![usize::MAX; self.out.len()];
        level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &e in &self.out[u] {
                let a = &self.arcs[e];
                if a.cap > W::zero() && level[a.to] == usize::MAX {
                    level[a.to] = level[u] + 1;
                    q.push_back(a.to);
                }
            }
        }
        level
    }

    fn push(&mut self, u: usize, t: usize, limit: W, level: &[usize], it: &mut [usize]) -> W {
        if u == t {
            return limit;
        }
        while it[u] < self.out[u].len() {
            let e = self.out[u][it[u]];
            let (to, cap) = (self.arcs[e].to, self.arcs[e].cap);
            if cap > W::zero() && level[to] == level[u] + 1 {
                let d = self.push(to, t, limit.min_of(cap), level, it);
                if d > W::zero() {
                    self.arcs[e].cap -= d;
                    self.arcs[e ^ 1].cap += d;
                    return d;
                }
            }
            it[u] += 1;
        }
        W::zero()
    }

    fn max_flow(&mut self, s: usize, t: usize, infinity: W) -> W {
        let mut flow = W::zero();
        loop {
            let level = self.levels(s);
            if level[t] == usize::MAX {
                return flow;
            }
            let mut it = vec![0; self.out.len()];
            loop {
                let d = self.push(s, t, infinity, &level, &mut it);
                if d > W::zero() {
                    flow += d;
                } else {
                    break;
                }
            }
        }
    }
}

/// Optimal half-integral LP solution, as doubled values `2x_i ∈ {0,1,2}`,
/// and the LP objective.
pub fn lp_root_solution<W: Weight>(g: &Graph<W>) -> (Vec<u8>, W) {
    let n = g.n();
    let (s, t) = (2 * n, 2 * n + 1);
    let mut net = FlowNetwork::new(2 * n + 2);
    let total = g.total_weight();
    let infinity = W::two() * total + W::one();
    for v in 0..n {
        net.add(s, v, g.weight(v));
        net.add(n + v, t, g.weight(v));
    }
    for &(a, b) in g.edges() {
        net.add(a, n + b, infinity);
        net.add(b, n + a, infinity);
    }
    let flow = net.max_flow(s, t, infinity);
    // independent set of the double cover = source side on the left,
    // sink side on the right
    let reach = net.levels(s);
    let doubled = (0..n)
        .map(|v| {
            let left = reach[v] != usize::MAX;
            let right = reach[n + v] == usize::MAX;
            left as u8 + right as u8
        })
        .collect();
    (doubled, total - flow.half())
}

/// LP optimum of the edge relaxation at the root.
pub fn lp_root_relaxation<W: Weight>(g: &Graph<W>) -> W {
    lp_root_solution(g).1
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    #[test]
    fn examples() {
        let c5 = Graph::<f64>::build(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)], None).unwrap();
        let (x, v) = lp_root_solution(&c5);
        assert_eq!(v, 2.5);
        assert_eq!(x, vec![1; 5]);
        let p3 = Graph::<f64>::build(3, &[(0, 1), (1, 2)], None).unwrap();
        assert_eq!(lp_root_relaxation(&p3), 2.0);
        let one = Graph::build(1, &[], Some(vec![7.0])).unwrap();
        assert_eq!(lp_root_relaxation(&one), 7.0);
        assert_eq!(lp_root_relaxation(&Graph::<f64>::empty(0)), 0.0);
    }

    #[test]
    fn solution_is_feasible_and_matches_value() {
        let g = Graph::build(
            6,
            &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5)],
            Some(
                vec![3, 1, 4, 1, 5, 9]
                    .into_iter()
                    .map(Rational64::from_integer)
                    .collect(),
            ),
        )
        .unwrap();
        let (x, v) = lp_root_solution(&g);
        for &(a, b) in g.edges() {
            assert!(x[a] + x[b] <= 2);
        }
        let obj: Rational64 = (0..6)
            .map(|i| g.weight(i) * Rational64::new(x[i] as i64, 2))
            .sum();
        assert_eq!(obj, v);
    }
}
