//! Exact and approximate MWIS solvers.

pub mod bb;
pub mod brute;
pub mod dp;
pub mod lp;

use serde::{Deserialize, Serialize};

use crate::bitset::Bitset;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::instance::Instance;
use crate::scalar::Weight;

pub use brute::brute_force;
pub use dp::solve_treewidth_dp;
pub use lp::{lp_root_relaxation, lp_root_solution};

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport<W = f64> {
    pub optimum: W,
    pub solution: Vec<usize>,
    pub ticks: u64,
    pub bb_nodes: u64,
    pub lp_root: W,
    pub root_gap_pct: f64,
    /// `false` when the tick budget ran out; `optimum` is then the incumbent.
    pub optimal: bool,
}

/// JSON form of a [`SolveReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReportFile {
    pub optimum: f64,
    pub solution: Vec<usize>,
    pub ticks: u64,
    pub bb_nodes: u64,
    pub lp_root: f64,
    pub root_gap_pct: f64,
    pub optimal: bool,
}

impl<W: Weight> SolveReport<W> {
    pub fn to_file(&self) -> SolveReportFile {
        SolveReportFile {
            optimum: self.optimum.as_f64(),
            solution: self.solution.clone(),
            ticks: self.ticks,
            bb_nodes: self.bb_nodes,
            lp_root: self.lp_root.as_f64(),
            root_gap_pct: self.root_gap_pct,
            optimal: self.optimal,
        }
    }
}

/// `100·(lp − opt)/lp`; zero when both vanish.
pub fn gap_percent<W: Weight>(lp: W, opt: W) -> f64 {
    if lp > W::zero() {
        100.0 * ((lp - opt) / lp).as_f64()
    } else {
        0.0
    }
}

/// Exact MWIS by branch-and-bound, plus the LP root relaxation and gap.
pub fn solve_bb<W: Weight>(g: &Graph<W>, budget: Option<u64>) -> SolveReport<W> {
    let r = bb::branch_and_bound(g, budget);
    let lp_root = lp_root_relaxation(g);
    SolveReport {
        root_gap_pct: gap_percent(lp_root, r.value),
        optimum: r.value,
        solution: r.solution,
        ticks: r.stats.ticks,
        bb_nodes: r.stats.nodes,
        lp_root,
        optimal: !r.stats.exhausted,
    }
}

/// Root gap in percent of the LP value.
pub fn root_gap<W: Weight>(g: &Graph<W>) -> Result<f64> {
    let lp = lp_root_relaxation(g);
    if !(lp > W::zero()) {
        return Err(Error::Undefined(
            "root gap of a graph whose LP value is zero".into(),
        ));
    }
    let opt = bb::branch_and_bound(g, None).value;
    Ok(gap_percent(lp, opt))
}

/// Repeatedly takes the leftmost remaining disk (min x, then y, then index)
/// and deletes its closed neighborhood.
pub fn greedy_leftmost<W: Weight>(inst: &Instance<W>) -> Result<Vec<usize>> {
    let pos = inst.positions()?;
    let g = &inst.graph;
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by(|&a, &b| {
        pos[a]
            .0
            .total_cmp(&pos[b].0)
            .then(pos[a].1.total_cmp(&pos[b].1))
            .then(a.cmp(&b))
    });
    let mut removed = Bitset::new(g.n());
    let mut out = Vec::new();
    for v in order {
        if removed.contains(v) {
            continue;
        }
        out.push(v);
        removed.insert(v);
        removed.union_with(g.neighbor_mask(v));
    }
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn c5() -> Graph {
        Graph::build(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)], None).unwrap()
    }

    #[test]
    fn solve_examples() {
        let r = solve_bb(&c5(), None);
        assert_eq!(r.optimum, 2.0);
        assert!(r.optimal);
        assert_eq!(r.lp_root, 2.5);
        assert!((r.root_gap_pct - 20.0).abs() < 1e-12);

        let k4 = Graph::build(
            4,
            &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
            Some(vec![5.0, 1.0, 1.0, 1.0]),
        )
        .unwrap();
        let r = solve_bb(&k4, None);
        assert_eq!(r.optimum, 5.0);
        assert_eq!(r.solution, vec![0]);

        let r = solve_bb(&Graph::<f64>::empty(6), None);
        assert_eq!(r.optimum, 6.0);
        assert_eq!(r.solution.len(), 6);
    }

    #[test]
    fn ticks_are_deterministic() {
        let g = c5();
        assert_eq!(solve_bb(&g, None), solve_bb(&g, None));
    }

    #[test]
    fn root_gap_examples() {
        assert!((root_gap(&c5()).unwrap() - 20.0).abs() < 1e-12);
        let p4 = Graph::<f64>::build(4, &[(0, 1), (1, 2), (2, 3)], None).unwrap();
        assert_eq!(root_gap(&p4).unwrap(), 0.0);
        let single = Graph::build(1, &[], Some(vec![3.0])).unwrap();
        assert_eq!(root_gap(&single).unwrap(), 0.0);
        let zero = Graph::build(2, &[], Some(vec![0.0, 0.0])).unwrap();
        assert!(root_gap(&zero).is_err());
    }

    #[test]
    fn rational_weights_are_exact() {
        let g = Graph::build(
            5,
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)],
            Some((1..=5).map(|k| Rational64::new(1, k)).collect()),
        )
        .unwrap();
        let r = solve_bb(&g, None);
        assert_eq!(r.optimum, brute_force(&g).unwrap().0);
        // {0, 2}: 1 + 1/3
        assert_eq!(r.optimum, Rational64::new(4, 3));
        assert_eq!(r.lp_root, lp_root_relaxation(&g));
    }

    #[test]
    fn greedy_examples() {
        let p3: Instance =
            Instance::unit_disk_from_points(vec![(1.8, 0.0), (0.0, 0.0), (0.9, 0.0)], 1.0).unwrap();
        assert_eq!(greedy_leftmost(&p3).unwrap(), vec![0, 1]);
        let one: Instance = Instance::unit_disk_from_points(vec![(4.0, 4.0)], 1.0).unwrap();
        assert_eq!(greedy_leftmost(&one).unwrap(), vec![0]);
        let bare: Instance = Instance::from_graph(Graph::empty(2));
        assert!(greedy_leftmost(&bare).is_err());
    }
}
