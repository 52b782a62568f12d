//! Hardness parameters of an instance: geometric density, min-fill
//! treewidth, slab thickness, connected components, and the interaction
//! leakage of the trap layouts.

pub mod geometry;
pub mod treewidth;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::generate::LayoutKind;
use crate::graph::Graph;
use crate::instance::Instance;
use crate::scalar::Weight;

pub use geometry::{geometric_density, thickness, DEFAULT_ORIENTATIONS};
pub use treewidth::{exact_treewidth, minfill_treewidth, TreeDecomposition};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardnessReport {
    pub fill_density: Option<f64>,
    /// `None` for instances without geometry.
    pub geometric_density: Option<usize>,
    pub treewidth_est: usize,
    pub thickness_est: Option<usize>,
    pub component_sizes: Vec<usize>,
}

pub fn analyze<W: Weight>(inst: &Instance<W>, n_orientations: usize) -> Result<HardnessReport> {
    let geo = inst.positions.is_some() && inst.disk_radius > 0.0;
    Ok(HardnessReport {
        fill_density: inst.meta.rho,
        geometric_density: if geo {
            Some(geometric_density(inst, n_orientations)?)
        } else {
            None
        },
        treewidth_est: minfill_treewidth(&inst.graph).width,
        thickness_est: if geo {
            Some(thickness(inst, n_orientations)?)
        } else {
            None
        },
        component_sizes: component_stats(&inst.graph),
    })
}

/// Connected components as vertex lists, each sorted, ordered by smallest
/// vertex.
pub fn components<W: Weight>(g: &Graph<W>) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        stack.push(s);
        let mut comp = Vec::new();
        while let Some(u) = stack.pop() {
            comp.push(u);
            for &w in g.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Component sizes, descending.
pub fn component_stats<W: Weight>(g: &Graph<W>) -> Vec<usize> {
    let mut sizes: Vec<usize> = components(g).iter().map(Vec::len).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

/// Fraction of vertices in the largest component.
pub fn largest_component_fraction<W: Weight>(g: &Graph<W>) -> f64 {
    if g.n() == 0 {
        return 0.0;
    }
    component_stats(g)[0] as f64 / g.n() as f64
}

/// `(longest edge, shortest non-edge)` distances in units of the spacing.
///
/// For King's layouts the non-edge partner is the (2,1) knight-move site,
/// which is the comparison the 6.4% leakage figure corresponds to.
pub fn leakage_distances(kind: LayoutKind) -> (f64, f64) {
    match kind {
        LayoutKind::Triangular => (1.0, 3f64.sqrt()),
        LayoutKind::Kings => (2f64.sqrt(), 5f64.sqrt()),
    }
}

/// Ratio `U(d_nonedge)/U(d_edge)` under `U ∝ 1/r⁶`.
pub fn interaction_leakage(kind: LayoutKind) -> f64 {
    let (edge, non_edge) = leakage_distances(kind);
    (edge / non_edge).powi(6)
}

/// String front end for [`interaction_leakage`].
pub fn interaction_leakage_by_name(kind: &str) -> Result<f64> {
    Ok(interaction_leakage(LayoutKind::parse(kind)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn component_examples() {
        let g = Graph::<f64>::build(4, &[(0, 1), (1, 2)], None).unwrap();
        assert_eq!(component_stats(&g), vec![3, 1]);
        assert_eq!(component_stats(&Graph::<f64>::empty(5)), vec![1; 5]);
        let c5 = Graph::<f64>::build(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)], None).unwrap();
        assert_eq!(component_stats(&c5), vec![5]);
    }

    #[test]
    fn long_path_without_recursion() {
        let n = 200_000;
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        let g = Graph::<f64>::build(n, &edges, None).unwrap();
        assert_eq!(component_stats(&g), vec![n]);
    }

    #[test]
    fn leakage_constants() {
        assert!((interaction_leakage(LayoutKind::Triangular) - 1.0 / 27.0).abs() < 1e-15);
        assert!((interaction_leakage(LayoutKind::Kings) - 8.0 / 125.0).abs() < 1e-15);
        assert!((interaction_leakage_by_name("triangular").unwrap() - 0.0370).abs() < 1e-4);
        assert!(interaction_leakage_by_name("hexagonal").is_err());
    }

    #[test]
    fn report_on_rewired_graph_has_no_geometry() {
        let g = Graph::<f64>::build(3, &[(0, 1)], None).unwrap();
        let r = analyze(&Instance::from_graph(g), 10).unwrap();
        assert_eq!(r.geometric_density, None);
        assert_eq!(r.treewidth_est, 1);
        assert_eq!(r.component_sizes, vec![2, 1]);
    }
}
