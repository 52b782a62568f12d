//! Instances: a graph plus optional geometry and generation metadata, with
//! the JSON and DIMACS file formats.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Weight;

/// Absolute tolerance of the unit-disk distance test.
pub const DISTANCE_TOL: f64 = 1e-9;

/// Generation provenance.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct InstanceMeta {
    pub name: String,
    pub generator: String,
    pub rho: Option<f64>,
    pub seed: Option<u64>,
    pub layout: Option<String>,
    pub spacing_um: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance<W = f64> {
    pub graph: Graph<W>,
    pub positions: Option<Vec<(f64, f64)>>,
    pub disk_radius: f64,
    pub meta: InstanceMeta,
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Unit-disk edges: every pair at distance `≤ radius + DISTANCE_TOL`.
pub fn unit_disk_edges(points: &[(f64, f64)], radius: f64) -> Vec<(usize, usize)> {
    // grid bucketing keeps this near-linear for the large box-model sweeps
    let cell = radius + 2.0 * DISTANCE_TOL;
    let key = |p: (f64, f64)| ((p.0 / cell).floor() as i64, (p.1 / cell).floor() as i64);
    let mut buckets: std::collections::HashMap<(i64, i64), Vec<usize>> =
        std::collections::HashMap::new();
    for (i, &p) in points.iter().enumerate() {
        buckets.entry(key(p)).or_default().push(i);
    }
    let mut edges = Vec::new();
    for (i, &p) in points.iter().enumerate() {
        let (cx, cy) = key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(list) = buckets.get(&(cx + dx, cy + dy)) {
                    for &j in list {
                        if j > i && dist(p, points[j]) <= radius + DISTANCE_TOL {
                            edges.push((i, j));
                        }
                    }
                }
            }
        }
    }
    edges.sort_unstable();
    edges
}

impl<W: Weight> Instance<W> {
    /// Unit-disk instance on the given points with unit weights.
    pub fn unit_disk_from_points(points: Vec<(f64, f64)>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "disk radius must be positive, got {radius}"
            )));
        }
        if let Some(i) = points
            .iter()
            .position(|p| !p.0.is_finite() || !p.1.is_finite())
        {
            return Err(Error::NonFiniteCoordinate(i));
        }
        let edges = unit_disk_edges(&points, radius);
        let graph = Graph::build(points.len(), &edges, None)?;
        Ok(Self {
            graph,
            positions: Some(points),
            disk_radius: radius,
            meta: InstanceMeta {
                generator: "points".into(),
                ..Default::default()
            },
        })
    }

    /// Abstract instance without geometry.
    pub fn from_graph(graph: Graph<W>) -> Self {
        Self {
            graph,
            positions: None,
            disk_radius: 0.0,
            meta: InstanceMeta::default(),
        }
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn positions(&self) -> Result<&[(f64, f64)]> {
        self.positions.as_deref().ok_or(Error::MissingPositions)
    }

    /// Positions divided by the disk radius, so that the radius becomes 1.
    pub fn normalized_positions(&self) -> Result<Vec<(f64, f64)>> {
        let r = self.disk_radius;
        if !(r > 0.0) {
            return Err(Error::InvalidParameter(
                "instance has no disk radius".into(),
            ));
        }
        Ok(self
            .positions()?
            .iter()
            .map(|&(x, y)| (x / r, y / r))
            .collect())
    }

    /// Checks the geometric invariant `edge ⇔ dist ≤ radius`.
    pub fn geometry_consistent(&self) -> bool {
        match &self.positions {
            None => true,
            Some(p) => {
                p.len() == self.n() && unit_disk_edges(p, self.disk_radius) == self.graph.edges()
            }
        }
    }

    pub fn with_graph(&self, graph: Graph<W>) -> Self {
        Self {
            graph,
            ..self.clone()
        }
    }
}

/// On-disk JSON form. Field order is the serialized key order.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct InstanceFile {
    pub name: String,
    pub seed: Option<u64>,
    pub generator: String,
    pub params: InstanceParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<[f64; 2]>>,
    pub edges: Vec<[usize; 2]>,
    pub weights: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct InstanceParams {
    pub n: usize,
    pub rho: Option<f64>,
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing_um: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<String>,
}

impl<W: Weight> Instance<W> {
    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            name: self.meta.name.clone(),
            seed: self.meta.seed,
            generator: self.meta.generator.clone(),
            params: InstanceParams {
                n: self.n(),
                rho: self.meta.rho,
                radius: self.disk_radius,
                spacing_um: self.meta.spacing_um,
                layout: self.meta.layout.clone(),
            },
            positions: self
                .positions
                .as_ref()
                .map(|p| p.iter().map(|&(x, y)| [x, y]).collect()),
            edges: self.graph.edges().iter().map(|&(a, b)| [a, b]).collect(),
            weights: self.graph.weights().iter().map(Weight::as_f64).collect(),
        }
    }

    pub fn from_file(file: InstanceFile) -> Result<Self> {
        let n = file.params.n;
        let edges: Vec<_> = file.edges.iter().map(|e| (e[0], e[1])).collect();
        let weights = file
            .weights
            .iter()
            .enumerate()
            .map(|(i, &w)| {
                W::from_f64(w).ok_or_else(|| Error::InvalidWeight {
                    index: i,
                    value: w.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let graph = Graph::build(n, &edges, Some(weights))?;
        let positions: Option<Vec<(f64, f64)>> = file
            .positions
            .map(|p| p.into_iter().map(|[x, y]| (x, y)).collect());
        if let Some(p) = &positions {
            if p.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: p.len(),
                });
            }
            if let Some(i) = p.iter().position(|q| !q.0.is_finite() || !q.1.is_finite()) {
                return Err(Error::NonFiniteCoordinate(i));
            }
        }
        Ok(Self {
            graph,
            positions,
            disk_radius: file.params.radius,
            meta: InstanceMeta {
                name: file.name,
                generator: file.generator,
                rho: file.params.rho,
                seed: file.seed,
                layout: file.params.layout,
                spacing_um: file.params.spacing_um,
            },
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?)
    }

    /// DIMACS-like export: `p edge n m`, `e i j` (1-indexed), `n i w` weights.
    pub fn to_dimacs(&self, with_weights: bool) -> String {
        let g = &self.graph;
        let mut out = String::new();
        let _ = writeln!(out, "p edge {} {}", g.n(), g.edge_count());
        for &(a, b) in g.edges() {
            let _ = writeln!(out, "e {} {}", a + 1, b + 1);
        }
        if with_weights {
            for (i, w) in g.weights().iter().enumerate() {
                let _ = writeln!(out, "n {} {}", i + 1, w.as_f64());
            }
        }
        out
    }
}

/// Parses the DIMACS-like format written by [`Instance::to_dimacs`].
pub fn graph_from_dimacs<W: Weight>(text: &str) -> Result<Graph<W>> {
    let bad = |line: &str| Error::InvalidParameter(format!("bad DIMACS line: {line:?}"));
    let mut n = None;
    let mut edges = Vec::new();
    let mut weights: Option<Vec<W>> = None;
    for line in text.lines() {
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.as_slice() {
            [] | ["c", ..] => {}
            ["p", "edge", nn, _m] => {
                let nn: usize = nn.parse().map_err(|_| bad(line))?;
                n = Some(nn);
            }
            ["e", a, b] => {
                let a: usize = a.parse().map_err(|_| bad(line))?;
                let b: usize = b.parse().map_err(|_| bad(line))?;
                if a == 0 || b == 0 {
                    return Err(bad(line));
                }
                edges.push((a - 1, b - 1));
            }
            ["n", i, w] => {
                let nn = n.ok_or_else(|| bad(line))?;
                let i: usize = i.parse().map_err(|_| bad(line))?;
                let w: f64 = w.parse().map_err(|_| bad(line))?;
                if i == 0 || i > nn {
                    return Err(bad(line));
                }
                let ws = weights.get_or_insert_with(|| vec![W::one(); nn]);
                ws[i - 1] = W::from_f64(w).ok_or_else(|| bad(line))?;
            }
            _ => return Err(bad(line)),
        }
    }
    Graph::build(n.ok_or_else(|| bad("missing header"))?, &edges, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type Inst = Instance<f64>;

    #[test]
    fn unit_disk_examples() {
        let i = Inst::unit_disk_from_points(vec![(0.0, 0.0), (0.9, 0.0)], 1.0).unwrap();
        assert_eq!(i.graph.edge_count(), 1);
        let i = Inst::unit_disk_from_points(vec![(0.0, 0.0), (1.1, 0.0)], 1.0).unwrap();
        assert_eq!(i.graph.edge_count(), 0);
        let i = Inst::unit_disk_from_points(vec![(0.0, 0.0), (0.9, 0.0), (1.8, 0.0)], 1.0).unwrap();
        assert_eq!(i.graph.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(i.graph.weights(), &[1.0; 3]);
    }

    #[test]
    fn boundary_is_inclusive() {
        let i = Inst::unit_disk_from_points(vec![(0.0, 0.0), (1.0, 0.0)], 1.0).unwrap();
        assert_eq!(i.graph.edge_count(), 1);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(
            Inst::unit_disk_from_points(vec![(0.0, 0.0), (f64::NAN, 0.0)], 1.0),
            Err(Error::NonFiniteCoordinate(1))
        ));
        assert!(Inst::unit_disk_from_points(vec![(0.0, 0.0)], 0.0).is_err());
    }

    #[test]
    fn json_key_order_and_roundtrip() {
        let mut i =
            Inst::unit_disk_from_points(vec![(0.0, 0.0), (0.9, 0.0), (1.8, 0.0)], 1.0).unwrap();
        i.meta.name = "p3".into();
        i.meta.rho = Some(0.5);
        i.meta.seed = Some(7);
        let text = i.to_json().unwrap();
        let keys = [
            "\"name\"",
            "\"seed\"",
            "\"generator\"",
            "\"params\"",
            "\"positions\"",
            "\"edges\"",
            "\"weights\"",
        ];
        let idx: Vec<_> = keys.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(idx.windows(2).all(|w| w[0] < w[1]), "{text}");
        assert_eq!(Inst::from_json(&text).unwrap(), i);
    }

    #[test]
    fn dimacs_roundtrip() {
        let g = Graph::build(3, &[(0, 1), (1, 2)], Some(vec![1.0, 2.5, 3.0])).unwrap();
        let text = Inst::from_graph(g.clone()).to_dimacs(true);
        assert!(text.starts_with("p edge 3 2\ne 1 2\ne 2 3\n"));
        assert_eq!(graph_from_dimacs::<f64>(&text).unwrap(), g);
    }

    proptest! {
        #[test]
        fn rebuild_from_positions_is_idempotent(
            pts in proptest::collection::vec((0.0f64..6.0, 0.0f64..6.0), 0..40),
            r in 0.5f64..2.0,
        ) {
            let a = Inst::unit_disk_from_points(pts, r).unwrap();
            prop_assert!(a.geometry_consistent());
            let b = Inst::unit_disk_from_points(a.positions.clone().unwrap(), a.disk_radius).unwrap();
            prop_assert_eq!(a.graph.edges(), b.graph.edges());
        }
    }
}
