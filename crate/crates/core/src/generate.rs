//! Instance generators: native triangular-layout sampling, the random box
//! model, King's lattices, and edge rewiring toward Erdős–Rényi graphs.

use std::cmp::Ordering;
use std::collections::HashSet;

use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::instance::{Instance, InstanceMeta, DISTANCE_TOL};
use crate::rng::rng;
use crate::scalar::Weight;

pub const DEFAULT_TRAPS: usize = 200;
pub const DEFAULT_SPACING_UM: f64 = 5.0;
/// Native disk radius as a multiple of the trap spacing: between the nearest
/// (1) and next-nearest (√3) triangular-lattice distances.
pub const NATIVE_RADIUS_FACTOR: f64 = 1.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutKind {
    Triangular,
    Kings,
}

impl LayoutKind {
    pub fn name(self) -> &'static str {
        match self {
            LayoutKind::Triangular => "triangular",
            LayoutKind::Kings => "kings",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "triangular" => Ok(Self::Triangular),
            "kings" => Ok(Self::Kings),
            other => Err(Error::Unknown {
                what: "layout kind",
                name: other.into(),
            }),
        }
    }
}

/// A trap layout; positions in μm, ordered from the center outward.
#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    pub trap_positions: Vec<(f64, f64)>,
    pub spacing: f64,
    pub kind: LayoutKind,
}

impl Layout {
    pub fn len(&self) -> usize {
        self.trap_positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trap_positions.is_empty()
    }

    pub fn id(&self) -> String {
        format!("{}-{}-{}um", self.kind.name(), self.len(), self.spacing)
    }

    /// Trap indices ordered by distance to the centroid, ties by polar angle
    /// then index.
    pub fn central_order(&self) -> Vec<usize> {
        let pts = &self.trap_positions;
        let n = pts.len() as f64;
        let cx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let cy = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let mut order: Vec<usize> = (0..pts.len()).collect();
        let keys: Vec<(f64, f64)> = pts
            .iter()
            .map(|&(x, y)| polar_key(x - cx, y - cy))
            .collect();
        order.sort_by(|&a, &b| cmp_polar(keys[a], keys[b]).then(a.cmp(&b)));
        order
    }
}

fn polar_key(dx: f64, dy: f64) -> (f64, f64) {
    let mut angle = dy.atan2(dx);
    if angle < 0.0 {
        angle += std::f64::consts::TAU;
    }
    (dx.hypot(dy), angle)
}

/// Radii within 1e-9 compare equal; likewise angles.
fn cmp_polar(a: (f64, f64), b: (f64, f64)) -> Ordering {
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-9;
    if !close(a.0, b.0) {
        return a.0.total_cmp(&b.0);
    }
    if !close(a.1, b.1) {
        return a.1.total_cmp(&b.1);
    }
    Ordering::Equal
}

fn lattice_layout(
    n_traps: usize,
    spacing: f64,
    kind: LayoutKind,
    point: impl Fn(i64, i64) -> (f64, f64),
) -> Result<Layout> {
    if n_traps == 0 {
        return Err(Error::InvalidParameter(
            "layout needs at least one trap".into(),
        ));
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "spacing must be positive, got {spacing}"
        )));
    }
    // a disk of lattice radius R holds ~πR² sites; overshoot and truncate
    let r = ((n_traps as f64).sqrt() as i64) + 2;
    let mut cands: Vec<(f64, f64)> = Vec::new();
    for j in -r..=r {
        for i in -r..=r {
            let (x, y) = point(i, j);
            cands.push((x * spacing, y * spacing));
        }
    }
    let keys: Vec<_> = cands.iter().map(|&(x, y)| polar_key(x, y)).collect();
    let mut order: Vec<usize> = (0..cands.len()).collect();
    order.sort_by(|&a, &b| cmp_polar(keys[a], keys[b]).then(a.cmp(&b)));
    let trap_positions = order
        .into_iter()
        .take(n_traps)
        .map(|k| clean(cands[k]))
        .collect();
    Ok(Layout {
        trap_positions,
        spacing,
        kind,
    })
}

fn clean(p: (f64, f64)) -> (f64, f64) {
    let z = |v: f64| if v.abs() < 1e-12 { 0.0 } else { v };
    (z(p.0), z(p.1))
}

/// Regular triangular lattice, `n_traps` sites closest to the origin.
pub fn triangular_layout(n_traps: usize, spacing: f64) -> Result<Layout> {
    let h = 3f64.sqrt() / 2.0;
    lattice_layout(n_traps, spacing, LayoutKind::Triangular, |i, j| {
        (i as f64 + 0.5 * j as f64, h * j as f64)
    })
}

/// Square lattice, for King's-graph native layouts.
pub fn square_layout(n_traps: usize, spacing: f64) -> Result<Layout> {
    lattice_layout(n_traps, spacing, LayoutKind::Kings, |i, j| {
        (i as f64, j as f64)
    })
}

/// `round(N/ρ)` with halves rounded up.
pub fn candidate_count(n: usize, rho: f64) -> usize {
    (n as f64 / rho + 0.5).floor() as usize
}

/// Default unit-disk radius for a layout: nearest neighbors connected,
/// next-nearest not.
pub fn native_radius(layout: &Layout) -> f64 {
    match layout.kind {
        LayoutKind::Triangular => NATIVE_RADIUS_FACTOR * layout.spacing,
        // King's adjacency includes diagonals at √2
        LayoutKind::Kings => 1.5 * layout.spacing,
    }
}

/// Samples `n` occupied traps among the `round(n/ρ)` most central ones.
pub fn sample_native_instance<W: Weight>(
    layout: &Layout,
    n: usize,
    rho: f64,
    radius: f64,
    seed: u64,
) -> Result<Instance<W>> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "rho must be in (0,1], got {rho}"
        )));
    }
    let l = candidate_count(n, rho);
    if l > layout.len() {
        return Err(Error::LayoutTooSmall {
            required: l,
            available: layout.len(),
        });
    }
    if l < n {
        return Err(Error::InvalidParameter(format!(
            "{n} atoms do not fit in {l} candidate traps"
        )));
    }
    let central = layout.central_order();
    let mut rng = rng(seed);
    let mut picked: Vec<usize> = index::sample(&mut rng, l, n)
        .into_iter()
        .map(|k| central[k])
        .collect();
    picked.sort_unstable();
    let points = picked.iter().map(|&t| layout.trap_positions[t]).collect();
    let mut inst = Instance::unit_disk_from_points(points, radius)?;
    inst.meta = InstanceMeta {
        name: format!("native-n{n}-rho{rho}-s{seed}"),
        generator: "native".into(),
        rho: Some(rho),
        seed: Some(seed),
        layout: Some(layout.id()),
        spacing_um: Some(layout.spacing),
    };
    Ok(inst)
}

/// Box side `√(n/ρ)` of the random unit-disk model.
pub fn box_side(n: usize, rho: f64) -> f64 {
    (n as f64 / rho).sqrt()
}

/// `n` uniform points in a box of side `√(n/ρ)`, disk radius 1.
pub fn random_udg_box<W: Weight>(n: usize, rho: f64, seed: u64) -> Result<Instance<W>> {
    if n == 0 {
        return Err(Error::InvalidParameter("box model needs n >= 1".into()));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "rho must be positive, got {rho}"
        )));
    }
    let side = box_side(n, rho);
    let mut rng = rng(seed);
    let points = (0..n)
        .map(|_| (rng.gen::<f64>() * side, rng.gen::<f64>() * side))
        .collect();
    let mut inst = Instance::unit_disk_from_points(points, 1.0)?;
    inst.meta = InstanceMeta {
        name: format!("box-n{n}-rho{rho}-s{seed}"),
        generator: "box".into(),
        rho: Some(rho),
        seed: Some(seed),
        layout: None,
        spacing_um: None,
    };
    Ok(inst)
}

/// King's lattice: unit grid, edges at Chebyshev distance 1. Vertex
/// `y·width + x` sits at `(x, y)`.
pub fn kings_lattice<W: Weight>(width: usize, height: usize) -> Result<Instance<W>> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidParameter(
            "lattice dimensions must be >= 1".into(),
        ));
    }
    let points = (0..height)
        .flat_map(|y| (0..width).map(move |x| (x as f64, y as f64)))
        .collect();
    let mut inst = Instance::unit_disk_from_points(points, 2f64.sqrt())?;
    inst.meta = InstanceMeta {
        name: format!("kings-{width}x{height}"),
        generator: "kings".into(),
        ..Default::default()
    };
    Ok(inst)
}

/// Replaces `round(fraction·|E|)` seeded-chosen edges with fresh random pairs.
///
/// Replacement pairs are never self-loops, never edges of the input graph,
/// and never repeat, so the edge count is preserved exactly and the rewired
/// edges are disjoint from the removed ones.
pub fn rewire<W: Weight>(g: &Graph<W>, fraction: f64, seed: u64) -> Result<Graph<W>> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidParameter(format!(
            "rewire fraction must be in [0,1], got {fraction}"
        )));
    }
    let m = g.edge_count();
    let k = (fraction * m as f64).round() as usize;
    let n = g.n();
    let all_pairs = n * n.saturating_sub(1) / 2;
    let free = all_pairs - m;
    if k > free {
        return Err(Error::RewireInfeasible(format!(
            "{k} replacements requested but only {free} non-edges exist"
        )));
    }
    let mut rng = rng(seed);
    let removed: HashSet<usize> = index::sample(&mut rng, m, k).into_iter().collect();
    let original: HashSet<(usize, usize)> = g.edges().iter().copied().collect();
    let mut edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(i, _)| !removed.contains(i))
        .map(|(_, &e)| e)
        .collect();
    let mut added: HashSet<(usize, usize)> = HashSet::with_capacity(k);
    if 2 * free >= all_pairs {
        while added.len() < k {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a == b {
                continue;
            }
            let e = (a.min(b), a.max(b));
            if original.contains(&e) || added.contains(&e) {
                continue;
            }
            added.insert(e);
            edges.push(e);
        }
    } else {
        let non_edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|e| !original.contains(e))
            .collect();
        for idx in index::sample(&mut rng, non_edges.len(), k) {
            edges.push(non_edges[idx]);
        }
    }
    Graph::build(n, &edges, Some(g.weights().to_vec()))
}

/// Minimum pairwise distance, for layout checks.
pub fn min_pairwise_distance(points: &[(f64, f64)]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = (points[i].0 - points[j].0).hypot(points[i].1 - points[j].1);
            best = best.min(d);
        }
    }
    best
}

/// `true` if every trap is at least `spacing` from every other.
pub fn layout_is_valid(layout: &Layout) -> bool {
    layout.len() < 2
        || (min_pairwise_distance(&layout.trap_positions) - layout.spacing).abs() <= DISTANCE_TOL
}
