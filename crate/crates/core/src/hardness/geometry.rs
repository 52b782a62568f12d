//! Orientation sweeps for geometric density and slab thickness.
//!
//! Both work on positions scaled so that the disk radius is 1. For a fixed
//! orientation the computation is exact: cell and slab membership only
//! changes when a boundary crosses a point projection, so enumerating grid
//! offsets at those breakpoints covers every distinct configuration.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::Result;
use crate::instance::Instance;
use crate::scalar::Weight;

pub const DEFAULT_ORIENTATIONS: usize = 180;

fn rotate(points: &[(f64, f64)], theta: f64) -> Vec<(f64, f64)> {
    let (s, c) = theta.sin_cos();
    points
        .iter()
        .map(|&(x, y)| (c * x + s * y, -s * x + c * y))
        .collect()
}

/// Largest number of points inside one half-open unit square
/// `[a, a+1) × [b, b+1)` over all placements.
pub fn max_points_in_unit_square(points: &[(f64, f64)]) -> usize {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = 0;
    let mut hi = 0;
    let mut ys: Vec<f64> = Vec::new();
    for lo in 0..pts.len() {
        let a = pts[lo].0;
        hi = hi.max(lo);
        while hi < pts.len() && pts[hi].0 < a + 1.0 {
            hi += 1;
        }
        if hi - lo <= best {
            continue;
        }
        ys.clear();
        ys.extend(pts[lo..hi].iter().map(|p| p.1));
        ys.sort_by(f64::total_cmp);
        let mut top = 0;
        for bottom in 0..ys.len() {
            top = top.max(bottom);
            while top < ys.len() && ys[top] < ys[bottom] + 1.0 {
                top += 1;
            }
            best = best.max(top - bottom);
        }
    }
    best
}

/// Smallest possible maximum slab population for slabs `[o+k, o+k+1)` along
/// the given projections, minimized over the offset `o`.
pub fn min_max_slab_count(proj: &[f64]) -> usize {
    if proj.is_empty() {
        return 0;
    }
    let mut offsets: Vec<f64> = proj.iter().map(|p| p - p.floor()).collect();
    offsets.sort_by(f64::total_cmp);
    offsets.dedup();
    let mut best = usize::MAX;
    let mut counts: std::collections::HashMap<i64, usize> = std::collections::HashMap::new();
    for &o in &offsets {
        counts.clear();
        let mut worst = 0;
        for &p in proj {
            let c = counts.entry((p - o).floor() as i64).or_insert(0);
            *c += 1;
            worst = worst.max(*c);
            if worst >= best {
                break;
            }
        }
        best = best.min(worst);
    }
    best
}

/// Geometric density: minimum over `n_orientations` grid angles in
/// `[0, π/2)` of the most points any unit cell of that orientation can hold.
pub fn geometric_density<W: Weight>(inst: &Instance<W>, n_orientations: usize) -> Result<usize> {
    let pts = inst.normalized_positions()?;
    Ok(density_of_points(&pts, n_orientations))
}

pub fn density_of_points(pts: &[(f64, f64)], n_orientations: usize) -> usize {
    if pts.is_empty() {
        return 0;
    }
    let k = n_orientations.max(1);
    (0..k)
        .map(|i| max_points_in_unit_square(&rotate(pts, FRAC_PI_2 * i as f64 / k as f64)))
        .min()
        .unwrap_or(0)
}

/// Slab thickness: minimum over `n_orientations` normal directions in
/// `[0, π)` and over slab offsets of the largest slab population.
pub fn thickness<W: Weight>(inst: &Instance<W>, n_orientations: usize) -> Result<usize> {
    let pts = inst.normalized_positions()?;
    Ok(thickness_of_points(&pts, n_orientations))
}

pub fn thickness_of_points(pts: &[(f64, f64)], n_orientations: usize) -> usize {
    if pts.is_empty() {
        return 0;
    }
    let k = n_orientations.max(1);
    (0..k)
        .map(|i| {
            let (s, c) = (PI * i as f64 / k as f64).sin_cos();
            let proj: Vec<f64> = pts.iter().map(|&(x, y)| c * x + s * y).collect();
            min_max_slab_count(&proj)
        })
        .min()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn density_examples() {
        assert_eq!(density_of_points(&[(0.3, 0.2)], 180), 1);
        assert_eq!(density_of_points(&[(0.0, 0.0), (3.0, 0.0)], 180), 1);
        let square = [(0.0, 0.0), (0.4, 0.0), (0.0, 0.4), (0.4, 0.4)];
        assert_eq!(density_of_points(&square, 180), 4);
        assert_eq!(density_of_points(&[], 180), 0);
    }

    #[test]
    fn density_scales_with_radius() {
        let inst: Instance = Instance::unit_disk_from_points(
            vec![(0.0, 0.0), (0.8, 0.0), (0.0, 0.8), (0.8, 0.8)],
            2.0,
        )
        .unwrap();
        assert_eq!(geometric_density(&inst, 90).unwrap(), 4);
        let far: Instance =
            Instance::unit_disk_from_points(vec![(0.0, 0.0), (3.0, 0.0)], 1.0).unwrap();
        assert_eq!(geometric_density(&far, 90).unwrap(), 1);
    }

    #[test]
    fn thickness_examples() {
        assert_eq!(
            thickness_of_points(&[(0.0, 0.0), (0.0, 2.5), (0.0, 5.0)], 180),
            1
        );
        assert_eq!(thickness_of_points(&[], 180), 0);
        // collinear at spacing 0.5: the perpendicular slabs still hold two each
        let line: Vec<_> = (0..8).map(|i| (0.5 * i as f64, 0.0)).collect();
        assert_eq!(thickness_of_points(&line, 180), 2);
        assert_eq!(thickness_of_points(&line[..2], 180), 1);
        let wide: Vec<_> = (0..8).map(|i| (1.5 * i as f64, 0.0)).collect();
        assert_eq!(thickness_of_points(&wide, 180), 1);
    }

    #[test]
    fn missing_positions() {
        let inst: Instance = Instance::from_graph(crate::graph::Graph::empty(3));
        assert!(thickness(&inst, 10).is_err());
        assert!(geometric_density(&inst, 10).is_err());
    }

    fn brute_square(points: &[(f64, f64)]) -> usize {
        let mut best = 0;
        for a in points {
            for b in points {
                let c = points
                    .iter()
                    .filter(|p| p.0 >= a.0 && p.0 < a.0 + 1.0 && p.1 >= b.1 && p.1 < b.1 + 1.0)
                    .count();
                best = best.max(c);
            }
        }
        best
    }

    proptest! {
        #[test]
        fn square_count_matches_brute_force(
            pts in proptest::collection::vec((0.0f64..4.0, 0.0f64..4.0), 1..30)
        ) {
            prop_assert_eq!(max_points_in_unit_square(&pts), brute_square(&pts));
        }

        #[test]
        fn monotone_under_insertion(
            pts in proptest::collection::vec((0.0f64..5.0, 0.0f64..5.0), 1..25),
            extra in (0.0f64..5.0, 0.0f64..5.0),
        ) {
            let mut more = pts.clone();
            more.push(extra);
            prop_assert!(thickness_of_points(&more, 24) >= thickness_of_points(&pts, 24));
            prop_assert!(density_of_points(&more, 24) >= density_of_points(&pts, 24));
        }
    }
}
