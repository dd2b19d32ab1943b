use alloc::vec::Vec;

use super::body::{Body, HullCloud, Polygon};
use super::{affine_dimension, direction_set, PointSet, DEFAULT_DIRECTIONS};
use crate::error::Result;
use crate::linalg;

#[inline]
pub(crate) fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain. Returns the hull counter-clockwise, starting at
/// the lexicographically smallest point, with collinear points removed.
///
/// `tol` is an absolute threshold on the turn cross product; turns at or
/// below it count as collinear.
pub fn monotone_chain(mut pts: Vec<[f64; 2]>, tol: f64) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(pts.len() + 1);
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= tol {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= tol {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    if hull.len() == 2 && hull[0] == hull[1] {
        hull.pop();
    }
    hull
}

/// Convex hull of a point cloud.
///
/// Exact polygon in the plane; in one dimension the two extreme points; in
/// higher dimensions the points that are extreme along some direction of the
/// fixed support-direction set.
pub fn convex_hull(points: &PointSet) -> Result<Body> {
    match points.dim() {
        2 => {
            let pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
            let s = points.scale();
            let hull = monotone_chain(pts, 1e-12 * s * s);
            Ok(Body::from_polygon(Polygon::from_ccw(hull)))
        }
        1 => {
            let (lo, hi) = points
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[0]), hi.max(p[0])));
            let coords = if lo == hi { alloc::vec![lo] } else { alloc::vec![lo, hi] };
            Ok(Body::from_cloud(HullCloud::new(PointSet::new(1, coords)?)))
        }
        n => {
            let dirs = direction_set(n, DEFAULT_DIRECTIONS);
            let mut keep: Vec<usize> = Vec::new();
            for d in &dirs {
                let mut best = 0;
                let mut bv = f64::NEG_INFINITY;
                for (i, p) in points.iter().enumerate() {
                    let v = linalg::dot(p, d);
                    if v > bv {
                        bv = v;
                        best = i;
                    }
                }
                keep.push(best);
            }
            keep.sort_unstable();
            keep.dedup();
            let mut coords = Vec::with_capacity(keep.len() * n);
            for i in keep {
                coords.extend_from_slice(points.point(i));
            }
            let cloud = PointSet::new(n, coords)?;
            let full = affine_dimension(points) == n;
            let mut hc = HullCloud::new(cloud);
            if !full {
                hc.mark_degenerate();
            }
            Ok(Body::from_cloud(hc))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_point_dropped() {
        let p = PointSet::from_points(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.2, 0.2]]).unwrap();
        let b = convex_hull(&p).unwrap();
        assert_eq!(b.vertices().count(), 3);
        assert!(b.is_full_dimensional());
    }

    #[test]
    fn square_and_collinear_edge_points() {
        let p = PointSet::from_points(&[
            [1.0, 1.0],
            [-1.0, 1.0],
            [-1.0, -1.0],
            [1.0, -1.0],
            [0.0, 1.0],
            [1.0, 0.0],
        ])
        .unwrap();
        let b = convex_hull(&p).unwrap();
        let v: Vec<&[f64]> = b.vertices().collect();
        assert_eq!(v.len(), 4);
        // counter-clockwise orientation
        let poly = b.as_polygon().unwrap();
        assert!(poly.area() > 0.0);
        assert!((poly.area() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn coincident_points_degenerate() {
        let p = PointSet::from_points(&[[0.5, 0.5], [0.5, 0.5]]).unwrap();
        let b = convex_hull(&p).unwrap();
        assert!(!b.is_full_dimensional());
        assert_eq!(b.vertices().count(), 1);
    }

    #[test]
    fn cube_hull_cloud() {
        let mut pts = Vec::new();
        for s in 0..8 {
            pts.push([
                if s & 1 == 0 { -1.0 } else { 1.0 },
                if s & 2 == 0 { -1.0 } else { 1.0 },
                if s & 4 == 0 { -1.0 } else { 1.0 },
            ]);
        }
        pts.push([0.1, 0.2, 0.3]);
        let b = convex_hull(&PointSet::from_points(&pts).unwrap()).unwrap();
        assert_eq!(b.vertices().count(), 8);
        assert!(b.is_full_dimensional());
        // corner direction evaluated through the support-direction set
        let m = b.minkowski_functional(&[2.0, 0.0, 0.0]).unwrap();
        assert!((m - 2.0).abs() < 0.1, "{m}");
    }
}
