use alloc::vec::Vec;

use super::{direction_set, Body, PointSet};

use crate::math;

/// `sup_{a in A} inf_{b in B} |a - b|`.
///
/// Large clouds in up to three dimensions go through a bucket grid over `B`;
/// otherwise an early-break scan is used. Both are exact.
pub fn directed_hausdorff(a: &PointSet, b: &PointSet) -> f64 {
    if a.dim() <= 3 && a.len() * b.len() > 4096 {
        bucketed(a, b)
    } else {
        scan(a, b)
    }
}

/// The inner loop stops as soon as some `b` is closer than the running
/// maximum.
fn scan(a: &PointSet, b: &PointSet) -> f64 {
    let mut cmax = 0.0_f64;
    let mut last = 0usize;
    let nb = b.len();
    for p in a.iter() {
        let mut cmin = f64::INFINITY;
        // start where the previous nearest neighbour was found
        for k in 0..nb {
            let j = (last + k) % nb;
            let d = sq_dist(p, b.point(j));
            if d < cmin {
                cmin = d;
                if d < cmax {
                    last = j;
                    break;
                }
            }
        }
        if cmin > cmax {
            cmax = cmin;
        }
    }
    math::sqrt(cmax)
}

/// Ring search on a uniform grid of about one point of `B` per cell. A point
/// in a cell at Chebyshev ring `r` around the query's cell is at least
/// `(r - 1) h` away, so the search stops once the best distance is at most
/// `r h`; queries far from `B` fall back to a scan.
fn bucketed(a: &PointSet, b: &PointSet) -> f64 {
    const MAX_RING: i64 = 6;
    let n = b.dim();
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for q in b.iter() {
        for k in 0..n {
            lo[k] = lo[k].min(q[k]);
            hi[k] = hi[k].max(q[k]);
        }
    }
    let extent = (0..n).fold(0.0_f64, |m, k| m.max(hi[k] - lo[k]));
    let per_side = math::root(b.len() as f64, n).max(1.0);
    let h = if extent > 0.0 { extent / per_side } else { 1.0 };
    let key = |p: &[f64]| -> [i64; 3] {
        let mut c = [0i64; 3];
        for k in 0..n {
            c[k] = math::floor((p[k] - lo[k]) / h) as i64;
        }
        c
    };
    let mut cells: Vec<([i64; 3], usize)> = b.iter().enumerate().map(|(i, q)| (key(q), i)).collect();
    cells.sort_unstable();
    let bucket = |c: &[i64; 3]| {
        let start = cells.partition_point(|e| e.0 < *c);
        let end = start + cells[start..].partition_point(|e| e.0 == *c);
        &cells[start..end]
    };

    let mut cmax = 0.0_f64;
    for p in a.iter() {
        let kp = key(p);
        let mut best = f64::INFINITY;
        let mut settled = false;
        'rings: for r in 0..=MAX_RING {
            let span = |k: usize| if k < n { -r..=r } else { 0..=0 };
            for dx in span(0) {
                for dy in span(1) {
                    for dz in span(2) {
                        if dx.abs().max(dy.abs()).max(dz.abs()) != r {
                            continue;
                        }
                        let c = [kp[0] + dx, kp[1] + dy, kp[2] + dz];
                        for &(_, j) in bucket(&c) {
                            best = best.min(sq_dist(p, b.point(j)));
                        }
                    }
                }
            }
            // nothing closer than the current maximum can change it
            if best <= cmax {
                settled = true;
                break 'rings;
            }
            let reach = r as f64 * h;
            if best <= reach * reach {
                settled = true;
                break 'rings;
            }
        }
        if !settled {
            for q in b.iter() {
                best = best.min(sq_dist(p, q));
            }
        }
        if best > cmax {
            cmax = best;
        }
    }
    math::sqrt(cmax)
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Hausdorff distance between finite point sets, Euclidean ground metric.
pub fn hausdorff_distance(a: &PointSet, b: &PointSet) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

/// Hausdorff distance between convex bodies, `sup_u |h_A(u) - h_B(u)|` over
/// unit directions. In the plane the directions are a dense uniform set plus
/// every edge normal of both polygons.
pub fn convex_hausdorff(a: &Body, b: &Body) -> f64 {
    let dim = a.dim();
    let mut dirs: Vec<[f64; 2]> = Vec::new();
    if dim == 2 {
        for body in [a, b] {
            if let Some(p) = body.as_polygon() {
                let v = p.vertices();
                for i in 0..v.len() {
                    let s = v[i];
                    let e = v[(i + 1) % v.len()];
                    let nx = e[1] - s[1];
                    let ny = s[0] - e[0];
                    let l = math::hypot(nx, ny);
                    if l > 0.0 {
                        dirs.push([nx / l, ny / l]);
                    }
                }
            }
        }
    }
    let dense = direction_set(dim, if dim == 2 { 8192 } else { 2048 });
    let eval = |d: &[f64]| math::abs(a.support(d) - b.support(d));
    let mut best = dense.iter().fold(0.0_f64, |m, d| m.max(eval(d)));
    for d in &dirs {
        best = best.max(eval(d));
    }
    best
}
