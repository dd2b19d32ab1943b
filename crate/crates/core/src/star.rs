//! Planar regions that are star-shaped about the origin.
//!
//! Eigensets of a linear system are star-shaped and centrally symmetric, so
//! a planar eigenset is stored through its boundary as a star polygon with
//! vertices sorted by angle. Unions are computed exactly; simplification
//! bounds the vertex count.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::Matrix;
use crate::math;

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let e = [b[0] - a[0], b[1] - a[1]];
    let ee = e[0] * e[0] + e[1] * e[1];
    let t = if ee > 0.0 {
        (((p[0] - a[0]) * e[0] + (p[1] - a[1]) * e[1]) / ee).clamp(0.0, 1.0)
    } else {
        0.0
    };
    math::hypot(p[0] - a[0] - t * e[0], p[1] - a[1] - t * e[1])
}

/// Angular width of a sector from `a` to `b`, in `[0, 2π)`.
fn sweep(a: f64, b: f64) -> f64 {
    let d = b - a;
    if d < 0.0 {
        d + math::TAU
    } else {
        d
    }
}

/// Sectors at least this wide are not bounded by an edge.
const OPEN_SECTOR: f64 = math::PI - 1e-12;

/// Angular half-width given to zero-width spikes in unions.
const HAIR_WIDTH: f64 = 1e-9;

/// Closed region `{t v : v on the boundary polygon, t in [0, 1]}`.
///
/// Consecutive vertices (by angle) are joined by an edge unless their sector
/// is a half-turn or wider, in which case the region there is only the two
/// spokes from the origin. That covers segments and other flat images.
#[derive(Clone, Debug, PartialEq)]
pub struct StarPolygon {
    verts: Vec<[f64; 2]>,
    angles: Vec<f64>,
}

impl StarPolygon {
    /// Sorts points by angle; the origin is dropped and, among points on the
    /// same ray, the farthest is kept.
    pub fn from_points<I: IntoIterator<Item = [f64; 2]>>(points: I) -> StarPolygon {
        let mut v: Vec<(f64, f64, [f64; 2])> = points
            .into_iter()
            .filter(|p| p[0] != 0.0 || p[1] != 0.0)
            .map(|p| (math::atan2(p[1], p[0]), math::hypot(p[0], p[1]), p))
            .collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
        v.dedup_by(|b, a| a.0 == b.0);
        StarPolygon {
            angles: v.iter().map(|t| t.0).collect(),
            verts: v.into_iter().map(|t| t.2).collect(),
        }
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.verts
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    /// True for the region `{0}`.
    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn max_norm(&self) -> f64 {
        self.verts.iter().fold(0.0, |m, v| m.max(math::hypot(v[0], v[1])))
    }

    /// Image under `x -> s·Mx`. Valid for any linear map since linear images
    /// of star-shaped sets are star-shaped.
    pub fn mapped(&self, m: &Matrix, s: f64) -> StarPolygon {
        StarPolygon::from_points(self.verts.iter().map(|v| {
            let w = m.apply(v);
            [s * w[0], s * w[1]]
        }))
    }

    /// Index of the sector containing angle `t`: the last vertex with angle
    /// at most `t`, wrapping to the last vertex.
    fn sector(&self, t: f64) -> usize {
        let k = self.angles.partition_point(|&a| a <= t);
        if k == 0 {
            self.verts.len() - 1
        } else {
            k - 1
        }
    }

    fn next(&self, j: usize) -> usize {
        if j + 1 == self.verts.len() {
            0
        } else {
            j + 1
        }
    }

    fn sector_width(&self, j: usize) -> f64 {
        if self.verts.len() == 1 {
            return math::TAU;
        }
        let w = sweep(self.angles[j], self.angles[self.next(j)]);
        if w == 0.0 {
            math::TAU
        } else {
            w
        }
    }

    /// Distance from `p` to the boundary pieces of sector `j`.
    fn sector_distance(&self, j: usize, p: [f64; 2]) -> f64 {
        let a = self.verts[j];
        let b = self.verts[self.next(j)];
        if self.sector_width(j) >= OPEN_SECTOR {
            segment_distance(p, [0.0, 0.0], a).min(segment_distance(p, [0.0, 0.0], b))
        } else {
            segment_distance(p, a, b)
        }
    }

    /// Membership with an absolute distance tolerance.
    pub fn contains(&self, p: [f64; 2], tol: f64) -> bool {
        if p[0] == 0.0 && p[1] == 0.0 {
            return true;
        }
        if self.verts.is_empty() {
            return math::hypot(p[0], p[1]) <= tol;
        }
        let j = self.sector(math::atan2(p[1], p[0]));
        if self.sector_width(j) >= OPEN_SECTOR {
            return self.sector_distance(j, p) <= tol;
        }
        let a = self.verts[j];
        let b = self.verts[self.next(j)];
        let len = math::hypot(b[0] - a[0], b[1] - a[1]);
        cross(a, b, p) >= -tol * len
    }

    /// Minkowski functional `inf { μ >= 0 : p in μ S }`; infinite along a
    /// direction the region does not reach.
    pub fn gauge(&self, p: [f64; 2]) -> f64 {
        if p[0] == 0.0 && p[1] == 0.0 {
            return 0.0;
        }
        if self.verts.is_empty() {
            return f64::INFINITY;
        }
        let j = self.sector(math::atan2(p[1], p[0]));
        let a = self.verts[j];
        let b = self.verts[self.next(j)];
        if self.sector_width(j) >= OPEN_SECTOR {
            // only the spokes: p must lie on one of them
            for v in [a, b] {
                let c = v[0] * p[1] - v[1] * p[0];
                let d = v[0] * p[0] + v[1] * p[1];
                if c == 0.0 && d > 0.0 {
                    return math::hypot(p[0], p[1]) / math::hypot(v[0], v[1]);
                }
            }
            return f64::INFINITY;
        }
        let ab = a[0] * b[1] - a[1] * b[0];
        ((a[0] - b[0]) * p[1] - (a[1] - b[1]) * p[0]) / ab
    }

    /// Distance from `p` to the boundary of the region.
    pub fn boundary_distance(&self, p: [f64; 2]) -> f64 {
        let n = self.verts.len();
        if n == 0 {
            return math::hypot(p[0], p[1]);
        }
        let r = math::hypot(p[0], p[1]);
        let t = math::atan2(p[1], p[0]);
        let j0 = self.sector(t);
        let mut best = self.sector_distance(j0, p);
        // Points of a sector at angular offset Δ from p are at least
        // r·sin(min(Δ, π/2)) away, and offsets grow as we walk outward.
        let bound = |delta: f64| r * math::sin(delta.min(0.5 * math::PI));
        let mut fwd = j0;
        let mut bwd = j0;
        let mut fwd_open = true;
        let mut bwd_open = true;
        for _ in 0..n {
            if fwd_open {
                fwd = self.next(fwd);
                let delta = sweep(t, self.angles[fwd]);
                if bound(delta) >= best || fwd == j0 {
                    fwd_open = false;
                } else {
                    best = best.min(self.sector_distance(fwd, p));
                }
            }
            if bwd_open {
                bwd = if bwd == 0 { n - 1 } else { bwd - 1 };
                let delta = sweep(self.angles[self.next(bwd)], t);
                if bound(delta) >= best || bwd == j0 {
                    bwd_open = false;
                } else {
                    best = best.min(self.sector_distance(bwd, p));
                }
            }
            if !fwd_open && !bwd_open {
                break;
            }
        }
        best
    }

    /// Distance from `p` to the region (0 inside).
    pub fn distance(&self, p: [f64; 2]) -> f64 {
        if self.contains(p, 0.0) {
            0.0
        } else {
            self.boundary_distance(p)
        }
    }

    /// Vertices plus `per_edge` evenly spaced interior points of every edge
    /// (or of both spokes of an open sector).
    pub fn boundary_samples(&self, per_edge: usize) -> Vec<[f64; 2]> {
        let n = self.verts.len();
        let mut out = Vec::with_capacity(n * (per_edge + 1));
        for j in 0..n {
            let a = self.verts[j];
            out.push(a);
            let b = self.verts[self.next(j)];
            let open = self.sector_width(j) >= OPEN_SECTOR;
            for s in 1..=per_edge {
                let t = s as f64 / (per_edge + 1) as f64;
                if open {
                    out.push([t * a[0], t * a[1]]);
                } else {
                    out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
                }
            }
        }
        out
    }
}

impl StarPolygon {
    /// Scaled copy `s·S` for `s > 0`.
    pub fn scaled(&self, s: f64) -> StarPolygon {
        StarPolygon {
            verts: self.verts.iter().map(|v| [s * v[0], s * v[1]]).collect(),
            angles: self.angles.clone(),
        }
    }

    /// Radial function at angle `t`: 0 inside an open sector except on its
    /// spokes.
    pub fn radial(&self, t: f64) -> f64 {
        if self.verts.is_empty() {
            return 0.0;
        }
        let j = self.sector(t);
        let a = self.verts[j];
        if self.angles[j] == t {
            return math::hypot(a[0], a[1]);
        }
        if self.sector_width(j) >= OPEN_SECTOR {
            return 0.0;
        }
        edge_radial(a, self.verts[self.next(j)], t)
    }

    /// Edge of the sector containing the open angular interval just after `t`.
    fn edge_after(&self, t: f64) -> Option<([f64; 2], [f64; 2])> {
        let j = self.sector(t);
        if self.sector_width(j) >= OPEN_SECTOR {
            None
        } else {
            Some((self.verts[j], self.verts[self.next(j)]))
        }
    }

    /// Removes vertices while every removed vertex stays within `tol` of the
    /// chord that replaces it, so the region moves by at most `tol`. The
    /// vertex of maximum norm is kept.
    pub fn simplified(&self, tol: f64) -> StarPolygon {
        const MAX_RUN: usize = 64;
        let n = self.verts.len();
        if n <= 8 {
            return self.clone();
        }
        let start = (0..n)
            .max_by(|&i, &j| {
                let (a, b) = (self.verts[i], self.verts[j]);
                math::hypot(a[0], a[1]).total_cmp(&math::hypot(b[0], b[1])).then(j.cmp(&i))
            })
            .unwrap_or(0);
        let at = |k: usize| self.verts[(start + k) % n];
        let ang = |k: usize| self.angles[(start + k) % n];
        let mut keep = vec![at(0)];
        let mut anchor = 0;
        while anchor < n {
            // furthest end e such that every vertex strictly between anchor
            // and e lies within tol of the chord
            let mut best = anchor + 1;
            let mut e = anchor + 2;
            while e <= n && e - anchor <= MAX_RUN {
                if sweep(ang(anchor), ang(e % n)) >= OPEN_SECTOR || (e == n && anchor == 0) {
                    break;
                }
                let (a, b) = (at(anchor), at(e % n));
                if (anchor + 1..e).all(|k| segment_distance(at(k), a, b) <= tol) {
                    best = e;
                }
                e += 1;
            }
            if best < n {
                keep.push(at(best));
            }
            anchor = best;
        }
        StarPolygon::from_points(keep)
    }

    /// Region `S_1 ∪ ... ∪ S_k`, exact: the boundary is the upper envelope
    /// of the radial functions, with vertices at every input vertex angle and
    /// at the edge crossings.
    pub fn union(parts: &[StarPolygon]) -> StarPolygon {
        let parts: Vec<&StarPolygon> = parts.iter().filter(|p| !p.is_empty()).collect();
        let mut angles: Vec<f64> = parts.iter().flat_map(|p| p.angles.iter().copied()).collect();
        angles.sort_by(f64::total_cmp);
        angles.dedup();
        let m = angles.len();
        let mut out: Vec<[f64; 2]> = Vec::with_capacity(m + m / 4);
        for k in 0..m {
            let t0 = angles[k];
            let width = if m == 1 {
                math::TAU
            } else {
                let w = sweep(t0, angles[(k + 1) % m]);
                if w == 0.0 {
                    math::TAU
                } else {
                    w
                }
            };
            let r0 = parts.iter().fold(0.0_f64, |r, p| r.max(p.radial(t0)));
            if r0 > 0.0 {
                out.push([r0 * math::cos(t0), r0 * math::sin(t0)]);
            }
            let edges: Vec<([f64; 2], [f64; 2])> = parts.iter().filter_map(|p| p.edge_after(t0)).collect();
            // a spoke sticking out of the envelope is a hair of zero width;
            // its base points keep the neighbouring edges from covering it
            if m > 1 {
                let before: Vec<([f64; 2], [f64; 2])> =
                    parts.iter().filter_map(|p| p.edge_after(angles[(k + m - 1) % m])).collect();
                for (side, list) in [(1.0, &edges), (-1.0, &before)] {
                    let base = list.iter().fold(0.0_f64, |r, e| r.max(edge_radial(e.0, e.1, t0)));
                    if base > 0.0 && r0 > base * (1.0 + 1e-12) {
                        let t = t0 + side * HAIR_WIDTH;
                        out.push([base * math::cos(t), base * math::sin(t)]);
                    }
                }
            }
            if edges.len() < 2 {
                continue;
            }
            // walk the upper envelope across the open interval, starting from
            // the edge on top just after t0
            let probe = t0 + 1e-9 * width;
            let mut cur = (0..edges.len())
                .max_by(|&i, &j| {
                    edge_radial(edges[i].0, edges[i].1, probe).total_cmp(&edge_radial(edges[j].0, edges[j].1, probe))
                })
                .unwrap_or(0);
            let mut from = 0.0;
            for _ in 0..edges.len() {
                let mut next: Option<(f64, usize, [f64; 2])> = None;
                for (j, e) in edges.iter().enumerate() {
                    if j == cur {
                        continue;
                    }
                    if let Some(q) = line_intersection(edges[cur], *e) {
                        let s = sweep(t0, math::atan2(q[1], q[0]));
                        let after = edge_radial(e.0, e.1, t0 + 0.5 * (s + width))
                            > edge_radial(edges[cur].0, edges[cur].1, t0 + 0.5 * (s + width));
                        if s > from && s < width && after && next.is_none_or(|n| s < n.0) {
                            next = Some((s, j, q));
                        }
                    }
                }
                match next {
                    Some((s, j, q)) => {
                        out.push(q);
                        cur = j;
                        from = s;
                    }
                    None => break,
                }
            }
        }
        StarPolygon::from_points(out)
    }
}

/// Radial function of the line through `a` and `b` at angle `t`.
fn edge_radial(a: [f64; 2], b: [f64; 2], t: f64) -> f64 {
    let u = [math::cos(t), math::sin(t)];
    let ab = a[0] * b[1] - a[1] * b[0];
    let den = u[0] * (b[1] - a[1]) - u[1] * (b[0] - a[0]);
    ab / den
}

fn line_intersection(p: ([f64; 2], [f64; 2]), q: ([f64; 2], [f64; 2])) -> Option<[f64; 2]> {
    let d1 = [p.1[0] - p.0[0], p.1[1] - p.0[1]];
    let d2 = [q.1[0] - q.0[0], q.1[1] - q.0[1]];
    let den = d1[0] * d2[1] - d1[1] * d2[0];
    if den == 0.0 {
        return None;
    }
    let w = [q.0[0] - p.0[0], q.0[1] - p.0[1]];
    let t = (w[0] * d2[1] - w[1] * d2[0]) / den;
    Some([p.0[0] + t * d1[0], p.0[1] + t * d1[1]])
}

/// Union of star polygons.
pub fn union_distance(parts: &[StarPolygon], p: [f64; 2]) -> f64 {
    let mut best = f64::INFINITY;
    for s in parts {
        if s.contains(p, 0.0) {
            return 0.0;
        }
        best = best.min(s.boundary_distance(p));
    }
    best
}

/// `sup_{x in A} d(x, B)` for unions of star polygons, evaluated on boundary
/// samples of `A`.
pub fn directed_region_distance(a: &[StarPolygon], b: &[StarPolygon], per_edge: usize) -> f64 {
    let mut worst = 0.0_f64;
    for s in a {
        for p in s.boundary_samples(per_edge) {
            worst = worst.max(union_distance(b, p));
        }
    }
    worst
}

/// Hausdorff distance between two unions of star polygons.
pub fn region_hausdorff(a: &[StarPolygon], b: &[StarPolygon], per_edge: usize) -> f64 {
    directed_region_distance(a, b, per_edge).max(directed_region_distance(b, a, per_edge))
}
