use alloc::vec::Vec;

use super::hull::{convex_hull, monotone_chain};
use super::{direction_set, PointSet, DEFAULT_DIRECTIONS};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::math;

/// Convex polygon with vertices counter-clockwise and no collinear vertices.
///
/// When the origin is interior, each edge `e` also carries the vector `a_e`
/// with `<a_e, y> = 1` on its supporting line, so `<a_e, y> <= 1` describes
/// the polygon and the Minkowski functional is `max_e <a_e, x>`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    vertices: Vec<[f64; 2]>,
    facets: Vec<[f64; 2]>,
    origin_interior: bool,
}

impl Polygon {
    pub(crate) fn from_ccw(vertices: Vec<[f64; 2]>) -> Polygon {
        let scale = vertices
            .iter()
            .fold(0.0_f64, |m, v| m.max(math::abs(v[0])).max(math::abs(v[1])));
        let mut facets = Vec::new();
        let mut origin_interior = vertices.len() >= 3;
        if origin_interior {
            for i in 0..vertices.len() {
                let a = vertices[i];
                let b = vertices[(i + 1) % vertices.len()];
                let normal = [b[1] - a[1], a[0] - b[0]];
                let offset = normal[0] * a[0] + normal[1] * a[1];
                let len = math::hypot(normal[0], normal[1]);
                if offset <= 1e-12 * scale * len {
                    origin_interior = false;
                    facets.clear();
                    break;
                }
                facets.push([normal[0] / offset, normal[1] / offset]);
            }
        }
        Polygon {
            vertices,
            facets,
            origin_interior,
        }
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    /// Facet vectors `a_e` (empty unless the origin is interior).
    pub fn facets(&self) -> &[[f64; 2]] {
        &self.facets
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        let mut s = 0.0;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            s += a[0] * b[1] - a[1] * b[0];
        }
        0.5 * s
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.vertices.len();
        if n < 2 {
            return 0.0;
        }
        (0..n)
            .map(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % n];
                math::hypot(b[0] - a[0], b[1] - a[1])
            })
            .sum()
    }

    /// Drops vertices lying within `tol` of the chord joining their
    /// neighbours. The result is inscribed in the original polygon.
    pub fn simplified(&self, tol: f64) -> Polygon {
        if self.vertices.len() <= 8 {
            return self.clone();
        }
        let mut out: Vec<[f64; 2]> = Vec::with_capacity(self.vertices.len());
        let n = self.vertices.len();
        for i in 0..n {
            let prev = *out.last().unwrap_or(&self.vertices[n - 1]);
            let cur = self.vertices[i];
            let next = self.vertices[(i + 1) % n];
            let chord = math::hypot(next[0] - prev[0], next[1] - prev[1]);
            let h = if chord > 0.0 {
                super::hull::cross(prev, next, cur).abs() / chord
            } else {
                f64::INFINITY
            };
            if h > tol {
                out.push(cur);
            }
        }
        if out.len() < 3 {
            return self.clone();
        }
        Polygon::from_ccw(monotone_chain(out, 0.0))
    }
}

/// Vertices of the sum of two ccw convex polygons by merging their edge
/// sequences in angular order.
fn polygon_sum(p: &[[f64; 2]], q: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let shift = |v: &[[f64; 2]], t: [f64; 2]| v.iter().map(|a| [a[0] + t[0], a[1] + t[1]]).collect();
    match (p.len(), q.len()) {
        (0, _) | (_, 0) => return Vec::new(),
        (1, _) => return shift(q, p[0]),
        (_, 1) => return shift(p, q[0]),
        _ => {}
    }
    let lowest = |v: &[[f64; 2]]| {
        (0..v.len())
            .min_by(|&i, &j| v[i][1].total_cmp(&v[j][1]).then(v[i][0].total_cmp(&v[j][0])))
            .unwrap_or(0)
    };
    let (pi, qi) = (lowest(p), lowest(q));
    let (n, m) = (p.len(), q.len());
    let pv = |k: usize| p[(pi + k) % n];
    let qv = |k: usize| q[(qi + k) % m];
    let mut out = Vec::with_capacity(n + m);
    let (mut i, mut j) = (0, 0);
    while i < n || j < m {
        let (a, b) = (pv(i), qv(j));
        out.push([a[0] + b[0], a[1] + b[1]]);
        let e1 = [pv(i + 1)[0] - a[0], pv(i + 1)[1] - a[1]];
        let e2 = [qv(j + 1)[0] - b[0], qv(j + 1)[1] - b[1]];
        let c = e1[0] * e2[1] - e1[1] * e2[0];
        if j >= m || (i < n && c > 0.0) {
            i += 1;
        } else if i >= n || c < 0.0 {
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    out
}

/// Hull of a point cloud, used for n != 2.
#[derive(Clone, Debug, PartialEq)]
pub struct HullCloud {
    points: PointSet,
    // d / h(d) for support directions d; the polar body is approximately
    // their hull.
    dual: Vec<Vector>,
    full: bool,
    origin_interior: bool,
}

impl HullCloud {
    pub(crate) fn new(points: PointSet) -> HullCloud {
        let n = points.dim();
        let (full, origin_interior, dual) = if n == 1 {
            let lo = points.iter().fold(f64::INFINITY, |m, p| m.min(p[0]));
            let hi = points.iter().fold(f64::NEG_INFINITY, |m, p| m.max(p[0]));
            (hi > lo, lo < 0.0 && hi > 0.0, Vec::new())
        } else {
            let mut dual = Vec::new();
            let mut interior = true;
            for d in direction_set(n, DEFAULT_DIRECTIONS) {
                let h = points.iter().fold(f64::NEG_INFINITY, |m, p| m.max(linalg::dot(p, &d)));
                if h <= 1e-12 * points.scale() {
                    interior = false;
                    break;
                }
                dual.push(d.scaled(1.0 / h));
            }
            if !interior {
                dual.clear();
            }
            (true, interior, dual)
        };
        HullCloud {
            points,
            dual,
            full,
            origin_interior,
        }
    }

    pub(crate) fn mark_degenerate(&mut self) {
        self.full = false;
        self.origin_interior = false;
        self.dual.clear();
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BodyRepr {
    Polygon(Polygon),
    HullCloud(HullCloud),
}

/// A compact convex set, usually centrally symmetric with the origin inside.
#[derive(Clone, Debug, PartialEq)]
pub struct Body {
    dim: usize,
    repr: BodyRepr,
    symmetric: bool,
}

impl Body {
    pub(crate) fn from_polygon(p: Polygon) -> Body {
        let mut b = Body {
            dim: 2,
            repr: BodyRepr::Polygon(p),
            symmetric: false,
        };
        b.symmetric = b.check_symmetry(1e-10);
        b
    }

    pub(crate) fn from_cloud(c: HullCloud) -> Body {
        let mut b = Body {
            dim: c.points.dim(),
            repr: BodyRepr::HullCloud(c),
            symmetric: false,
        };
        b.symmetric = b.check_symmetry(1e-10);
        b
    }

    /// Hull of the given planar points.
    pub fn polygon(vertices: &[[f64; 2]]) -> Result<Body> {
        convex_hull(&PointSet::from_points(vertices)?)
    }

    /// The square `[-r, r]^2`.
    pub fn square(r: f64) -> Body {
        Body::from_polygon(Polygon::from_ccw(alloc::vec![[-r, -r], [r, -r], [r, r], [-r, r]]))
    }

    /// Regular polygon inscribed in the circle of radius `r`, one vertex on
    /// the positive x axis.
    pub fn regular_polygon(sides: usize, r: f64) -> Body {
        let v = (0..sides)
            .map(|k| {
                let t = math::TAU * k as f64 / sides as f64;
                [r * math::cos(t), r * math::sin(t)]
            })
            .collect::<Vec<_>>();
        Body::from_polygon(Polygon::from_ccw(monotone_chain(v, 0.0)))
    }

    /// `conv{±e_1, ..., ±e_n}`.
    pub fn cross_polytope(n: usize) -> Body {
        let mut coords = Vec::with_capacity(2 * n * n);
        for i in 0..n {
            for s in [1.0, -1.0] {
                let mut v = alloc::vec![0.0; n];
                v[i] = s;
                coords.extend(v);
            }
        }
        convex_hull(&PointSet::new(n, coords).expect("nonempty")).expect("hull")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn repr(&self) -> &BodyRepr {
        &self.repr
    }

    pub fn as_polygon(&self) -> Option<&Polygon> {
        match &self.repr {
            BodyRepr::Polygon(p) => Some(p),
            BodyRepr::HullCloud(_) => None,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn is_full_dimensional(&self) -> bool {
        match &self.repr {
            BodyRepr::Polygon(p) => p.vertices.len() >= 3,
            BodyRepr::HullCloud(c) => c.full,
        }
    }

    pub fn origin_interior(&self) -> bool {
        match &self.repr {
            BodyRepr::Polygon(p) => p.origin_interior,
            BodyRepr::HullCloud(c) => c.origin_interior,
        }
    }

    pub fn vertices(&self) -> alloc::boxed::Box<dyn Iterator<Item = &[f64]> + '_> {
        match &self.repr {
            BodyRepr::Polygon(p) => alloc::boxed::Box::new(p.vertices.iter().map(|v| &v[..])),
            BodyRepr::HullCloud(c) => alloc::boxed::Box::new(c.points.iter()),
        }
    }

    pub fn vertex_set(&self) -> PointSet {
        let coords: Vec<f64> = self.vertices().flat_map(|v| v.iter().copied()).collect();
        PointSet::new(self.dim, coords).expect("bodies are nonempty")
    }

    fn check_symmetry(&self, rel_tol: f64) -> bool {
        let scale = self.vertices().fold(0.0_f64, |m, v| m.max(linalg::norm(v)));
        let tol = rel_tol * scale.max(f64::MIN_POSITIVE);
        if let BodyRepr::Polygon(p) = &self.repr {
            // the reflection of a convex polygon keeps the ccw order, shifted
            // by half the vertex count
            let v = &p.vertices;
            let n = v.len();
            return n % 2 == 0
                && (0..n / 2).all(|i| {
                    let w = v[i + n / 2];
                    math::hypot(v[i][0] + w[0], v[i][1] + w[1]) <= tol
                });
        }
        let verts: Vec<&[f64]> = self.vertices().collect();
        verts.iter().all(|v| {
            verts.iter().any(|w| {
                v.iter().zip(w.iter()).map(|(a, b)| (a + b) * (a + b)).sum::<f64>() <= tol * tol
            })
        })
    }

    /// `inf { mu >= 0 : x in mu C }`.
    pub fn minkowski_functional(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        if !self.is_full_dimensional() {
            return Err(Error::DegenerateBody);
        }
        if !self.origin_interior() {
            return Err(Error::OriginNotInterior);
        }
        Ok(match &self.repr {
            BodyRepr::Polygon(p) => p
                .facets
                .iter()
                .fold(0.0_f64, |m, a| m.max(a[0] * x[0] + a[1] * x[1])),
            BodyRepr::HullCloud(c) if self.dim == 1 => {
                let lo = c.points.iter().fold(f64::INFINITY, |m, p| m.min(p[0]));
                let hi = c.points.iter().fold(f64::NEG_INFINITY, |m, p| m.max(p[0]));
                if x[0] >= 0.0 {
                    x[0] / hi
                } else {
                    x[0] / lo
                }
            }
            BodyRepr::HullCloud(c) => c.dual.iter().fold(0.0_f64, |m, a| m.max(linalg::dot(a, x))),
        })
    }

    /// Support function `max_{y in C} <y, d>`.
    pub fn support(&self, d: &[f64]) -> f64 {
        self.vertices().fold(f64::NEG_INFINITY, |m, v| m.max(linalg::dot(v, d)))
    }

    /// Membership with a relative slack, by half-planes in the plane and by
    /// the Minkowski functional otherwise.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        match &self.repr {
            BodyRepr::Polygon(p) if p.vertices.len() >= 3 => {
                let n = p.vertices.len();
                let scale = self.max_norm().max(linalg::norm(x));
                (0..n).all(|i| {
                    let a = p.vertices[i];
                    let b = p.vertices[(i + 1) % n];
                    let len = math::hypot(b[0] - a[0], b[1] - a[1]);
                    super::hull::cross(a, b, [x[0], x[1]]) >= -tol * len * scale.max(1e-300)
                })
            }
            _ => self
                .minkowski_functional(x)
                .map(|m| m <= 1.0 + tol)
                .unwrap_or(false),
        }
    }

    pub fn max_norm(&self) -> f64 {
        self.vertices().fold(0.0, |m, v| m.max(linalg::norm(v)))
    }

    pub fn diameter(&self) -> f64 {
        self.vertex_set().diameter()
    }

    pub fn scaled(&self, s: f64) -> Body {
        convex_hull(&self.vertex_set().scaled(s)).expect("nonempty")
    }

    /// Hull of the vertex images, `conv L(C)`.
    pub fn linear_image(&self, m: &Matrix) -> Body {
        convex_hull(&self.vertex_set().mapped(m, None)).expect("nonempty")
    }

    /// `{z : <y, z> <= 1 for all y in C}`.
    pub fn polar_dual(&self) -> Result<Body> {
        if !self.is_full_dimensional() {
            return Err(Error::DegenerateBody);
        }
        if !self.origin_interior() {
            return Err(Error::OriginNotInterior);
        }
        match &self.repr {
            BodyRepr::Polygon(p) => Body::polygon(&p.facets),
            BodyRepr::HullCloud(c) if self.dim == 1 => {
                let lo = c.points.iter().fold(f64::INFINITY, |m, p| m.min(p[0]));
                let hi = c.points.iter().fold(f64::NEG_INFINITY, |m, p| m.max(p[0]));
                convex_hull(&PointSet::new(1, alloc::vec![1.0 / lo, 1.0 / hi])?)
            }
            BodyRepr::HullCloud(c) => convex_hull(&PointSet::from_points(&c.dual)?),
        }
    }

    /// `A + B = {a + b}`, the hull of pairwise vertex sums.
    pub fn minkowski_sum(&self, other: &Body) -> Result<Body> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if let (Some(p), Some(q)) = (self.as_polygon(), other.as_polygon()) {
            let sum = polygon_sum(&p.vertices, &q.vertices);
            return Ok(Body::from_polygon(Polygon::from_ccw(monotone_chain(sum, 0.0))));
        }
        let mut coords = Vec::new();
        for a in self.vertices() {
            for b in other.vertices() {
                coords.extend(a.iter().zip(b.iter()).map(|(x, y)| x + y));
            }
        }
        convex_hull(&PointSet::new(self.dim, coords)?)
    }

    /// Boundary samples: every vertex plus points spaced evenly by arc
    /// length along the edges (planar case), `count` in total at least.
    /// Hull clouds return their extreme points.
    pub fn boundary_samples(&self, count: usize) -> PointSet {
        match &self.repr {
            BodyRepr::Polygon(p) if p.vertices.len() >= 2 => {
                let n = p.vertices.len();
                let per = p.perimeter();
                let extra = count.saturating_sub(n);
                let mut pts = Vec::with_capacity(n + extra + n);
                for i in 0..n {
                    let a = p.vertices[i];
                    let b = p.vertices[(i + 1) % n];
                    pts.push(a);
                    let len = math::hypot(b[0] - a[0], b[1] - a[1]);
                    let k = if per > 0.0 {
                        math::round(extra as f64 * len / per) as usize
                    } else {
                        0
                    };
                    for j in 1..=k {
                        let t = j as f64 / (k + 1) as f64;
                        pts.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
                    }
                }
                PointSet::from_points(&pts).expect("nonempty")
            }
            _ => self.vertex_set(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn same_vertex_sets(a: &Body, b: &Body, tol: f64) -> bool {
        let va: Vec<&[f64]> = a.vertices().collect();
        let vb: Vec<&[f64]> = b.vertices().collect();
        va.len() == vb.len()
            && va
                .iter()
                .all(|v| vb.iter().any(|w| linalg::distance(v, w) <= tol))
    }

    #[test]
    fn minkowski_functional_square() {
        let sq = Body::square(1.0);
        assert_eq!(sq.minkowski_functional(&[2.0, 0.0]).unwrap(), 2.0);
        assert_eq!(sq.minkowski_functional(&[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(sq.minkowski_functional(&[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn minkowski_functional_disk_polygon() {
        // inscribed 256-gon: the functional exceeds the Euclidean norm by at
        // most 1/cos(pi/256) - 1 ≈ 7.5e-5
        let disk = Body::regular_polygon(256, 1.0);
        let m = disk.minkowski_functional(&[0.6, 0.8]).unwrap();
        assert!((m - 1.0).abs() <= 3e-4, "{m}");
        assert!(m >= 1.0);
    }

    #[test]
    fn degenerate_errors() {
        let seg = Body::polygon(&[[1.0, 0.0], [-1.0, 0.0]]).unwrap();
        assert_eq!(seg.minkowski_functional(&[0.1, 0.0]), Err(Error::DegenerateBody));
        let off = Body::polygon(&[[1.0, 1.0], [2.0, 1.0], [1.0, 2.0]]).unwrap();
        assert_eq!(off.minkowski_functional(&[1.0, 1.0]), Err(Error::OriginNotInterior));
        assert_eq!(off.polar_dual(), Err(Error::OriginNotInterior));
    }

    #[test]
    fn polar_of_square_is_cross_polytope() {
        let dual = Body::square(1.0).polar_dual().unwrap();
        assert!(same_vertex_sets(&dual, &Body::cross_polytope(2), 1e-15));
        let back = dual.polar_dual().unwrap();
        assert!(same_vertex_sets(&back, &Body::square(1.0), 1e-15));
    }

    #[test]
    fn polar_of_disk_radius() {
        let r = 2.5;
        let dual = Body::regular_polygon(512, r).polar_dual().unwrap();
        // the polar of an inscribed polygon is circumscribed about radius 1/r
        let mx = dual.max_norm();
        assert!(mx >= 1.0 / r && mx <= (1.0 / r) / math::cos(math::PI / 512.0) + 1e-12);
    }

    #[test]
    fn polygon_sum_matches_pairwise_hull() {
        let a = Body::regular_polygon(7, 1.0);
        let b = Body::regular_polygon(5, 0.4).linear_image(&Matrix::from_rows(&[[1.0, 0.3], [0.0, 2.0]]).unwrap());
        let fast = a.minkowski_sum(&b).unwrap();
        let mut coords = Vec::new();
        for x in a.vertices() {
            for y in b.vertices() {
                coords.extend([x[0] + y[0], x[1] + y[1]]);
            }
        }
        let slow = convex_hull(&PointSet::new(2, coords).unwrap()).unwrap();
        assert!(same_vertex_sets(&fast, &slow, 1e-12));
    }

    #[test]
    fn minkowski_sums() {
        let sq = Body::square(1.0);
        let origin = Body::polygon(&[[0.0, 0.0]]).unwrap();
        assert!(same_vertex_sets(&sq.minkowski_sum(&origin).unwrap(), &sq, 0.0));
        assert!(same_vertex_sets(&sq.minkowski_sum(&sq).unwrap(), &Body::square(2.0), 0.0));
        let e1 = Body::polygon(&[[-1.0, 0.0], [1.0, 0.0]]).unwrap();
        let e2 = Body::polygon(&[[0.0, -1.0], [0.0, 1.0]]).unwrap();
        assert!(same_vertex_sets(&e1.minkowski_sum(&e2).unwrap(), &sq, 0.0));
    }

    #[test]
    fn one_dimensional_bodies() {
        let seg = convex_hull(&PointSet::new(1, alloc::vec![-2.0, 0.5, 4.0]).unwrap()).unwrap();
        assert_eq!(seg.minkowski_functional(&[2.0]).unwrap(), 0.5);
        assert_eq!(seg.minkowski_functional(&[-1.0]).unwrap(), 0.5);
        let dual = seg.polar_dual().unwrap();
        assert_eq!(dual.minkowski_functional(&[0.25]).unwrap(), 1.0);
    }

    #[test]
    fn samples_cover_edges() {
        let s = Body::square(1.0).boundary_samples(64);
        assert!(s.len() >= 64);
        for p in s.iter() {
            assert!((Body::square(1.0).minkowski_functional(p).unwrap() - 1.0).abs() < 1e-15);
        }
    }
}
