//! Compact and convex set machinery.
//!
//! Two dimensions is the exact path: polygons with monotone-chain hulls and
//! edge/vertex duality for polars. In three or more dimensions bodies are
//! hulls of point clouds and anything that needs a facet description is
//! evaluated through a fixed, deterministic set of support directions.

mod body;
mod hausdorff;
mod hull;

pub use body::{Body, BodyRepr, Polygon};
pub use hausdorff::{convex_hausdorff, directed_hausdorff, hausdorff_distance};
pub use hull::{convex_hull, monotone_chain};

use alloc::vec::Vec;

use crate::eigen;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::math;

/// Default number of support directions for hull clouds in n >= 3.
pub const DEFAULT_DIRECTIONS: usize = 1024;

/// Relative singular-value threshold for affine dimension.
pub const RANK_TOL: f64 = 1e-8;

/// A finite, nonempty cloud of points in R^n stored as flat coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: coords.len() % dim,
            });
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(PointSet { dim, coords })
    }

    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyPointSet)?;
        let dim = first.as_ref().len();
        let mut coords = Vec::with_capacity(dim * points.len());
        for p in points {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::new(dim, coords)
    }

    pub fn single(p: &[f64]) -> Result<Self> {
        Self::new(p.len(), p.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> core::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_vectors(&self) -> Vec<Vector> {
        self.iter().map(|p| Vector::new(p.to_vec())).collect()
    }

    pub fn max_norm(&self) -> f64 {
        self.iter().fold(0.0, |m, p| m.max(linalg::norm(p)))
    }

    /// Largest coordinate magnitude, used to scale tolerances.
    pub fn scale(&self) -> f64 {
        self.coords.iter().fold(0.0, |m, x| m.max(math::abs(*x)))
    }

    pub fn scaled(&self, s: f64) -> PointSet {
        PointSet {
            dim: self.dim,
            coords: self.coords.iter().map(|x| x * s).collect(),
        }
    }

    pub fn mapped(&self, m: &Matrix, translation: Option<&[f64]>) -> PointSet {
        let mut coords = alloc::vec![0.0; self.coords.len()];
        for (src, dst) in self.iter().zip(coords.chunks_exact_mut(self.dim)) {
            m.apply_into(src, dst);
            if let Some(t) = translation {
                for (d, a) in dst.iter_mut().zip(t) {
                    *d += a;
                }
            }
        }
        PointSet {
            dim: self.dim,
            coords,
        }
    }

    /// Union of point sets of equal dimension.
    pub fn union(parts: &[PointSet]) -> Result<PointSet> {
        let first = parts.first().ok_or(Error::EmptyPointSet)?;
        let mut coords = Vec::new();
        for p in parts {
            if p.dim != first.dim {
                return Err(Error::DimensionMismatch {
                    expected: first.dim,
                    found: p.dim,
                });
            }
            coords.extend_from_slice(&p.coords);
        }
        Ok(PointSet {
            dim: first.dim,
            coords,
        })
    }

    /// Snaps every coordinate to the grid `cell * Z^n` (ties to even) and
    /// drops duplicates. The output order is lexicographic, so it depends
    /// only on the set.
    pub fn snapped(&self, cell: f64) -> PointSet {
        let d = self.dim;
        let mut keys: Vec<Vec<i64>> = self
            .iter()
            .map(|p| p.iter().map(|x| math::round_even(x / cell) as i64).collect())
            .collect();
        keys.sort_unstable();
        keys.dedup();
        let mut coords = Vec::with_capacity(keys.len() * d);
        for k in keys {
            coords.extend(k.into_iter().map(|i| i as f64 * cell));
        }
        PointSet { dim: d, coords }
    }

    /// Exact duplicate removal with lexicographic ordering.
    pub fn deduplicated(&self) -> PointSet {
        let d = self.dim;
        let mut pts: Vec<&[f64]> = self.iter().collect();
        pts.sort_by(|a, b| {
            for (x, y) in a.iter().zip(b.iter()) {
                match x.total_cmp(y) {
                    core::cmp::Ordering::Equal => continue,
                    o => return o,
                }
            }
            core::cmp::Ordering::Equal
        });
        pts.dedup();
        let mut coords = Vec::with_capacity(pts.len() * d);
        for p in pts {
            coords.extend_from_slice(p);
        }
        PointSet { dim: d, coords }
    }

    /// Diameter of the cloud (computed on its hull in the plane).
    pub fn diameter(&self) -> f64 {
        if self.dim == 2 && self.len() > 64 {
            // rotating calipers over the hull
            let h = monotone_chain(self.iter().map(|p| [p[0], p[1]]).collect(), 0.0);
            let n = h.len();
            let d = |a: [f64; 2], b: [f64; 2]| math::hypot(a[0] - b[0], a[1] - b[1]);
            if n <= 2 {
                return if n == 2 { d(h[0], h[1]) } else { 0.0 };
            }
            let area = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| {
                math::abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
            };
            let mut best = 0.0_f64;
            let mut j = 1;
            for i in 0..n {
                let (a, b) = (h[i], h[(i + 1) % n]);
                while area(a, b, h[(j + 1) % n]) > area(a, b, h[j]) {
                    j = (j + 1) % n;
                }
                best = best.max(d(a, h[j])).max(d(b, h[j]));
            }
            return best;
        }
        let mut best = 0.0_f64;
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                best = best.max(linalg::distance(self.point(i), self.point(j)));
            }
        }
        best
    }
}

/// Dimension of the affine span, by singular values of the centred cloud.
pub fn affine_dimension(points: &PointSet) -> usize {
    let n = points.dim();
    let p0 = points.point(0);
    let rows = points.len() - 1;
    if rows == 0 {
        return 0;
    }
    let mut data = Vec::with_capacity(rows * n);
    for p in points.iter().skip(1) {
        data.extend(p.iter().zip(p0).map(|(a, b)| a - b));
    }
    let sv = eigen::singular_values(rows, n, &data);
    let scale = points.scale().max(sv.first().copied().unwrap_or(0.0));
    if scale == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * scale).count()
}

/// The centrally symmetric hull `conv(A ∪ -A)`.
pub fn symmetrize(points: &PointSet) -> Result<Body> {
    let mut coords = points.coords().to_vec();
    coords.extend(points.coords().iter().map(|x| -x));
    convex_hull(&PointSet::new(points.dim(), coords)?)
}

/// Deterministic unit directions: evenly spaced on the circle for n = 2, a
/// Fibonacci lattice on the sphere for n = 3, and seeded Gaussian samples
/// otherwise.
pub fn direction_set(dim: usize, count: usize) -> Vec<Vector> {
    let count = count.max(1);
    match dim {
        1 => alloc::vec![Vector::new(alloc::vec![1.0]), Vector::new(alloc::vec![-1.0])],
        2 => (0..count)
            .map(|k| {
                let t = math::TAU * k as f64 / count as f64;
                Vector::new(alloc::vec![math::cos(t), math::sin(t)])
            })
            .collect(),
        3 => {
            let golden = math::PI * (3.0 - math::sqrt(5.0));
            (0..count)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let r = math::sqrt((1.0 - z * z).max(0.0));
                    let t = golden * k as f64;
                    Vector::new(alloc::vec![r * math::cos(t), r * math::sin(t), z])
                })
                .collect()
        }
        _ => {
            let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
            let mut next = move || {
                state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
                let mut z = state;
                z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
                z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
                z ^= z >> 31;
                ((z >> 11) as f64 + 0.5) / (1u64 << 53) as f64
            };
            (0..count)
                .map(|_| {
                    let mut v: Vec<f64> = (0..dim)
                        .map(|_| {
                            let (u1, u2) = (next(), next());
                            math::sqrt(-2.0 * math::ln(u1)) * math::cos(math::TAU * u2)
                        })
                        .collect();
                    let nv = linalg::norm(&v);
                    v.iter_mut().for_each(|x| *x /= nv);
                    Vector::new(v)
                })
                .collect()
        }
    }
}
