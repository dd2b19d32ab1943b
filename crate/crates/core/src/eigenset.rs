//! Solving `F(X) = λX` for linear systems.
//!
//! The construction follows the nested intersection `S = ∩ F_λ^k(A)` from an
//! invariant convex body `A`. In the plane the iterates are kept as radial
//! profiles (eigensets are star-shaped about the origin), renormalized to
//! unit maximum radius after every step; the normalizing factor converges to
//! the eigenvalue.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geom::{
    affine_dimension, convex_hull, direction_set, directed_hausdorff, monotone_chain, Body, PointSet,
};
use crate::ifs::IfsSystem;
use crate::jsr::JsrBracket;
use crate::linalg::{self, Matrix};
use crate::math;
use crate::star::{directed_region_distance, region_hausdorff, StarPolygon};

pub const DEFAULT_RESOLUTION: f64 = 1.0 / 1024.0;
pub const DEFAULT_MAX_ITER: usize = 200;
pub const DEFAULT_PROBE_ITERS: usize = 200;
pub const CONTAINMENT_TOL: f64 = 1e-6;
/// Iteration cap for the invariant-body construction.
pub const INVARIANT_BODY_CAP: usize = 2000;
/// Norm beyond which the invariant-body iteration is declared unbounded.
pub const BLOWUP_NORM: f64 = 1e8;
/// Polygon standing in for the unit disk when no invariant body is found.
const DISK_SIDES: usize = 1024;

#[derive(Clone, Debug)]
pub struct EigenOptions {
    /// Grid resolution relative to the (unit) maximum radius.
    pub resolution: f64,
    pub max_iter: usize,
    pub probe_iters: usize,
    pub bisection_steps: usize,
    pub containment_tol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            resolution: DEFAULT_RESOLUTION,
            max_iter: DEFAULT_MAX_ITER,
            probe_iters: DEFAULT_PROBE_ITERS,
            bisection_steps: 40,
            containment_tol: CONTAINMENT_TOL,
        }
    }
}

impl EigenOptions {
    /// Hausdorff change between successive normalized iterates below which
    /// the iteration has converged.
    pub fn stall_tol(&self) -> f64 {
        0.5 * self.resolution
    }
}

/// How a point cloud stands for a compact set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetModel {
    /// The finite set itself.
    Points,
    /// The planar region, star-shaped about the origin, whose boundary
    /// passes through the points in angular order.
    StarRegion,
}

/// Residual and shape diagnostics of a candidate eigenset.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenReport {
    pub model: SetModel,
    pub lambda: f64,
    /// Hausdorff distance between `F_λ(X)` and `X`.
    pub residual: f64,
    /// `sup_{y in F_λ(X)} d(y, X)`.
    pub forward: f64,
    /// `sup_{x in X} d(x, F_λ(X))`.
    pub backward: f64,
    /// `sup_{x in X} d(-x, X)`.
    pub symmetry_defect: f64,
    /// `sup d(t x, X)` over `x in X`, `t in {1/4, 1/2, 3/4}`.
    pub star_defect: f64,
    pub affine_dimension: usize,
    pub diameter: f64,
}

impl EigenReport {
    pub fn full_dimensional(&self, n: usize) -> bool {
        self.affine_dimension == n
    }
}

/// Which body the nested iteration started from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StartBody {
    Invariant,
    UnitDisk,
}

#[derive(Clone, Debug)]
pub struct EigenSolution {
    /// Eigenvalue: the converged normalizing factor, kept inside the bracket.
    pub lambda: f64,
    /// Unclamped normalizing factor of the last step.
    pub growth: f64,
    /// Bracket midpoint refined by phase-transition bisection.
    pub lambda_probe: f64,
    /// Boundary vertices of the eigenset region, maximum norm 1.
    pub set: PointSet,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Last Hausdorff change between normalized iterates.
    pub last_step: f64,
    pub report: EigenReport,
    pub irreducible: bool,
    pub start: StartBody,
}

impl EigenSolution {
    /// The eigenset as a star region.
    pub fn region(&self) -> StarPolygon {
        StarPolygon::from_points(self.set.iter().map(|p| [p[0], p[1]]))
    }
}

fn scaled_matrices(f: &IfsSystem, lambda: f64) -> Vec<Matrix> {
    f.matrices().iter().map(|m| m.scaled(1.0 / lambda)).collect()
}

fn images(maps: &[Matrix], pts: &PointSet) -> PointSet {
    let parts: Vec<PointSet> = maps.iter().map(|m| pts.mapped(m, None)).collect();
    let mut all = pts.clone();
    for p in parts {
        all = PointSet::union(&[all, p]).expect("same dimension");
    }
    all
}

/// Centrally symmetric convex body `A` with `F_λ(A) ⊆ A`, scaled to maximum
/// norm 1.
///
/// Iterates `K <- conv(K ∪ F_λ(K))` from the cross-polytope until every
/// image of a vertex of `K` has `||f(v)||_K <= 1 + containment_tol`.
pub fn invariant_body(f: &IfsSystem, lambda: f64, containment_tol: f64) -> Result<Body> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidScale(lambda));
    }
    let maps = scaled_matrices(f, lambda);
    let accel = with_powers(&maps);
    if f.dim() == 2 {
        return planar_invariant_body(&maps, &accel, containment_tol);
    }
    let mut body = Body::cross_polytope(f.dim());
    for it in 0..INVARIANT_BODY_CAP {
        let verts = body.vertex_set();
        let mut worst = 0.0_f64;
        for m in &maps {
            for v in verts.iter() {
                let w = m.apply(v);
                worst = worst.max(body.minkowski_functional(&w)?);
            }
        }
        if worst <= 1.0 + containment_tol {
            let s = body.max_norm();
            return Ok(body.scaled(1.0 / s));
        }
        let grown = images(&accel, &verts);
        let max_norm = grown.max_norm();
        if !(max_norm <= BLOWUP_NORM) {
            return Err(Error::NoInvariantBody {
                iterations: it + 1,
                max_norm,
            });
        }
        body = convex_hull(&grown)?;
        if !body.is_full_dimensional() || !body.origin_interior() {
            return Err(Error::DegenerateBody);
        }
    }
    Err(Error::NoInvariantBody {
        iterations: INVARIANT_BODY_CAP,
        max_norm: body.max_norm(),
    })
}

/// The maps followed by their powers `M^2, M^4, ..., M^(2^POWER_STEPS)`.
/// Hulls grown with these reach long orbits of a single map in few steps
/// and have the same invariant hull, since the powers lie in the semigroup.
fn with_powers(maps: &[Matrix]) -> Vec<Matrix> {
    const POWER_STEPS: usize = 8;
    let mut out = maps.to_vec();
    for m in maps {
        let mut p = m.clone();
        for _ in 0..POWER_STEPS {
            p = p.mul(&p);
            out.push(p.clone());
        }
    }
    out
}

fn planar_invariant_body(maps: &[Matrix], accel: &[Matrix], containment_tol: f64) -> Result<Body> {
    let mut verts: Vec<[f64; 2]> = vec![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
    for it in 0..INVARIANT_BODY_CAP {
        let star = StarPolygon::from_points(verts.iter().copied());
        let mut grown = verts.clone();
        let mut worst = 0.0_f64;
        for (i, m) in accel.iter().enumerate() {
            for v in &verts {
                let w = m.apply(v);
                let w = [w[0], w[1]];
                if i < maps.len() {
                    worst = worst.max(star.gauge(w));
                }
                grown.push(w);
            }
        }
        if worst <= 1.0 + containment_tol {
            let body = Body::polygon(&verts)?;
            let s = body.max_norm();
            return Ok(body.scaled(1.0 / s));
        }
        let max_norm = grown.iter().fold(0.0_f64, |m, w| m.max(math::hypot(w[0], w[1])));
        if !(max_norm <= BLOWUP_NORM) {
            return Err(Error::NoInvariantBody {
                iterations: it + 1,
                max_norm,
            });
        }
        verts = monotone_chain(grown, 1e-12 * max_norm * max_norm);
    }
    Err(Error::NoInvariantBody {
        iterations: INVARIANT_BODY_CAP,
        max_norm: verts.iter().fold(0.0_f64, |m, w| m.max(math::hypot(w[0], w[1]))),
    })
}

/// Verdict of iterating `F_λ` on the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Collapses,
    Diverges,
    Neutral,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Collapses => "collapses",
            Phase::Diverges => "diverges",
            Phase::Neutral => "neutral",
        }
    }
}

/// Unit-sphere sample points used to start hull orbits.
pub(crate) fn sphere_samples(n: usize) -> PointSet {
    let mut coords = Vec::new();
    for d in direction_set(n, 64) {
        coords.extend_from_slice(&d);
    }
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[i] = s;
            coords.extend(e);
        }
    }
    PointSet::new(n, coords).expect("finite unit vectors")
}

/// Extreme points of `conv(pts)`, reusing the exact hull in the plane.
fn hull_points(pts: &PointSet) -> Result<PointSet> {
    match pts.dim() {
        2 => {
            let s = pts.scale();
            let h = monotone_chain(pts.iter().map(|p| [p[0], p[1]]).collect(), 1e-12 * s * s);
            PointSet::from_points(&h)
        }
        _ => Ok(convex_hull(pts)?.vertex_set()),
    }
}

/// Iterates `X <- conv(∪ M_i X)` (on extreme points), keeping the cloud
/// at unit maximum norm and the logarithm of the scale separately.
///
/// `observe(k, log_max_norm, cloud)` sees every iterate; returning `true`
/// stops the orbit.
pub(crate) fn hull_orbit(
    maps: &[Matrix],
    start: &PointSet,
    iters: usize,
    mut observe: impl FnMut(usize, f64, &PointSet) -> bool,
) -> Result<f64> {
    let mut cloud = hull_points(start)?;
    let mut log_scale = 0.0;
    for k in 1..=iters {
        let parts: Vec<PointSet> = maps.iter().map(|m| cloud.mapped(m, None)).collect();
        let next = hull_points(&PointSet::union(&parts)?)?;
        let mx = next.max_norm();
        if mx == 0.0 {
            observe(k, f64::NEG_INFINITY, &next);
            return Ok(f64::NEG_INFINITY);
        }
        log_scale += math::ln(mx);
        cloud = next.scaled(1.0 / mx);
        if cloud.len() > 4096 {
            cloud = cloud.snapped(1e-9);
        }
        if observe(k, log_scale, &cloud) {
            break;
        }
    }
    Ok(log_scale)
}

/// Classifies `λ` against the joint spectral radius by iterating `F_λ` on
/// unit-sphere samples: final maximum norm below 1/2 collapses, above 2
/// diverges, otherwise neutral.
pub fn phase_transition_probe(f: &IfsSystem, lambda: f64, probe_iters: usize) -> Result<Phase> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidScale(lambda));
    }
    let maps = scaled_matrices(f, lambda);
    let log_norm = hull_orbit(&maps, &sphere_samples(f.dim()), probe_iters, |_, _, _| false)?;
    Ok(if log_norm < math::ln(0.5) {
        Phase::Collapses
    } else if log_norm > math::ln(2.0) {
        Phase::Diverges
    } else {
        Phase::Neutral
    })
}

/// Bisection on probe outcomes inside the bracket, starting at its midpoint.
pub fn refine_lambda(f: &IfsSystem, bracket: &JsrBracket, probe_iters: usize, steps: usize) -> Result<f64> {
    let (mut lo, mut hi) = (bracket.lower, bracket.upper);
    let mut lambda = 0.5 * (lo + hi);
    if !(lambda > 0.0) {
        return Ok(lambda);
    }
    for _ in 0..steps {
        match phase_transition_probe(f, lambda, probe_iters)? {
            Phase::Collapses => hi = lambda,
            Phase::Diverges => lo = lambda,
            Phase::Neutral => break,
        }
        let next = 0.5 * (lo + hi);
        if next == lambda {
            break;
        }
        lambda = next;
    }
    Ok(lambda)
}

/// Eigenset of a planar linear system via the nested intersection.
pub fn eigenset(f: &IfsSystem, bracket: &JsrBracket, opts: &EigenOptions) -> Result<EigenSolution> {
    if f.dim() != 2 {
        return Err(Error::UnsupportedDimension(f.dim()));
    }
    if f.has_translation() {
        return Err(Error::InvalidParameters("eigenset construction needs a linear system"));
    }
    if !(opts.resolution > 0.0 && opts.resolution < 1.0) {
        return Err(Error::InvalidParameters("resolution must lie in (0, 1)"));
    }
    let irreducible = f.is_irreducible()?;
    let lambda_probe = refine_lambda(f, bracket, opts.probe_iters, opts.bisection_steps)?;
    let base = if lambda_probe > 0.0 { lambda_probe } else { 1.0 };
    let maps = scaled_matrices(f, base);

    // an invariant body exists for λ at the upper end of the bracket
    let (mut region, start) = match invariant_body(f, bracket.upper.max(base), opts.containment_tol) {
        Ok(a) => (
            StarPolygon::from_points(a.vertices().map(|v| [v[0], v[1]])),
            StartBody::Invariant,
        ),
        Err(_) => (
            StarPolygon::from_points(Body::regular_polygon(DISK_SIDES, 1.0).vertices().map(|v| [v[0], v[1]])),
            StartBody::UnitDisk,
        ),
    };
    let simplify_tol = 0.25 * opts.resolution;
    let mut growth = base;
    let mut last_step = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    for it in 1..=opts.max_iter {
        iterations = it;
        let parts: Vec<StarPolygon> = maps.iter().map(|m| region.mapped(m, 1.0)).collect();
        let img = StarPolygon::union(&parts);
        let c = img.max_norm();
        if !c.is_finite() {
            return Err(Error::EigensetDiverged { iterations: it });
        }
        if c <= 1e-300 {
            return Err(Error::EigensetCollapsed { iterations: it });
        }
        let next = img.scaled(1.0 / c).simplified(simplify_tol);
        last_step = region_hausdorff(core::slice::from_ref(&next), &[region], 1);
        region = next;
        growth = c * base;
        if last_step <= opts.stall_tol() {
            converged = true;
            break;
        }
    }
    let lambda = growth.clamp(bracket.lower, bracket.upper.max(bracket.lower));
    if region.is_empty() {
        return Err(Error::EigensetCollapsed { iterations });
    }
    let set = PointSet::from_points(region.vertices())?;
    let report = verify_eigen(f, lambda, &set, SetModel::StarRegion)?;
    Ok(EigenSolution {
        lambda,
        growth,
        lambda_probe,
        residual: report.residual,
        set,
        iterations,
        converged,
        last_step,
        report,
        irreducible,
        start,
    })
}

/// Residual of `F(X) = λX` (measured as the Hausdorff distance between
/// `F_λ(X)` and `X`) together with symmetry, star-shape and dimension
/// diagnostics.
pub fn verify_eigen(f: &IfsSystem, lambda: f64, x: &PointSet, model: SetModel) -> Result<EigenReport> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidScale(lambda));
    }
    if x.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: x.dim(),
        });
    }
    let ts = [0.25, 0.5, 0.75];
    let (forward, backward, symmetry_defect, star_defect) = match model {
        SetModel::Points => {
            let img = f.scale(lambda)?.image(x)?;
            let neg = x.scaled(-1.0);
            let star = ts
                .iter()
                .map(|&t| directed_hausdorff(&x.scaled(t), x))
                .fold(0.0, f64::max);
            (
                directed_hausdorff(&img, x),
                directed_hausdorff(x, &img),
                directed_hausdorff(&neg, x),
                star,
            )
        }
        SetModel::StarRegion => {
            if f.dim() != 2 || f.has_translation() {
                return Err(Error::InvalidParameters("star regions need a planar linear system"));
            }
            let s = StarPolygon::from_points(x.iter().map(|p| [p[0], p[1]]));
            let parts: Vec<StarPolygon> = f.matrices().iter().map(|m| s.mapped(m, 1.0 / lambda)).collect();
            let own = [s.clone()];
            let mut sym = 0.0_f64;
            let mut star = 0.0_f64;
            for v in s.vertices() {
                sym = sym.max(s.distance([-v[0], -v[1]]));
                for t in ts {
                    star = star.max(s.distance([t * v[0], t * v[1]]));
                }
            }
            (
                directed_region_distance(&parts, &own, 1),
                directed_region_distance(&own, &parts, 1),
                sym,
                star,
            )
        }
    };
    Ok(EigenReport {
        model,
        lambda,
        residual: forward.max(backward),
        forward,
        backward,
        symmetry_defect,
        star_defect,
        affine_dimension: affine_dimension(x),
        diameter: x.diameter(),
    })
}

/// The point family `S(r1, r2)` truncated at `k <= k_max`:
/// `(±r1, ±r2/2^k)`, `(±r1, ∓r2/2^k)`, `(±r2/2^k, ±r1)`, `(±r2/2^k, ∓r1)`,
/// followed by the accumulation points `(±r1, 0)`, `(0, ±r1)`.
pub fn decomposable_family(r1: f64, r2: f64, k_max: usize) -> Result<PointSet> {
    if !(r2 > 0.0) || !(r1 >= r2) || !r1.is_finite() {
        return Err(Error::InvalidParameters("need r1 >= r2 > 0"));
    }
    let mut pts: Vec<[f64; 2]> = Vec::with_capacity(8 * (k_max + 1) + 4);
    for k in 0..=k_max {
        let s = r2 / math::powf(2.0, k as f64);
        pts.extend_from_slice(&[[r1, s], [-r1, -s], [r1, -s], [-r1, s]]);
        pts.extend_from_slice(&[[s, r1], [-s, -r1], [s, -r1], [-s, r1]]);
    }
    pts.extend_from_slice(&[[r1, 0.0], [-r1, 0.0], [0.0, r1], [0.0, -r1]]);
    PointSet::from_points(&pts)
}

/// Upper bound on `||L||` over the maps, used to scale tolerances.
pub fn max_map_norm(f: &IfsSystem) -> Result<f64> {
    let mut r = 0.0_f64;
    for m in f.matrices() {
        r = r.max(linalg::euclidean_operator_norm(&m)?);
    }
    Ok(r)
}
