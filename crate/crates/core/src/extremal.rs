//! Extremal bodies: `conv F(K) = ρK` and the Barabanov unit ball.
//!
//! A body `C` with `conv Fᵗ(C) = ρC` has a polar `K = C*` whose gauge
//! satisfies `max_i ||L_i x||_K = ρ ||x||_K` for every `x`, which is the
//! Barabanov property. The Barabanov body is therefore the polar of a DKP
//! body of the transposed system.

use alloc::vec::Vec;

use crate::eigenset::{self, EigenOptions};
use crate::error::{Error, Result};
use crate::geom::{convex_hausdorff, convex_hull, Body, PointSet};
use crate::ifs::IfsSystem;
use crate::jsr::JsrBracket;
use crate::linalg::Matrix;
use crate::star::StarPolygon;

pub const DKP_MAX_ITER: usize = 500;
pub const DKP_STALL: f64 = 1e-7;
pub const DKP_TOL: f64 = 1e-5;
pub const EXTREMALITY_TOL: f64 = 1e-4;
pub const ATTAINMENT_TOL: f64 = 1e-3;
pub const DEFAULT_SAMPLES: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtremalKind {
    Dkp,
    Barabanov,
}

impl ExtremalKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExtremalKind::Dkp => "dkp",
            ExtremalKind::Barabanov => "barabanov",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExtremalOptions {
    pub max_iter: usize,
    /// Hausdorff change between iterates at which the fixed-point iteration
    /// stops.
    pub stall_tol: f64,
    /// Vertex-dropping tolerance for planar iterates.
    pub simplify_tol: f64,
    pub eigen: EigenOptions,
}

impl Default for ExtremalOptions {
    fn default() -> Self {
        ExtremalOptions {
            max_iter: DKP_MAX_ITER,
            stall_tol: DKP_STALL,
            simplify_tol: 1e-8,
            eigen: EigenOptions::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExtremalBody {
    /// Centrally symmetric, maximum norm 1.
    pub body: Body,
    pub rho: f64,
    pub kind: ExtremalKind,
    /// `H(conv F_ρ(K), K) / diam K` for the body that was iterated (the
    /// pre-polar body for the Barabanov kind).
    pub residual: f64,
    pub iterations: usize,
}

/// Result of [`verify_extremal`].
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalReport {
    /// `max_x max_L ||Lx||_K / (ρ ||x||_K)` over boundary samples.
    pub extremality: f64,
    /// `min_x max_L ||Lx||_K / (ρ ||x||_K)` over boundary samples.
    pub attainment: f64,
    /// `H(conv F_ρ(K), K) / diam K`.
    pub dkp_residual: f64,
    pub samples: usize,
}

impl ExtremalReport {
    pub fn extremality_holds(&self) -> bool {
        self.extremality <= 1.0 + EXTREMALITY_TOL
    }

    pub fn attainment_holds(&self) -> bool {
        self.attainment >= 1.0 - ATTAINMENT_TOL
    }
}

/// Exact Hausdorff distance between planar convex bodies containing the
/// origin: the directed distances of convex sets peak at vertices.
fn polygon_hausdorff(a: &Body, b: &Body) -> Option<f64> {
    let (pa, pb) = (a.as_polygon()?, b.as_polygon()?);
    let sa = StarPolygon::from_points(pa.vertices().iter().copied());
    let sb = StarPolygon::from_points(pb.vertices().iter().copied());
    let d = |from: &[[f64; 2]], to: &StarPolygon| from.iter().fold(0.0_f64, |m, &v| m.max(to.distance(v)));
    Some(d(pa.vertices(), &sb).max(d(pb.vertices(), &sa)))
}

fn body_hausdorff(a: &Body, b: &Body) -> f64 {
    polygon_hausdorff(a, b).unwrap_or_else(|| convex_hausdorff(a, b))
}

/// `conv ∪ M_i(K)`.
fn hull_image(maps: &[Matrix], k: &Body) -> Result<Body> {
    let verts = k.vertex_set();
    let parts: Vec<PointSet> = maps.iter().map(|m| verts.mapped(m, None)).collect();
    convex_hull(&PointSet::union(&parts)?)
}

/// `H(conv F_ρ(K), K) / diam K`.
pub fn dkp_residual(f: &IfsSystem, k: &Body, rho: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::InvalidScale(rho));
    }
    let maps: Vec<Matrix> = f.matrices().iter().map(|m| m.scaled(1.0 / rho)).collect();
    let img = hull_image(&maps, k)?;
    Ok(body_hausdorff(&img, k) / k.diameter())
}

fn simplify(body: Body, tol: f64) -> Body {
    match body.as_polygon() {
        Some(p) => convex_hull(&PointSet::from_points(p.simplified(tol).vertices()).expect("nonempty"))
            .expect("planar hull"),
        None => body,
    }
}

/// Fixed point of `K <- conv F(K) / c`, where `c` keeps the maximum norm
/// at 1; `c` converges to the growth factor `ρ`. Planar iterates are
/// averaged with the previous body (Minkowski mean), which has the same
/// fixed points and damps rotation.
///
/// Stops once the change `H(conv F(K)/c, K)` is at most `stall_tol`. A
/// polygon cannot follow a curved fixed point below its chord error, so
/// when the change stops improving the best iterate is returned if its
/// relative residual is within [`DKP_TOL`].
fn dkp_iterate(f: &IfsSystem, start: Body, scale: f64, opts: &ExtremalOptions) -> Result<(Body, f64, usize)> {
    const PATIENCE: usize = 50;
    let maps: Vec<Matrix> = f.matrices().iter().map(|m| m.scaled(1.0 / scale)).collect();
    let planar = f.dim() == 2;
    let mut k = start.scaled(1.0 / start.max_norm());
    // (relative step, body, growth, iteration)
    let mut best: Option<(f64, Body, f64, usize)> = None;
    let mut it = 0;
    while it < opts.max_iter {
        it += 1;
        let img = hull_image(&maps, &k)?;
        let c = img.max_norm();
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::DegenerateBody);
        }
        let fixed = img.scaled(1.0 / c);
        let step = body_hausdorff(&fixed, &k);
        if step <= opts.stall_tol {
            return Ok((k, c * scale, it));
        }
        let rel = step / k.diameter();
        if best.as_ref().is_none_or(|b| rel < b.0) {
            best = Some((rel, k.clone(), c, it));
        } else if best.as_ref().is_some_and(|b| b.0 <= DKP_TOL && it - b.3 >= PATIENCE) {
            break;
        }
        let next = if planar {
            let mean = k.minkowski_sum(&fixed)?;
            simplify(mean.scaled(1.0 / mean.max_norm()), opts.simplify_tol)
        } else {
            fixed
        };
        if !next.is_full_dimensional() || !next.origin_interior() {
            return Err(Error::DegenerateBody);
        }
        k = next;
    }
    let (rel, body, c, _) = best.expect("at least one iteration");
    if rel <= DKP_TOL {
        Ok((body, c * scale, it))
    } else {
        Err(Error::NotConverged {
            iterations: it,
            residual: rel,
        })
    }
}

fn require_irreducible(f: &IfsSystem) -> Result<()> {
    if f.has_translation() {
        return Err(Error::InvalidParameters("extremal bodies need a linear system"));
    }
    if !f.is_irreducible()? {
        return Err(Error::ReducibleSystem);
    }
    Ok(())
}

fn working_scale(bracket: &JsrBracket) -> f64 {
    let mid = 0.5 * (bracket.lower + bracket.upper);
    if mid > 0.0 {
        mid
    } else {
        1.0
    }
}

// Invariant body at the top of the bracket, or the cross-polytope if the
// hull iteration does not close up.
fn start_body(f: &IfsSystem, bracket: &JsrBracket, opts: &ExtremalOptions) -> (Body, f64) {
    let scale = working_scale(bracket);
    let start = eigenset::invariant_body(f, bracket.upper.max(scale), opts.eigen.containment_tol)
        .unwrap_or_else(|_| Body::cross_polytope(f.dim()));
    (start, scale)
}

/// Centrally symmetric convex body with `conv F(K) = ρK`, grown from an
/// invariant body by damped hull iteration. `ρ` is the converged growth
/// factor, clamped into the bracket.
pub fn dkp_body(f: &IfsSystem, bracket: &JsrBracket, opts: &ExtremalOptions) -> Result<ExtremalBody> {
    require_irreducible(f)?;
    let (start, scale) = start_body(f, bracket, opts);
    let mut k = dkp_from(f, start, scale, opts)?;
    k.rho = k.rho.clamp(bracket.lower, bracket.upper);
    k.residual = dkp_residual(f, &k.body, k.rho)?;
    Ok(k)
}

/// DKP iteration from a chosen symmetric start body; `scale` is a rough
/// guess of `ρ` used to keep the iterates well conditioned.
pub fn dkp_from(f: &IfsSystem, start: Body, scale: f64, opts: &ExtremalOptions) -> Result<ExtremalBody> {
    if !(scale > 0.0) {
        return Err(Error::InvalidScale(scale));
    }
    let (body, rho, iterations) = dkp_iterate(f, start, scale, opts)?;
    let residual = dkp_residual(f, &body, rho)?;
    Ok(ExtremalBody {
        body,
        rho,
        kind: ExtremalKind::Dkp,
        residual,
        iterations,
    })
}

/// Unit ball of a Barabanov norm: the polar of a DKP body of the transposed
/// system.
pub fn barabanov_body(f: &IfsSystem, bracket: &JsrBracket, opts: &ExtremalOptions) -> Result<ExtremalBody> {
    require_irreducible(f)?;
    let ft = f.transpose();
    let (c0, scale) = start_body(&ft, bracket, opts);
    let (c, rho, iterations) = dkp_iterate(&ft, c0, scale, opts)?;
    let rho = rho.clamp(bracket.lower, bracket.upper);
    let residual = dkp_residual(&ft, &c, rho)?;
    let k = c.polar_dual()?;
    let k = k.scaled(1.0 / k.max_norm());
    Ok(ExtremalBody {
        body: k,
        rho,
        kind: ExtremalKind::Barabanov,
        residual,
        iterations,
    })
}

/// `||x||_B`, the gauge of the Barabanov body.
pub fn barabanov_norm(k: &ExtremalBody, x: &[f64]) -> Result<f64> {
    k.body.minkowski_functional(x)
}

/// Checks `F(K) ⊆ ρK` (extremality), `max_L ||Lx||_K = ρ||x||_K` on the
/// boundary (attainment) and the fixed-point residual of `conv F(K) = ρK`.
pub fn verify_extremal(f: &IfsSystem, k: &Body, rho: f64, samples: usize) -> Result<ExtremalReport> {
    if !(rho > 0.0) {
        return Err(Error::InvalidScale(rho));
    }
    let pts = k.boundary_samples(samples);
    let mut extremality = 0.0_f64;
    let mut attainment = f64::INFINITY;
    for x in pts.iter() {
        let nx = k.minkowski_functional(x)?;
        if nx == 0.0 {
            continue;
        }
        let mut best = 0.0_f64;
        for m in f.matrices() {
            best = best.max(k.minkowski_functional(&m.apply(x))? / (rho * nx));
        }
        extremality = extremality.max(best);
        attainment = attainment.min(best);
    }
    Ok(ExtremalReport {
        extremality,
        attainment,
        dkp_residual: dkp_residual(f, k, rho)?,
        samples: pts.len(),
    })
}
