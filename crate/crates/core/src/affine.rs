//! Attractors of contractive affine systems and the affine eigenvalue
//! problem.
//!
//! For an affine `F` with a nonzero translation, `λ > ρ(F)` is always an
//! eigenvalue (the attractor of `F_λ` solves `F(X) = λX`) and `λ < ρ(F)`
//! never is. At `λ = ρ(F)` both outcomes occur, so queries inside the JSR
//! bracket are answered only when a left-eigenvector certificate rules the
//! eigenset out.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::eigen::symmetric_eigen;
use crate::eigenset::{hull_orbit, verify_eigen, EigenReport, SetModel};
use crate::error::{Error, Result};
use crate::geom::{hausdorff_distance, PointSet};
use crate::ifs::IfsSystem;
use crate::jsr::{jsr_affine, JsrBracket, JsrOptions};
use crate::linalg::{self, Matrix, Vector};
use crate::math;

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 10_000;
/// Diameter below which the orbit of the unit box counts as collapsed.
pub const COLLAPSE_TOL: f64 = 1e-6;
pub const PROBE_MAX_ITER: usize = 5_000;
/// Attractor tolerance inside [`contractivity_probe`].
pub const PROBE_TOL: f64 = 1.0 / 1024.0;
const CERTIFICATE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct AttractorResult {
    pub set: PointSet,
    pub iterations: usize,
    /// `H(F(A), A)`, at most `5·tol·max(diam A, 1)` after convergence.
    pub residual: f64,
    pub basin_note: String,
}

/// Largest power of two not above `tol / 2`. Dyadic cells keep snapping
/// exact and make dyadic fixed points reachable.
pub fn snap_cell(tol: f64) -> f64 {
    let e = math::floor(math::ln(tol / 2.0) / core::f64::consts::LN_2);
    let mut cell = math::powf(2.0, e);
    while cell > tol / 2.0 {
        cell *= 0.5;
    }
    cell
}

/// Deterministic iteration `X <- snap(F(X))` from `seed` until successive
/// iterates are within `tol` in the Hausdorff metric and the gap has
/// stopped shrinking (a dyadic fixed point is reached exactly).
///
/// Requires the JSR bracket of the linear parts to lie below 1, which makes
/// `F` contractive in some norm with basin all of `ℝⁿ`.
pub fn attractor(f: &IfsSystem, seed: &PointSet, tol: f64, max_iter: usize) -> Result<AttractorResult> {
    let bracket = jsr_affine(f, &JsrOptions::default())?;
    attractor_with_bracket(f, seed, tol, max_iter, &bracket)
}

fn attractor_with_bracket(
    f: &IfsSystem,
    seed: &PointSet,
    tol: f64,
    max_iter: usize,
    bracket: &JsrBracket,
) -> Result<AttractorResult> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidParameters("tolerance must be positive"));
    }
    if seed.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if seed.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: seed.dim(),
        });
    }
    if !(bracket.upper < 1.0) {
        return Err(Error::NotContractive { upper: bracket.upper });
    }
    let cell = snap_cell(tol);
    let basin_note = format!(
        "joint spectral radius below {:.6} < 1: every compact seed converges to this set",
        bracket.upper
    );
    let mut x = seed.snapped(cell);
    let mut gap = f64::INFINITY;
    // grid orbits are eventually periodic; remember where each iterate was seen
    let mut seen: BTreeMap<u64, usize> = BTreeMap::new();
    for it in 1..=max_iter {
        let next = f.image(&x)?.snapped(cell);
        let prev = gap;
        gap = hausdorff_distance(&next, &x);
        x = next;
        // within tolerance, keep going while the grid orbit still settles
        if gap == 0.0 || (gap <= tol && gap >= prev) {
            let residual = hausdorff_distance(&f.image(&x)?, &x);
            return Ok(AttractorResult {
                iterations: it,
                residual,
                basin_note,
                set: x,
            });
        }
        if let Some(&j) = seen.get(&digest(&x)) {
            if let Some((set, steps)) = grid_cycle(f, &x, it - j, cell)? {
                let residual = hausdorff_distance(&f.image(&set)?, &set);
                return Ok(AttractorResult {
                    iterations: it + steps,
                    residual,
                    basin_note,
                    set,
                });
            }
        }
        seen.insert(digest(&x), it);
    }
    Err(Error::NotConverged {
        iterations: max_iter,
        residual: gap,
    })
}

/// FNV-1a over the coordinate bits of a snapped (canonically ordered) set.
fn digest(x: &PointSet) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for c in x.coords() {
        for b in c.to_bits().to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

/// If the grid orbit of `x` returns to `x` after `period` steps, the union
/// of the sets along the cycle; `F` maps it onto itself up to one snapping
/// error.
fn grid_cycle(f: &IfsSystem, x: &PointSet, period: usize, cell: f64) -> Result<Option<(PointSet, usize)>> {
    let mut parts = vec![x.clone()];
    let mut y = x.clone();
    for _ in 0..period {
        y = f.image(&y)?.snapped(cell);
        parts.push(y.clone());
    }
    if y != *x {
        return Ok(None);
    }
    Ok(Some((PointSet::union(&parts)?.snapped(cell), period)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AffineEigen {
    pub lambda: f64,
    pub set: PointSet,
    pub residual: f64,
    pub iterations: usize,
    pub bracket: JsrBracket,
    pub report: EigenReport,
}

#[derive(Clone, Debug)]
pub struct AffineOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub jsr: JsrOptions,
}

impl Default for AffineOptions {
    fn default() -> Self {
        AffineOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            jsr: JsrOptions::default(),
        }
    }
}

/// Solves `F(X) = λX` for an affine system.
///
/// Above the bracket the answer is the attractor of `F_λ` grown from the
/// origin; below it there is none. Inside the bracket the answer is
/// [`Error::NoEigenset`] if [`left_eigen_obstruction`] finds a witness and
/// [`Error::Undetermined`] otherwise.
pub fn affine_eigen(f: &IfsSystem, lambda: f64, opts: &AffineOptions) -> Result<AffineEigen> {
    let bracket = jsr_affine(f, &opts.jsr)?;
    affine_eigen_with_bracket(f, lambda, &bracket, opts)
}

pub fn affine_eigen_with_bracket(
    f: &IfsSystem,
    lambda: f64,
    bracket: &JsrBracket,
    opts: &AffineOptions,
) -> Result<AffineEigen> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidScale(lambda));
    }
    if !f.has_translation() {
        return Err(Error::InvalidParameters("affine eigenvalues need a nonzero translation"));
    }
    if lambda < bracket.lower {
        return Err(Error::NoEigenset);
    }
    if lambda <= bracket.upper {
        if left_eigen_obstruction(f, lambda).is_some() {
            return Err(Error::NoEigenset);
        }
        return Err(Error::Undetermined {
            lower: bracket.lower,
            upper: bracket.upper,
        });
    }
    let g = f.scale(lambda)?;
    let scaled = bracket.scaled(1.0 / lambda);
    let origin = PointSet::single(&Vector::zeros(f.dim()))?;
    let a = attractor_with_bracket(&g, &origin, opts.tol, opts.max_iter, &scaled)?;
    let report = verify_eigen(f, lambda, &a.set, SetModel::Points)?;
    Ok(AffineEigen {
        lambda,
        residual: report.residual,
        iterations: a.iterations,
        bracket: bracket.clone(),
        report,
        set: a.set,
    })
}

/// A unit vector `u` with `L_iᵀu = λu` for every map and `⟨u, a_i⟩ ≠ 0` for
/// some translation `a_i`.
///
/// Such a `u` excludes an eigenset: on a compact `X` with `F(X) = λX` the
/// maximum of `⟨u, ·⟩` obeys `λm + max_i ⟨u, a_i⟩ = λm`, and likewise for
/// the minimum, so every `⟨u, a_i⟩` would vanish.
pub fn left_eigen_obstruction(f: &IfsSystem, lambda: f64) -> Option<Vector> {
    let n = f.dim();
    // AᵀA for the stacked A = [L_1ᵀ - λI; L_2ᵀ - λI; ...]
    let mut gram = Matrix::zeros(n);
    let mut scale = 0.0_f64;
    for m in f.maps() {
        let b = m.linear.transpose().sub(&Matrix::identity(n).scaled(lambda));
        gram = gram.add(&b.transpose().mul(&b));
        scale = scale.max(b.frobenius()).max(m.linear.frobenius());
    }
    let (vals, vecs) = symmetric_eigen(&gram);
    let scale = scale.max(lambda).max(1.0);
    let mut best: Option<(f64, Vector)> = None;
    for (j, &v) in vals.iter().enumerate() {
        if math::sqrt(v.max(0.0)) > CERTIFICATE_TOL * scale {
            continue;
        }
        let u = vecs.column(j);
        for m in f.maps() {
            let t = &m.translation;
            let s = linalg::dot(&u, t);
            if math::abs(s) > CERTIFICATE_TOL * linalg::norm(t).max(1.0)
                && best.as_ref().is_none_or(|b| math::abs(s) > b.0)
            {
                best = Some((math::abs(s), u.clone()));
            }
        }
    }
    best.map(|b| b.1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Contractive,
    NotContractive,
    Undetermined,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Contractive => "contractive",
            Verdict::NotContractive => "not-contractive",
            Verdict::Undetermined => "undetermined",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Agreement {
    Agree,
    Disagree,
    Undetermined,
}

impl Agreement {
    pub fn as_str(self) -> &'static str {
        match self {
            Agreement::Agree => "agree",
            Agreement::Disagree => "disagree",
            Agreement::Undetermined => "undetermined",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContractivityReport {
    pub bracket: JsrBracket,
    pub verdict: Verdict,
    /// The linear parts shrank the unit box below [`COLLAPSE_TOL`].
    pub collapsed: bool,
    pub collapse_iterations: usize,
    /// Diameter of the last iterate of the unit box under the linear parts.
    pub final_diameter: f64,
    /// Attractor from the origin, for contractive systems with translations.
    pub attractor: Option<AttractorResult>,
    pub agreement: Agreement,
}

/// Compares the bracket verdict with what iteration does to the unit box.
///
/// The box `[0,1]ⁿ` is pushed through the linear parts (the difference of
/// two orbits of `F` evolves by them alone); its diameter falls below
/// [`COLLAPSE_TOL`] or the probe gives up after [`PROBE_MAX_ITER`] steps.
pub fn contractivity_probe(f: &IfsSystem) -> Result<ContractivityReport> {
    let bracket = jsr_affine(f, &JsrOptions::default())?;
    let verdict = if bracket.upper < 1.0 {
        Verdict::Contractive
    } else if bracket.lower > 1.0 {
        Verdict::NotContractive
    } else {
        Verdict::Undetermined
    };
    let (collapsed, collapse_iterations, final_diameter) = box_collapse(&f.matrices(), f.dim())?;
    let attractor = if verdict == Verdict::Contractive && f.has_translation() {
        let origin = PointSet::single(&Vector::zeros(f.dim()))?;
        Some(attractor_with_bracket(f, &origin, PROBE_TOL, DEFAULT_MAX_ITER, &bracket)?)
    } else {
        None
    };
    let agreement = match verdict {
        Verdict::Contractive if collapsed => Agreement::Agree,
        Verdict::NotContractive if !collapsed => Agreement::Agree,
        Verdict::Undetermined => Agreement::Undetermined,
        _ => Agreement::Disagree,
    };
    Ok(ContractivityReport {
        bracket,
        verdict,
        collapsed,
        collapse_iterations,
        final_diameter,
        attractor,
        agreement,
    })
}

/// Corners of the unit box `[0,1]ⁿ`.
pub fn unit_box(n: usize) -> PointSet {
    let mut coords = Vec::with_capacity(n << n);
    for mask in 0..(1usize << n) {
        coords.extend((0..n).map(|i| ((mask >> i) & 1) as f64));
    }
    PointSet::new(n, coords).expect("corners are finite")
}

/// Iterates the unit box under `maps` (on hull vertices) until its
/// diameter drops below [`COLLAPSE_TOL`]; returns whether it did, the
/// iteration count and the final diameter.
pub fn box_collapse(maps: &[Matrix], n: usize) -> Result<(bool, usize, f64)> {
    let start = unit_box(n);
    let mut diameter = start.diameter();
    let mut steps = 0;
    let mut collapsed = false;
    hull_orbit(maps, &start, PROBE_MAX_ITER, |k, log_scale, cloud| {
        steps = k;
        diameter = if log_scale == f64::NEG_INFINITY {
            0.0
        } else {
            math::exp(log_scale) * cloud.diameter()
        };
        collapsed = diameter < COLLAPSE_TOL;
        collapsed || log_scale > 700.0
    })?;
    Ok((collapsed, steps, diameter))
}

/// The dyadic grid `{0, 2^-level, ..., 1}²` on the unit square; level 0 is
/// the four vertices.
pub fn unit_square(level: u32) -> PointSet {
    let m = 1usize << level;
    let h = 1.0 / m as f64;
    let mut coords = Vec::with_capacity(2 * (m + 1) * (m + 1));
    for i in 0..=m {
        for j in 0..=m {
            coords.push(i as f64 * h);
            coords.push(j as f64 * h);
        }
    }
    PointSet::new(2, coords).expect("grid is finite")
}
