//! Two-sided bounds on the joint spectral radius.
//!
//! For every word length `k`,
//! `max_σ ρ(L_σ)^{1/k} <= ρ(F) <= max_σ ||L_σ||^{1/k}` for any operator norm.
//! The search enumerates complete levels of the product tree breadth-first
//! (both bounds), then continues depth-first with pruning for the lower bound
//! only. Upper bounds are taken only from complete levels.
//!
//! Besides the requested norm, the upper bound also uses norms adapted to the
//! family, `||x||_P = sqrt(x^t P x)` with `P = sum_{|w| <= d} (L_w / r^|w|)^t (L_w / r^|w|)`
//! for `d = 1, 2` and `r` the early lower bound, and the Euclidean norm in
//! the real eigenbasis of each map. Every one of them is a valid
//! operator norm, so the minimum stays an upper bound.

use alloc::vec;
use alloc::vec::Vec;

use crate::eigen;
use crate::error::{Error, Result};
use crate::geom::Body;
use crate::ifs::IfsSystem;
use crate::linalg::{self, Matrix, ProductWord};
use crate::math;

/// Operator norm used for the upper bound.
#[derive(Clone, Debug)]
pub enum NormChoice {
    Euclidean,
    /// Norm with the unit cube as unit ball (max absolute row sum).
    Box,
    Body(Body),
}

#[derive(Clone, Debug)]
pub struct JsrOptions {
    pub target_gap: f64,
    pub max_depth: usize,
    /// Matrix products the search may form.
    pub budget: u64,
    pub norm: NormChoice,
    /// Also try the family-adapted quadratic norms.
    pub adaptive: bool,
}

impl Default for JsrOptions {
    fn default() -> Self {
        JsrOptions {
            target_gap: 1e-3,
            max_depth: 20,
            budget: 1_000_000,
            norm: NormChoice::Euclidean,
            adaptive: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JsrBracket {
    pub lower: f64,
    pub upper: f64,
    pub lower_word: ProductWord,
    /// Word length whose level produced `upper` (0 if no level completed).
    pub upper_depth: usize,
    pub depth_explored: usize,
    /// Deepest level enumerated in full.
    pub complete_depth: usize,
    pub words_examined: u64,
    pub pruned: u64,
    pub budget_exhausted: bool,
}

impl JsrBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    /// The bracket of `αF`, given the bracket of `F`.
    pub fn scaled(&self, alpha: f64) -> JsrBracket {
        JsrBracket {
            lower: self.lower * alpha,
            upper: self.upper * alpha,
            ..self.clone()
        }
    }
}

/// Power of two close to `contraction_scale`, so that rescaling products is
/// exact in floating point.
fn normalizer(maps: &[Matrix]) -> Result<f64> {
    let mut r = 0.0_f64;
    for m in maps {
        r = r.max(linalg::euclidean_operator_norm(m)?);
    }
    if r == 0.0 {
        return Ok(1.0);
    }
    let e = math::ceil(math::ln(2.0 * r) / core::f64::consts::LN_2);
    Ok(math::powf(2.0, -e))
}

fn scaled_maps(maps: &[Matrix], a: f64) -> Vec<Matrix> {
    maps.iter().map(|m| m.scaled(a)).collect()
}

fn box_norm(m: &Matrix) -> f64 {
    (0..m.dim())
        .map(|i| m.row(i).iter().map(|x| math::abs(*x)).sum::<f64>())
        .fold(0.0, f64::max)
}

/// A concrete operator norm: the requested one, or a similarity-transformed
/// Euclidean norm `||R M R^{-1}||_2`.
enum NormEval<'a> {
    Euclidean,
    Box,
    Body(&'a Body),
    Similar { r: Matrix, r_inv: Matrix },
}

impl NormEval<'_> {
    fn eval(&self, m: &Matrix) -> Result<f64> {
        match self {
            NormEval::Euclidean => linalg::euclidean_operator_norm(m),
            NormEval::Box => Ok(box_norm(m)),
            NormEval::Body(b) => linalg::operator_norm(m, b),
            NormEval::Similar { r, r_inv } => linalg::euclidean_operator_norm(&r.mul(m).mul(r_inv)),
        }
    }
}

fn base_norm(choice: &NormChoice) -> NormEval<'_> {
    match choice {
        NormChoice::Euclidean => NormEval::Euclidean,
        NormChoice::Box => NormEval::Box,
        NormChoice::Body(b) => NormEval::Body(b),
    }
}

/// Quadratic norm adapted to words of length up to `d`, weighted by `r^-k`.
fn adapted_norm<'a>(maps: &[Matrix], d: usize, r: f64) -> Option<NormEval<'a>> {
    let n = maps[0].dim();
    let mut p = Matrix::identity(n);
    let mut level = vec![Matrix::identity(n)];
    for k in 1..=d {
        let mut next = Vec::with_capacity(level.len() * maps.len());
        for w in &level {
            for m in maps {
                next.push(w.mul(m));
            }
        }
        let s = 1.0 / math::powf(r, k as f64);
        for w in &next {
            let ws = w.scaled(s);
            p = p.add(&ws.transpose().mul(&ws));
        }
        level = next;
    }
    if !p.is_finite() {
        return None;
    }
    let (vals, vecs) = eigen::symmetric_eigen(&p);
    if vals.iter().any(|&v| !(v > 0.0)) {
        return None;
    }
    let vmax = vals.iter().fold(0.0_f64, |a, &v| a.max(v));
    let vmin = vals.iter().fold(f64::INFINITY, |a, &v| a.min(v));
    if vmax / vmin > 1e12 {
        return None;
    }
    let mut r_m = Matrix::zeros(n);
    let mut ri_m = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut a = 0.0;
            let mut b = 0.0;
            for (k, &v) in vals.iter().enumerate() {
                let q = vecs.get(i, k) * vecs.get(j, k);
                a += q * math::sqrt(v);
                b += q / math::sqrt(v);
            }
            r_m.set(i, j, a);
            ri_m.set(i, j, b);
        }
    }
    Some(NormEval::Similar { r: r_m, r_inv: ri_m })
}

/// Norm in which `m` is normal: coordinates in its real eigenbasis (real
/// eigenvectors and the real/imaginary parts of complex ones).
fn eigenbasis_norm<'a>(m: &Matrix) -> Option<NormEval<'a>> {
    let n = m.dim();
    // a complex pair keeps one common scale so the block stays a rotation
    let mut cols: Vec<linalg::Vector> = Vec::new();
    for group in eigen::real_invariant_seeds(m).ok()? {
        let g = group.iter().fold(0.0_f64, |a, v| a.max(v.norm()));
        cols.extend(group.iter().map(|v| v.scaled(1.0 / g)));
    }
    if cols.len() != n {
        return None;
    }
    let mut s = Matrix::zeros(n);
    for (j, c) in cols.iter().enumerate() {
        for i in 0..n {
            s.set(i, j, c[i]);
        }
    }
    let s_inv = s.inverse()?;
    if s_inv.max_abs() > 1e8 {
        return None;
    }
    Some(NormEval::Similar { r: s_inv, r_inv: s })
}

fn word_at(index: usize, k: usize, m: usize) -> Vec<usize> {
    let mut w = vec![0; k];
    let mut i = index;
    for slot in w.iter_mut().rev() {
        *slot = i % m;
        i /= m;
    }
    w
}

/// Best (value, word) with ties broken toward the lexicographically smaller word.
struct Best {
    value: f64,
    word: Vec<usize>,
}

impl Best {
    fn offer(&mut self, value: f64, word: impl FnOnce() -> Vec<usize>) {
        if value > self.value {
            self.value = value;
            self.word = word();
        } else if value == self.value {
            let w = word();
            if w < self.word {
                self.word = w;
            }
        }
    }
}

/// `ρ_k = max over words of length k of ρ(L_σ)`.
pub fn rho_k(f: &IfsSystem, k: usize, budget: u64) -> Result<f64> {
    sup_over_words(f, k, budget, linalg::spectral_radius)
}

/// `ρ̂_k = max over words of length k of ||L_σ||`.
pub fn rho_hat_k(f: &IfsSystem, k: usize, norm: &NormChoice, budget: u64) -> Result<f64> {
    let ev = base_norm(norm);
    sup_over_words(f, k, budget, |m| ev.eval(m))
}

fn sup_over_words(
    f: &IfsSystem,
    k: usize,
    budget: u64,
    mut value: impl FnMut(&Matrix) -> Result<f64>,
) -> Result<f64> {
    if k == 0 {
        return Err(Error::EmptyWord);
    }
    let maps = f.matrices();
    let a = normalizer(&maps)?;
    let scaled = scaled_maps(&maps, a);
    let m = scaled.len();
    let n = f.dim();
    let unscale = math::powf(a, k as f64);
    // depth-first over the word tree, one product per node
    let mut stack: Vec<Matrix> = Vec::with_capacity(k);
    let mut idx: Vec<usize> = Vec::with_capacity(k);
    let mut used: u64 = 0;
    let mut best = Best {
        value: 0.0,
        word: Vec::new(),
    };
    stack.push(Matrix::identity(n));
    idx.push(0);
    loop {
        let depth = idx.len();
        let j = idx[depth - 1];
        if j == m {
            idx.pop();
            stack.pop();
            if idx.is_empty() {
                break;
            }
            let last = idx.len() - 1;
            idx[last] += 1;
            continue;
        }
        if used >= budget {
            return Err(Error::BudgetExceeded {
                partial: best.value / unscale,
                word: ProductWord::new(best.word).ok(),
            });
        }
        let p = stack[depth - 1].mul(&scaled[j]);
        used += 1;
        if depth == k {
            let v = value(&p)?;
            best.offer(v, || idx.clone());
            idx[depth - 1] += 1;
        } else {
            stack.push(p);
            idx.push(0);
        }
    }
    Ok(best.value / unscale)
}

/// Bracket on the joint spectral radius of the linear parts of `f`.
pub fn jsr_bracket(f: &IfsSystem, opts: &JsrOptions) -> Result<JsrBracket> {
    if opts.max_depth == 0 {
        return Err(Error::InvalidParameters("max_depth must be at least 1"));
    }
    if !(opts.target_gap >= 0.0) {
        return Err(Error::InvalidParameters("target_gap must be nonnegative"));
    }
    let maps = f.matrices();
    let n = f.dim();
    let m = maps.len();
    let a = normalizer(&maps)?;
    let scaled = scaled_maps(&maps, a);

    let mut norms: Vec<NormEval> = vec![base_norm(&opts.norm)];
    let mut best = Best {
        value: 0.0,
        word: vec![0],
    };
    let mut upper_scaled = f64::INFINITY;
    let mut upper_depth = 0;
    let mut used: u64 = 0;
    let mut complete = 0;
    let mut budget_exhausted = false;
    let mut pruned = 0u64;

    // level k: flat storage of m^k products in lexicographic word order
    let mut level: Vec<Matrix> = vec![Matrix::identity(n)];
    let gap_met = |lo: f64, up: f64| (up - lo) / a <= opts.target_gap;
    let mut prune_norm = 0usize;

    for k in 1..=opts.max_depth {
        let size = level.len() as u64 * m as u64;
        // depth 1 is always evaluated so every bracket carries a word
        if k > 1 && used + size > opts.budget {
            budget_exhausted = true;
            break;
        }
        let mut next = Vec::with_capacity(size as usize);
        for p in &level {
            for s in &scaled {
                next.push(p.mul(s));
            }
        }
        used += size;
        let root = |x: f64| math::root(x, k);
        for (i, w) in next.iter().enumerate() {
            let v = root(linalg::spectral_radius(w)?);
            best.offer(v, || word_at(i, k, m));
        }
        if opts.adaptive && k == 2 {
            // the early lower bound fixes the weights of the adapted norms
            let r = best.value.max(1e-3 * scaled.iter().map(|s| s.max_abs()).fold(0.0, f64::max));
            if r > 0.0 {
                for d in 1..=2 {
                    if let Some(ev) = adapted_norm(&scaled, d, r) {
                        norms.push(ev);
                    }
                }
                norms.extend(scaled.iter().filter_map(eigenbasis_norm));
                // revisit level 1 under the new norms
                for ev in norms.iter().skip(1) {
                    let mut mx = 0.0_f64;
                    for s in &scaled {
                        mx = mx.max(ev.eval(s)?);
                    }
                    if mx < upper_scaled {
                        upper_scaled = mx;
                        upper_depth = 1;
                    }
                }
            }
        }
        for (ni, ev) in norms.iter().enumerate() {
            let mut mx = 0.0_f64;
            for w in &next {
                mx = mx.max(ev.eval(w)?);
            }
            let u = root(mx);
            if u < upper_scaled {
                upper_scaled = u;
                upper_depth = k;
                prune_norm = ni;
            }
        }
        complete = k;
        level = next;
        if gap_met(best.value, upper_scaled) {
            break;
        }
    }

    let mut depth_explored = complete;
    let mut words_examined = used;
    if !gap_met(best.value, upper_scaled) && complete < opts.max_depth && used < opts.budget {
        // pruned depth-first continuation below the last complete level
        let ev = &norms[prune_norm];
        let base = complete;
        'roots: for (root_i, root_p) in level.iter().enumerate() {
            let root_word = word_at(root_i, base, m);
            let mut stack: Vec<Matrix> = vec![root_p.clone()];
            let mut idx: Vec<usize> = vec![0];
            while let Some(&j) = idx.last() {
                let depth = base + idx.len();
                if j == m || depth > opts.max_depth {
                    idx.pop();
                    stack.pop();
                    if let Some(last) = idx.last_mut() {
                        *last += 1;
                    }
                    continue;
                }
                if used >= opts.budget {
                    budget_exhausted = true;
                    break 'roots;
                }
                let p = stack.last().expect("stack tracks idx").mul(&scaled[j]);
                used += 1;
                words_examined += 1;
                depth_explored = depth_explored.max(depth);
                let v = math::root(linalg::spectral_radius(&p)?, depth);
                best.offer(v, || {
                    let mut w = root_word.clone();
                    w.extend_from_slice(&idx);
                    w
                });
                if gap_met(best.value, upper_scaled) {
                    break 'roots;
                }
                let nrm = ev.eval(&p)?;
                if nrm < math::powf(best.value, depth as f64) {
                    pruned += 1;
                    *idx.last_mut().expect("nonempty") += 1;
                } else {
                    stack.push(p);
                    idx.push(0);
                }
            }
        }
    }

    let lower = best.value / a;
    let upper = (upper_scaled / a).max(lower);
    Ok(JsrBracket {
        lower,
        upper,
        lower_word: ProductWord::new(best.word)?,
        upper_depth,
        depth_explored,
        complete_depth: complete,
        words_examined,
        pruned,
        budget_exhausted,
    })
}

/// Bracket for an affine system: the bracket of its linear parts.
pub fn jsr_affine(f: &IfsSystem, opts: &JsrOptions) -> Result<JsrBracket> {
    jsr_bracket(&f.linear_parts(), opts)
}
