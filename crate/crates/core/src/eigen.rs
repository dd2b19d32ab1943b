//! Eigenvalue machinery for small dense matrices.
//!
//! General matrices go through balancing, elimination to Hessenberg form and
//! the Francis double-shift QR iteration. Symmetric matrices use cyclic Jacobi
//! rotations, which also give orthonormal eigenvectors.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::math;

/// Total QR sweeps allowed per matrix.
pub const ITERATION_CAP: usize = 10_000;
pub const CONVERGENCE_TOL: f64 = 1e-12;

/// Both eigenvalues of a 2x2 matrix from its characteristic polynomial
/// `z^2 - tr z + det`.
pub fn eigenvalues_2x2(m: &Matrix) -> [Complex64; 2] {
    let (a, b, c, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
    let half_tr = 0.5 * (a + d);
    // (a-d)^2/4 + bc avoids cancellation in tr^2/4 - det
    let half_diff = 0.5 * (a - d);
    let disc = half_diff * half_diff + b * c;
    if disc >= 0.0 {
        let s = math::sqrt(disc);
        // stable pair: larger-magnitude root first, the other from the product
        let big = if half_tr >= 0.0 { half_tr + s } else { half_tr - s };
        let det = a * d - b * c;
        let small = if big != 0.0 { det / big } else { half_tr - s };
        [Complex64::new(big, 0.0), Complex64::new(small, 0.0)]
    } else {
        let s = math::sqrt(-disc);
        [Complex64::new(half_tr, s), Complex64::new(half_tr, -s)]
    }
}

/// All complex eigenvalues, in no particular order.
pub fn eigenvalues(m: &Matrix) -> Result<Vec<Complex64>> {
    match m.dim() {
        0 => Ok(Vec::new()),
        1 => Ok(vec![Complex64::new(m.get(0, 0), 0.0)]),
        2 => Ok(eigenvalues_2x2(m).to_vec()),
        _ => hessenberg_qr(m),
    }
}

// 1-based working copy, which keeps the classical loop bounds readable.
struct Work {
    n: usize,
    a: Vec<f64>,
}

impl Work {
    fn from(m: &Matrix) -> Self {
        let n = m.dim();
        let mut a = vec![0.0; (n + 1) * (n + 1)];
        for i in 0..n {
            for j in 0..n {
                a[(i + 1) * (n + 1) + j + 1] = m.get(i, j);
            }
        }
        Work { n, a }
    }
    #[inline]
    fn g(&self, i: usize, j: usize) -> f64 {
        self.a[i * (self.n + 1) + j]
    }
    #[inline]
    fn s(&mut self, i: usize, j: usize, v: f64) {
        let n = self.n;
        self.a[i * (n + 1) + j] = v;
    }
    fn swap(&mut self, i1: usize, j1: usize, i2: usize, j2: usize) {
        let n = self.n;
        self.a.swap(i1 * (n + 1) + j1, i2 * (n + 1) + j2);
    }
}

fn balance(w: &mut Work) {
    const RADIX: f64 = 2.0;
    let n = w.n;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 1..=n {
                if j != i {
                    c += math::abs(w.g(j, i));
                    r += math::abs(w.g(i, j));
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 1..=n {
                        let v = w.g(i, j) * g;
                        w.s(i, j, v);
                    }
                    for j in 1..=n {
                        let v = w.g(j, i) * f;
                        w.s(j, i, v);
                    }
                }
            }
        }
    }
}

fn to_hessenberg(w: &mut Work) {
    let n = w.n;
    for m in 2..n {
        let mut x = 0.0;
        let mut i = m;
        for j in m..=n {
            if math::abs(w.g(j, m - 1)) > math::abs(x) {
                x = w.g(j, m - 1);
                i = j;
            }
        }
        if i != m {
            for j in (m - 1)..=n {
                w.swap(i, j, m, j);
            }
            for j in 1..=n {
                w.swap(j, i, j, m);
            }
        }
        if x != 0.0 {
            for i in (m + 1)..=n {
                let mut y = w.g(i, m - 1);
                if y != 0.0 {
                    y /= x;
                    w.s(i, m - 1, y);
                    for j in m..=n {
                        let v = w.g(i, j) - y * w.g(m, j);
                        w.s(i, j, v);
                    }
                    for j in 1..=n {
                        let v = w.g(j, m) + y * w.g(j, i);
                        w.s(j, m, v);
                    }
                }
            }
        }
    }
    for i in 3..=n {
        for j in 1..(i - 1) {
            w.s(i, j, 0.0);
        }
    }
}

#[inline]
fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        math::abs(a)
    } else {
        -math::abs(a)
    }
}

fn hessenberg_qr(m: &Matrix) -> Result<Vec<Complex64>> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut w = Work::from(m);
    balance(&mut w);
    to_hessenberg(&mut w);
    let n = w.n;
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];

    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += math::abs(w.g(i, j));
        }
    }
    let mut nn = n;
    let mut t = 0.0;
    let mut total = 0usize;
    let (mut p, mut q, mut r, mut s, mut x, mut y, mut z);
    while nn >= 1 {
        let mut its = 0usize;
        loop {
            let mut l = nn;
            while l >= 2 {
                s = math::abs(w.g(l - 1, l - 1)) + math::abs(w.g(l, l));
                if s == 0.0 {
                    s = anorm;
                }
                if math::abs(w.g(l, l - 1)) + s == s {
                    w.s(l, l - 1, 0.0);
                    break;
                }
                l -= 1;
            }
            x = w.g(nn, nn);
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
                break;
            }
            y = w.g(nn - 1, nn - 1);
            let ww = w.g(nn, nn - 1) * w.g(nn - 1, nn);
            if l == nn - 1 {
                p = 0.5 * (y - x);
                q = p * p + ww;
                z = math::sqrt(math::abs(q));
                x += t;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[nn - 1] = x + z;
                    wr[nn] = x + z;
                    if z != 0.0 {
                        wr[nn] = x - ww / z;
                    }
                    wi[nn - 1] = 0.0;
                    wi[nn] = 0.0;
                } else {
                    wr[nn - 1] = x + p;
                    wr[nn] = x + p;
                    wi[nn - 1] = -z;
                    wi[nn] = z;
                }
                nn -= 2;
                break;
            }
            total += 1;
            if total > ITERATION_CAP {
                return Err(Error::NumericalFailure);
            }
            let mut wv = ww;
            if its > 0 && its.is_multiple_of(10) {
                // exceptional shift
                t += x;
                for i in 1..=nn {
                    let v = w.g(i, i) - x;
                    w.s(i, i, v);
                }
                s = math::abs(w.g(nn, nn - 1)) + math::abs(w.g(nn - 1, nn - 2));
                x = 0.75 * s;
                y = x;
                wv = -0.4375 * s * s;
            }
            its += 1;
            let mut mm = nn - 2;
            loop {
                z = w.g(mm, mm);
                r = x - z;
                s = y - z;
                p = (r * s - wv) / w.g(mm + 1, mm) + w.g(mm, mm + 1);
                q = w.g(mm + 1, mm + 1) - z - r - s;
                r = w.g(mm + 2, mm + 1);
                s = math::abs(p) + math::abs(q) + math::abs(r);
                p /= s;
                q /= s;
                r /= s;
                if mm == l {
                    break;
                }
                let u = math::abs(w.g(mm, mm - 1)) * (math::abs(q) + math::abs(r));
                let v = math::abs(p)
                    * (math::abs(w.g(mm - 1, mm - 1)) + math::abs(z) + math::abs(w.g(mm + 1, mm + 1)));
                if u + v == v {
                    break;
                }
                mm -= 1;
            }
            for i in (mm + 2)..=nn {
                w.s(i, i - 2, 0.0);
                if i != mm + 2 {
                    w.s(i, i - 3, 0.0);
                }
            }
            let mut k = mm;
            while k < nn {
                if k != mm {
                    p = w.g(k, k - 1);
                    q = w.g(k + 1, k - 1);
                    r = 0.0;
                    if k != nn - 1 {
                        r = w.g(k + 2, k - 1);
                    }
                    x = math::abs(p) + math::abs(q) + math::abs(r);
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                s = sign(math::sqrt(p * p + q * q + r * r), p);
                if s != 0.0 {
                    if k == mm {
                        if l != mm {
                            let v = -w.g(k, k - 1);
                            w.s(k, k - 1, v);
                        }
                    } else {
                        w.s(k, k - 1, -s * x);
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        p = w.g(k, j) + q * w.g(k + 1, j);
                        if k != nn - 1 {
                            p += r * w.g(k + 2, j);
                            let v = w.g(k + 2, j) - p * z;
                            w.s(k + 2, j, v);
                        }
                        let v = w.g(k + 1, j) - p * y;
                        w.s(k + 1, j, v);
                        let v = w.g(k, j) - p * x;
                        w.s(k, j, v);
                    }
                    let mmin = if nn < k + 3 { nn } else { k + 3 };
                    for i in l..=mmin {
                        p = x * w.g(i, k) + y * w.g(i, k + 1);
                        if k != nn - 1 {
                            p += z * w.g(i, k + 2);
                            let v = w.g(i, k + 2) - p * r;
                            w.s(i, k + 2, v);
                        }
                        let v = w.g(i, k + 1) - p * q;
                        w.s(i, k + 1, v);
                        let v = w.g(i, k) - p;
                        w.s(i, k, v);
                    }
                }
                k += 1;
            }
            if l + 1 >= nn {
                continue;
            }
        }
    }
    let out: Vec<Complex64> = (1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect();
    if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NumericalFailure);
    }
    Ok(out)
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues and the matching orthonormal eigenvectors (columns of
/// the returned matrix), sorted by decreasing eigenvalue.
pub fn symmetric_eigen(sym: &Matrix) -> (Vec<f64>, Matrix) {
    let n = sym.dim();
    let mut a = sym.clone();
    let mut v = Matrix::identity(n);
    let scale = a.frobenius();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a.get(i, j) * a.get(i, j);
            }
        }
        if off == 0.0 || math::sqrt(off) <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = sign(1.0, theta) / (math::abs(theta) + math::sqrt(theta * theta + 1.0));
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(j, j).total_cmp(&a.get(i, i)));
    let vals = order.iter().map(|&i| a.get(i, i)).collect();
    let mut vecs = Matrix::zeros(n);
    for (c, &i) in order.iter().enumerate() {
        for r in 0..n {
            vecs.set(r, c, v.get(r, i));
        }
    }
    (vals, vecs)
}

pub fn symmetric_eigenvalues(sym: &Matrix) -> Vec<f64> {
    symmetric_eigen(sym).0
}

/// Singular values of an `rows x cols` row-major matrix, descending.
pub fn singular_values(rows: usize, cols: usize, data: &[f64]) -> Vec<f64> {
    let mut gram = Matrix::zeros(cols);
    for i in 0..cols {
        for j in i..cols {
            let s: f64 = (0..rows).map(|r| data[r * cols + i] * data[r * cols + j]).sum();
            gram.set(i, j, s);
            gram.set(j, i, s);
        }
    }
    symmetric_eigenvalues(&gram)
        .into_iter()
        .map(|x| math::sqrt(x.max(0.0)))
        .collect()
}

/// Basis of the null space of a complex n x n matrix (row-major), by
/// Gauss-Jordan elimination with a relative pivot threshold.
pub fn complex_null_space(n: usize, mut a: Vec<Complex64>, rel_tol: f64) -> Vec<Vec<Complex64>> {
    let scale = a.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    let tol = rel_tol * scale.max(f64::MIN_POSITIVE);
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == n {
            break;
        }
        let (best, bv) = (row..n)
            .map(|r| (r, a[r * n + col].norm()))
            .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if bv <= tol {
            continue;
        }
        if best != row {
            for j in 0..n {
                a.swap(best * n + j, row * n + j);
            }
        }
        let piv = a[row * n + col];
        for j in 0..n {
            a[row * n + j] /= piv;
        }
        for r in 0..n {
            if r == row {
                continue;
            }
            let f = a[r * n + col];
            if f.norm() == 0.0 {
                continue;
            }
            for j in 0..n {
                let v = a[row * n + j];
                a[r * n + j] -= f * v;
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    let mut basis = Vec::new();
    for free in 0..n {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[free] = Complex64::new(1.0, 0.0);
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -a[r * n + free];
        }
        basis.push(v);
    }
    basis
}

/// Real starting subspaces for invariant-subspace sweeps: each real
/// eigenvector spans a line, each complex eigenvector `w` spans the real plane
/// `{Re w, Im w}`.
pub fn real_invariant_seeds(m: &Matrix) -> Result<Vec<Vec<Vector>>> {
    let n = m.dim();
    let eig = eigenvalues(m)?;
    let scale = m.max_abs().max(1.0);
    let mut distinct: Vec<Complex64> = Vec::new();
    for z in eig {
        if z.im < -1e-12 * scale {
            continue;
        }
        let z = if math::abs(z.im) <= 1e-12 * scale {
            Complex64::new(z.re, 0.0)
        } else {
            z
        };
        if !distinct.iter().any(|d| (d - z).norm() <= 1e-9 * scale) {
            distinct.push(z);
        }
    }
    let mut seeds = Vec::new();
    for mu in distinct {
        let mut a: Vec<Complex64> = m.as_slice().iter().map(|&x| Complex64::new(x, 0.0)).collect();
        for i in 0..n {
            a[i * n + i] -= mu;
        }
        for w in complex_null_space(n, a, 1e-7) {
            if mu.im == 0.0 {
                seeds.push(vec![Vector::new(w.iter().map(|z| z.re).collect())]);
            } else {
                seeds.push(vec![
                    Vector::new(w.iter().map(|z| z.re).collect()),
                    Vector::new(w.iter().map(|z| z.im).collect()),
                ]);
            }
        }
    }
    Ok(seeds)
}
