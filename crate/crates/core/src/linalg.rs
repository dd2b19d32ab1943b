//! Dense, small-dimension real linear algebra.
//!
//! Matrices are square and stored row-major. Everything here is sized for the
//! desk-scale regime (n up to ~16); nothing tries to be cache-clever.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Deref, DerefMut};

use crate::eigen;
use crate::error::{Error, Result};
use crate::geom::Body;
use crate::math;

/// A point of R^n.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Self {
        Vector(coords)
    }

    pub fn zeros(n: usize) -> Self {
        Vector(vec![0.0; n])
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn scaled(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|x| x * s).collect())
    }
}

impl Deref for Vector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Vector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl AsRef<[f64]> for Vector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    math::sqrt(dot(a, a))
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    math::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// Square real matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.n {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{:?}", self.row(i))?;
        }
        f.write_str("]")
    }
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m.data[i * d.len() + i] = x;
        }
        m
    }

    /// Builds a matrix from rows; all rows must have length `rows.len()`.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            let r = r.as_ref();
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        let m = Matrix { n, data };
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(m)
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        Ok(Matrix { n, data })
    }

    /// Rotation by a quarter turn counter-clockwise in the plane.
    pub fn rot90() -> Self {
        Matrix {
            n: 2,
            data: vec![0.0, -1.0, 1.0, 0.0],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector((0..self.n).map(|i| self.get(i, j)).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0.0)
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n;
        let mut t = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t.data[j * n + i] = self.data[i * n + j];
            }
        }
        t
    }

    pub fn scaled(&self, s: f64) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let n = self.n;
        debug_assert_eq!(n, other.n);
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let orow = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// `self * x` written into `out`.
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.n) {
            *o = dot(self.row(i), x);
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vector {
        let mut out = vec![0.0; self.n];
        self.apply_into(x, &mut out);
        Vector(out)
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Max absolute entry; zero for the zero matrix.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(math::abs(*x)))
    }

    pub fn frobenius(&self) -> f64 {
        norm(&self.data)
    }

    /// Determinant by partial-pivot LU.
    pub fn determinant(&self) -> f64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for c in 0..n {
            let p = (c..n)
                .max_by(|&i, &j| math::abs(a[i * n + c]).total_cmp(&math::abs(a[j * n + c])))
                .unwrap_or(c);
            if a[p * n + c] == 0.0 {
                return 0.0;
            }
            if p != c {
                for j in 0..n {
                    a.swap(c * n + j, p * n + j);
                }
                det = -det;
            }
            let piv = a[c * n + c];
            det *= piv;
            for r in c + 1..n {
                let f = a[r * n + c] / piv;
                for j in c..n {
                    a[r * n + j] -= f * a[c * n + j];
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan; `None` when numerically singular.
    pub fn inverse(&self) -> Option<Matrix> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = Matrix::identity(n).data;
        let scale = self.max_abs();
        if scale == 0.0 {
            return None;
        }
        for c in 0..n {
            let p = (c..n)
                .max_by(|&i, &j| math::abs(a[i * n + c]).total_cmp(&math::abs(a[j * n + c])))
                .unwrap_or(c);
            if math::abs(a[p * n + c]) <= 1e-14 * scale {
                return None;
            }
            if p != c {
                for j in 0..n {
                    a.swap(c * n + j, p * n + j);
                    inv.swap(c * n + j, p * n + j);
                }
            }
            let piv = a[c * n + c];
            for j in 0..n {
                a[c * n + j] /= piv;
                inv[c * n + j] /= piv;
            }
            for r in 0..n {
                if r == c {
                    continue;
                }
                let f = a[r * n + c];
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] -= f * a[c * n + j];
                    inv[r * n + j] -= f * inv[c * n + j];
                }
            }
        }
        Some(Matrix { n, data: inv })
    }
}

/// A word `i_1 i_2 ... i_k` indexing the product `L_{i_1} L_{i_2} ... L_{i_k}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProductWord(Vec<usize>);

impl ProductWord {
    /// Fails on the empty word.
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(ProductWord(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for ProductWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

/// `L_{i_1} L_{i_2} ... L_{i_k}`, i.e. the composition `L_{i_1} ∘ ... ∘ L_{i_k}`.
pub fn word_product(maps: &[Matrix], word: &ProductWord) -> Result<Matrix> {
    let mut it = word.indices().iter();
    let first = *it.next().ok_or(Error::EmptyWord)?;
    let get = |i: usize| {
        maps.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: maps.len(),
        })
    };
    let mut acc = get(first)?.clone();
    for &i in it {
        acc = acc.mul(get(i)?);
    }
    Ok(acc)
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(m: &Matrix) -> Result<f64> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(eigen::eigenvalues(m)?
        .iter()
        .fold(0.0_f64, |acc, z| acc.max(z.norm())))
}

/// Spectral norm, `sqrt(rho(M^t M))`.
pub fn euclidean_operator_norm(m: &Matrix) -> Result<f64> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    if m.dim() == 2 {
        // closed form for the larger singular value
        let (a, b, c, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
        let s = a * a + b * b + c * c + d * d;
        let det = a * d - b * c;
        let disc = math::sqrt((s * s - 4.0 * det * det).max(0.0));
        return Ok(math::sqrt(0.5 * (s + disc)));
    }
    let gram = m.transpose().mul(m);
    let ev = eigen::symmetric_eigenvalues(&gram);
    Ok(math::sqrt(ev.iter().fold(0.0_f64, |a, &x| a.max(x))))
}

/// Operator norm induced by the Minkowski functional of `ball`.
///
/// For a polygon ball the maximum of `||Mx||_C / ||x||_C` is attained at a
/// vertex, so the result is exact; for hull clouds it is evaluated on the
/// stored extreme points.
pub fn operator_norm(m: &Matrix, ball: &Body) -> Result<f64> {
    if ball.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: ball.dim(),
        });
    }
    if !ball.is_full_dimensional() {
        return Err(Error::DegenerateBody);
    }
    let mut best = 0.0_f64;
    let mut image = vec![0.0; m.dim()];
    for v in ball.vertices() {
        let nv = ball.minkowski_functional(v)?;
        if nv == 0.0 {
            continue;
        }
        m.apply_into(v, &mut image);
        best = best.max(ball.minkowski_functional(&image)? / nv);
    }
    Ok(best)
}
