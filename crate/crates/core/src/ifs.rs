//! Finite iterated function systems of linear and affine maps.

use alloc::vec;
use alloc::vec::Vec;

use crate::eigen;
use crate::error::{Error, Result};
use crate::geom::PointSet;
use crate::linalg::{self, Matrix, Vector};

/// Relative tolerance for calling a subspace invariant.
pub const INVARIANCE_TOL: f64 = 1e-8;

/// `x -> Lx + a`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    pub linear: Matrix,
    pub translation: Vector,
}

impl AffineMap {
    pub fn new(linear: Matrix, translation: Vector) -> Result<Self> {
        if translation.dim() != linear.dim() {
            return Err(Error::DimensionMismatch {
                expected: linear.dim(),
                found: translation.dim(),
            });
        }
        if !linear.is_finite() || !translation.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(AffineMap { linear, translation })
    }

    pub fn linear(linear: Matrix) -> Self {
        let n = linear.dim();
        AffineMap {
            linear,
            translation: Vector::zeros(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.linear.dim()
    }

    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        self.linear.apply_into(x, out);
        for (o, a) in out.iter_mut().zip(self.translation.iter()) {
            *o += a;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vector {
        let mut out = vec![0.0; self.dim()];
        self.apply_into(x, &mut out);
        Vector::new(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IfsKind {
    Linear,
    Affine,
}

impl IfsKind {
    pub fn as_str(self) -> &'static str {
        match self {
            IfsKind::Linear => "linear",
            IfsKind::Affine => "affine",
        }
    }
}

/// Result of the invariant-subspace sweep.
#[derive(Clone, Debug, PartialEq)]
pub enum Irreducibility {
    Irreducible,
    /// Orthonormal basis of a common invariant subspace `0 < dim E < n`.
    Reducible { basis: Vec<Vector> },
}

impl Irreducibility {
    pub fn is_irreducible(&self) -> bool {
        matches!(self, Irreducibility::Irreducible)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IfsSystem {
    dim: usize,
    maps: Vec<AffineMap>,
    kind: IfsKind,
}

impl IfsSystem {
    pub fn new(dim: usize, maps: Vec<AffineMap>, kind: IfsKind) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::EmptySystem);
        }
        for (i, m) in maps.iter().enumerate() {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.dim(),
                });
            }
            if kind == IfsKind::Linear && !m.translation.is_zero() {
                return Err(Error::TranslationInLinearSystem { map: i });
            }
        }
        Ok(IfsSystem { dim, maps, kind })
    }

    pub fn linear(matrices: Vec<Matrix>) -> Result<Self> {
        let dim = matrices.first().ok_or(Error::EmptySystem)?.dim();
        Self::new(dim, matrices.into_iter().map(AffineMap::linear).collect(), IfsKind::Linear)
    }

    pub fn affine(maps: Vec<AffineMap>) -> Result<Self> {
        let dim = maps.first().ok_or(Error::EmptySystem)?.dim();
        Self::new(dim, maps, IfsKind::Affine)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> IfsKind {
        self.kind
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn has_translation(&self) -> bool {
        self.maps.iter().any(|m| !m.translation.is_zero())
    }

    /// The linear parts as bare matrices.
    pub fn matrices(&self) -> Vec<Matrix> {
        self.maps.iter().map(|m| m.linear.clone()).collect()
    }

    /// `F_λ = (1/λ) F`: linear parts and translations divided by `λ`.
    pub fn scale(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidScale(lambda));
        }
        let maps = self
            .maps
            .iter()
            .map(|m| AffineMap {
                linear: Matrix::from_row_major(
                    self.dim,
                    m.linear.as_slice().iter().map(|x| x / lambda).collect(),
                )
                .expect("finite entries stay finite"),
                translation: Vector::new(m.translation.iter().map(|x| x / lambda).collect()),
            })
            .collect();
        Ok(IfsSystem {
            dim: self.dim,
            maps,
            kind: self.kind,
        })
    }

    /// The linear system `{x -> Lx}` of linear parts.
    pub fn linear_parts(&self) -> Self {
        IfsSystem {
            dim: self.dim,
            maps: self.maps.iter().map(|m| AffineMap::linear(m.linear.clone())).collect(),
            kind: IfsKind::Linear,
        }
    }

    /// Linear system of transposed linear parts.
    pub fn transpose(&self) -> Self {
        IfsSystem {
            dim: self.dim,
            maps: self
                .maps
                .iter()
                .map(|m| AffineMap::linear(m.linear.transpose()))
                .collect(),
            kind: IfsKind::Linear,
        }
    }

    /// Union of the images of `x` under every map.
    pub fn image_of_point(&self, x: &[f64]) -> Vec<Vector> {
        self.maps.iter().map(|m| m.apply(x)).collect()
    }

    /// `F(X)`: union of the images of the cloud under every map.
    pub fn image(&self, set: &PointSet) -> Result<PointSet> {
        if set.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: set.dim(),
            });
        }
        let parts: Vec<PointSet> = self
            .maps
            .iter()
            .map(|m| set.mapped(&m.linear, Some(&m.translation)))
            .collect();
        PointSet::union(&parts)
    }

    /// `α = 1/(2R)` with `R` the largest Euclidean operator norm of a linear
    /// part, so that every map of `αF` has norm at most 1/2. An all-zero
    /// system gets `α = 1`.
    pub fn contraction_scale(&self) -> Result<f64> {
        let mut r = 0.0_f64;
        for m in &self.maps {
            r = r.max(linalg::euclidean_operator_norm(&m.linear)?);
        }
        Ok(if r == 0.0 { 1.0 } else { 1.0 / (2.0 * r) })
    }

    /// Searches for a common invariant subspace of the linear parts.
    ///
    /// Seeds are the real eigen-directions (lines, and real planes of complex
    /// pairs) of every linear part and of one fixed generic combination. Each
    /// seed is grown by `V <- V + sum L_i V` until stable; a span that stops
    /// below dimension `n` is a witness of reducibility.
    pub fn irreducibility(&self) -> Result<Irreducibility> {
        let n = self.dim;
        let mats = self.matrices();
        let norm = mats.iter().fold(0.0_f64, |a, m| a.max(m.frobenius()));
        if norm == 0.0 {
            // every subspace is invariant under the zero family
            return Ok(if n > 1 {
                Irreducibility::Reducible {
                    basis: vec![Vector::basis(n, 0)],
                }
            } else {
                Irreducibility::Irreducible
            });
        }
        if n == 1 {
            return Ok(Irreducibility::Irreducible);
        }
        let tol = INVARIANCE_TOL * norm;
        let mut seed_sources = mats.clone();
        let mut generic = Matrix::zeros(n);
        for (i, m) in mats.iter().enumerate() {
            let c = 1.0 + 0.618_033_988_749_894_8 * (i as f64 + 1.0) + 0.1 * (i * i) as f64;
            generic = generic.add(&m.scaled(c));
        }
        seed_sources.push(generic);
        for src in &seed_sources {
            for seed in eigen::real_invariant_seeds(src)? {
                let basis = grow_invariant_span(&mats, &seed, tol);
                if !basis.is_empty() && basis.len() < n && invariance_defect(&mats, &basis) <= tol {
                    return Ok(Irreducibility::Reducible { basis });
                }
            }
        }
        Ok(Irreducibility::Irreducible)
    }

    pub fn is_irreducible(&self) -> Result<bool> {
        Ok(self.irreducibility()?.is_irreducible())
    }
}

/// Adds `v` to an orthonormal basis if its residual exceeds `tol`.
fn push_orthonormal(basis: &mut Vec<Vector>, v: &[f64], tol: f64) -> bool {
    let mut r = v.to_vec();
    // two passes of Gram-Schmidt
    for _ in 0..2 {
        for b in basis.iter() {
            let c = linalg::dot(&r, b);
            for (x, y) in r.iter_mut().zip(b.iter()) {
                *x -= c * y;
            }
        }
    }
    let nr = linalg::norm(&r);
    if nr <= tol {
        return false;
    }
    r.iter_mut().for_each(|x| *x /= nr);
    basis.push(Vector::new(r));
    true
}

fn grow_invariant_span(mats: &[Matrix], seed: &[Vector], tol: f64) -> Vec<Vector> {
    let n = mats[0].dim();
    let mut basis = Vec::new();
    for v in seed {
        let s = v.norm();
        if s > 0.0 {
            push_orthonormal(&mut basis, &v.scaled(1.0 / s), 1e-8);
        }
    }
    let mut frontier = 0;
    while frontier < basis.len() && basis.len() < n {
        let b = basis[frontier].clone();
        frontier += 1;
        for m in mats {
            let img = m.apply(&b);
            push_orthonormal(&mut basis, &img, tol);
            if basis.len() == n {
                break;
            }
        }
    }
    basis
}

/// Largest distance of `L u` from `span(basis)` over the orthonormal basis
/// vectors `u`, summed in quadrature (an upper bound for unit `u ∈ E`).
pub fn invariance_defect(mats: &[Matrix], basis: &[Vector]) -> f64 {
    let mut worst = 0.0_f64;
    for m in mats {
        let mut acc = 0.0;
        for u in basis {
            let mut r = m.apply(u).into_inner();
            for b in basis {
                let c = linalg::dot(&r, b);
                for (x, y) in r.iter_mut().zip(b.iter()) {
                    *x -= c * y;
                }
            }
            acc += linalg::dot(&r, &r);
        }
        worst = worst.max(crate::math::sqrt(acc));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex2() -> IfsSystem {
        IfsSystem::linear(vec![
            Matrix::from_rows(&[[10.0, 10.0], [8.0, 0.0]]).unwrap(),
            Matrix::from_rows(&[[8.0, 0.0], [10.0, 10.0]]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn scale_examples() {
        let f = IfsSystem::linear(vec![Matrix::identity(2).scaled(2.0)]).unwrap();
        assert_eq!(f.scale(2.0).unwrap().matrices()[0], Matrix::identity(2));
        assert_eq!(f.scale(1.0).unwrap(), f);
        assert!(matches!(f.scale(0.0), Err(Error::InvalidScale(_))));
        assert!(matches!(f.scale(-1.0), Err(Error::InvalidScale(_))));
        let g = IfsSystem::affine(vec![AffineMap::new(
            Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap(),
            Vector::new(vec![4.0, -2.0]),
        )
        .unwrap()])
        .unwrap();
        let s = g.scale(4.0).unwrap();
        assert_eq!(s.maps()[0].linear.row(1), &[0.75, 1.0]);
        assert_eq!(&s.maps()[0].translation[..], &[1.0, -0.5]);
    }

    #[test]
    fn linear_parts_drop_translations() {
        let f1 = IfsSystem::affine(vec![AffineMap::new(Matrix::rot90(), Vector::new(vec![1.0, 0.0])).unwrap()])
            .unwrap();
        let lp = f1.linear_parts();
        assert_eq!(lp.kind(), IfsKind::Linear);
        assert_eq!(lp.matrices(), vec![Matrix::rot90()]);
        let f2 = IfsSystem::affine(vec![AffineMap::new(Matrix::identity(1), Vector::new(vec![1.0])).unwrap()])
            .unwrap();
        assert!(!f2.linear_parts().has_translation());
    }

    #[test]
    fn rejects_translation_in_linear_kind() {
        let m = AffineMap::new(Matrix::identity(2), Vector::new(vec![0.0, 1.0])).unwrap();
        assert_eq!(
            IfsSystem::new(2, vec![m], IfsKind::Linear),
            Err(Error::TranslationInLinearSystem { map: 0 })
        );
        assert_eq!(IfsSystem::linear(vec![]), Err(Error::EmptySystem));
    }

    #[test]
    fn irreducibility_examples() {
        let rot = IfsSystem::linear(vec![Matrix::rot90()]).unwrap();
        assert!(rot.is_irreducible().unwrap());
        let d = IfsSystem::linear(vec![Matrix::diag(&[2.0, 1.0])]).unwrap();
        match d.irreducibility().unwrap() {
            Irreducibility::Reducible { basis } => {
                assert_eq!(basis.len(), 1);
                assert!(math_abs(basis[0][1]) < 1e-12);
                assert!(invariance_defect(&d.matrices(), &basis) <= 1e-8);
            }
            Irreducibility::Irreducible => panic!("diag(2,1) has invariant axes"),
        }
        assert!(ex2().is_irreducible().unwrap());
    }

    fn math_abs(x: f64) -> f64 {
        crate::math::abs(x)
    }

    #[test]
    fn example_two_has_no_common_eigenvector() {
        // independent check: real eigenvectors of each map, compared up to scale
        let mats = ex2().matrices();
        let mut dirs: Vec<Vec<[f64; 2]>> = Vec::new();
        for m in &mats {
            let (a, b, c, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
            let tr = a + d;
            let det = a * d - b * c;
            let disc = tr * tr - 4.0 * det;
            assert!(disc > 0.0);
            let mut v = Vec::new();
            for s in [-1.0, 1.0] {
                let l = 0.5 * (tr + s * crate::math::sqrt(disc));
                // (A - l) v = 0  =>  v = (b, l - a) or (l - d, c)
                let w = if math_abs(b) > 1e-12 { [b, l - a] } else { [l - d, c] };
                v.push(w);
            }
            dirs.push(v);
        }
        for p in &dirs[0] {
            for q in &dirs[1] {
                let cross = p[0] * q[1] - p[1] * q[0];
                assert!(math_abs(cross) > 1e-6 * crate::math::hypot(p[0], p[1]) * crate::math::hypot(q[0], q[1]));
            }
        }
    }

    #[test]
    fn block_triangular_three_dim_is_reducible() {
        let a = Matrix::from_rows(&[[1.0, 2.0, 3.0], [0.5, -1.0, 4.0], [0.0, 0.0, 2.0]]).unwrap();
        let b = Matrix::from_rows(&[[0.0, 1.0, -1.0], [2.0, 1.0, 0.5], [0.0, 0.0, -3.0]]).unwrap();
        let f = IfsSystem::linear(vec![a, b]).unwrap();
        match f.irreducibility().unwrap() {
            Irreducibility::Reducible { basis } => {
                assert_eq!(basis.len(), 2);
                assert!(invariance_defect(&f.matrices(), &basis) <= 1e-8 * 10.0);
                for u in &basis {
                    assert!(math_abs(u[2]) < 1e-9);
                }
            }
            _ => panic!("span(e1, e2) is invariant"),
        }
        assert!(!f.transpose().is_irreducible().unwrap());
    }

    #[test]
    fn contraction_scale_examples() {
        let f = IfsSystem::linear(vec![Matrix::identity(2).scaled(2.0)]).unwrap();
        assert_eq!(f.contraction_scale().unwrap(), 0.25);
        let r = IfsSystem::linear(vec![Matrix::rot90()]).unwrap();
        assert_eq!(r.contraction_scale().unwrap(), 0.5);
        let z = IfsSystem::linear(vec![Matrix::zeros(2)]).unwrap();
        assert_eq!(z.contraction_scale().unwrap(), 1.0);
    }

    #[test]
    fn image_is_union_of_map_images() {
        let f = IfsSystem::affine(vec![
            AffineMap::new(Matrix::identity(1).scaled(0.5), Vector::new(vec![0.0])).unwrap(),
            AffineMap::new(Matrix::identity(1).scaled(0.5), Vector::new(vec![0.5])).unwrap(),
        ])
        .unwrap();
        let x = PointSet::from_points(&[[0.0], [1.0]]).unwrap();
        let y = f.image(&x).unwrap();
        assert_eq!(y.coords(), &[0.0, 0.5, 0.5, 1.0]);
    }
}
