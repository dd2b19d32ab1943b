mod common;

use common::{matrix, symmetric_polygon};
use ifs_spectral_core::linalg::{euclidean_operator_norm, operator_norm, spectral_radius};
use ifs_spectral_core::{Body, Matrix};
use proptest::prelude::*;

proptest! {
    #[test]
    fn operator_norms_are_submultiplicative(a in matrix(2), b in matrix(2), poly in symmetric_polygon()) {
        let ball = Body::polygon(&poly).unwrap();
        let ab = a.mul(&b);
        let lhs = operator_norm(&ab, &ball).unwrap();
        let rhs = operator_norm(&a, &ball).unwrap() * operator_norm(&b, &ball).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + f64::EPSILON);
        let e = euclidean_operator_norm(&ab).unwrap();
        prop_assert!(e <= euclidean_operator_norm(&a).unwrap() * euclidean_operator_norm(&b).unwrap() * (1.0 + 1e-12) + f64::EPSILON);
    }

    #[test]
    fn spectral_radius_is_below_every_operator_norm(a in matrix(3), b in matrix(2), poly in symmetric_polygon()) {
        let r = spectral_radius(&a).unwrap();
        prop_assert!(r <= euclidean_operator_norm(&a).unwrap() * (1.0 + 1e-10) + 1e-12);
        prop_assert!(r <= operator_norm(&a, &Body::cross_polytope(3)).unwrap() * (1.0 + 1e-10) + 1e-12);
        let ball = Body::polygon(&poly).unwrap();
        prop_assert!(spectral_radius(&b).unwrap() <= operator_norm(&b, &ball).unwrap() * (1.0 + 1e-10) + 1e-12);
    }

    #[test]
    fn spectral_radius_of_transpose(a in matrix(3)) {
        let r = spectral_radius(&a).unwrap();
        prop_assert!((spectral_radius(&a.transpose()).unwrap() - r).abs() <= 1e-10 * r.max(1.0));
    }

    #[test]
    fn spectral_radius_is_homogeneous(a in matrix(3), alpha in -3.0..3.0f64) {
        let r = spectral_radius(&a).unwrap();
        let s = spectral_radius(&a.scaled(alpha)).unwrap();
        prop_assert!((s - alpha.abs() * r).abs() <= 1e-10 * (alpha.abs() * r).max(1e-300) + 1e-14);
    }
}

#[test]
fn rotation_has_unit_radius() {
    assert!((spectral_radius(&Matrix::rot90()).unwrap() - 1.0).abs() < 1e-15);
}
