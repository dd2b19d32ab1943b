#![allow(dead_code)]

use ifs_spectral_core::{IfsSystem, Matrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn matrix(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-2.0..2.0f64, n * n).prop_map(move |d| Matrix::from_row_major(n, d).unwrap())
}

/// Linear systems of dimension 2 or 3 with one to three maps.
pub fn system() -> impl Strategy<Value = IfsSystem> {
    (2usize..=3)
        .prop_flat_map(|n| prop::collection::vec(matrix(n), 1..=3))
        .prop_map(|ms| IfsSystem::linear(ms).unwrap())
}

pub fn planar_system() -> impl Strategy<Value = IfsSystem> {
    prop::collection::vec(matrix(2), 1..=3).prop_map(|ms| IfsSystem::linear(ms).unwrap())
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    Matrix::from_row_major(n, (0..n * n).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap()
}

/// Seeded corpus of irreducible planar systems with one to three maps.
pub fn irreducible_planar(seed: u64, count: usize) -> Vec<IfsSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let m = rng.gen_range(1..=3);
        let f = IfsSystem::linear((0..m).map(|_| random_matrix(&mut rng, 2)).collect()).unwrap();
        if f.is_irreducible().unwrap() {
            out.push(f);
        }
    }
    out
}

/// Random centrally symmetric polygon with the origin inside.
pub fn symmetric_polygon() -> impl Strategy<Value = Vec<[f64; 2]>> {
    prop::collection::vec((0.0..core::f64::consts::PI, 0.3..2.0f64), 2..8).prop_map(|v| {
        let mut pts = Vec::new();
        for (t, r) in v {
            pts.push([r * t.cos(), r * t.sin()]);
            pts.push([-r * t.cos(), -r * t.sin()]);
        }
        // keep the body full dimensional
        pts.extend([[0.3, 0.0], [-0.3, 0.0], [0.0, 0.3], [0.0, -0.3]]);
        pts
    })
}
