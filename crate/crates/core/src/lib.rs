//! Eigenvalues and eigensets of linear and affine iterated function systems.
//!
//! The crate computes certified brackets on the joint spectral radius of a
//! finite family of matrices, solves the set equation `F(X) = λX`, and builds
//! the extremal bodies (the `conv F(K) = ρK` body and the unit ball of a
//! Barabanov norm) that the eigenset construction yields.
//!
//! It is `no_std` and only needs `alloc`; IO, file formats and the command
//! line live in the `ifs-spectral` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod affine;
pub mod eigen;
pub mod eigenset;
mod error;
pub mod extremal;
pub mod geom;
pub mod ifs;
pub mod jsr;
pub mod linalg;
pub mod math;
pub mod star;

pub use error::{Error, Result};
pub use geom::{Body, PointSet};
pub use ifs::{AffineMap, IfsKind, IfsSystem, Irreducibility};
pub use jsr::{JsrBracket, JsrOptions, NormChoice};
pub use linalg::{Matrix, ProductWord, Vector};
