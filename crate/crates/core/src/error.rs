use core::fmt;

use crate::linalg::ProductWord;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Eigenvalue iteration hit its cap.
    NumericalFailure,
    NonFinite,
    DimensionMismatch { expected: usize, found: usize },
    IndexOutOfRange { index: usize, len: usize },
    EmptyWord,
    EmptySystem,
    /// A linear system was given a nonzero translation.
    TranslationInLinearSystem { map: usize },
    InvalidScale(f64),
    InvalidParameters(&'static str),
    BudgetExceeded { partial: f64, word: Option<ProductWord> },
    EmptyPointSet,
    DegenerateBody,
    OriginNotInterior,
    UnsupportedDimension(usize),
    NoInvariantBody { iterations: usize, max_norm: f64 },
    EigensetCollapsed { iterations: usize },
    EigensetDiverged { iterations: usize },
    NotConverged { iterations: usize, residual: f64 },
    NotContractive { upper: f64 },
    ReducibleSystem,
    NoEigenset,
    Undetermined { lower: f64, upper: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NumericalFailure => f.write_str("eigenvalue iteration did not converge"),
            Error::NonFinite => f.write_str("non-finite entry"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::IndexOutOfRange { index, len } => {
                write!(f, "map index {index} out of range for {len} maps")
            }
            Error::EmptyWord => f.write_str("empty product word"),
            Error::EmptySystem => f.write_str("system has no maps"),
            Error::TranslationInLinearSystem { map } => {
                write!(f, "map {map} has a translation but the system is linear")
            }
            Error::InvalidScale(l) => write!(f, "scale factor must be positive, got {l}"),
            Error::InvalidParameters(why) => write!(f, "invalid parameters: {why}"),
            Error::BudgetExceeded { partial, .. } => {
                write!(f, "product budget exceeded (partial value {partial})")
            }
            Error::EmptyPointSet => f.write_str("empty point set"),
            Error::DegenerateBody => f.write_str("body has empty interior"),
            Error::OriginNotInterior => f.write_str("origin is not an interior point"),
            Error::UnsupportedDimension(n) => write!(f, "dimension {n} is not supported here"),
            Error::NoInvariantBody { iterations, max_norm } => write!(
                f,
                "no invariant body after {iterations} iterations (max norm {max_norm:e})"
            ),
            Error::EigensetCollapsed { iterations } => {
                write!(f, "iterates collapsed to the origin after {iterations} steps")
            }
            Error::EigensetDiverged { iterations } => {
                write!(f, "iterates diverged after {iterations} steps")
            }
            Error::NotConverged { iterations, residual } => write!(
                f,
                "not converged after {iterations} iterations (best residual {residual:e})"
            ),
            Error::NotContractive { upper } => {
                write!(f, "joint spectral radius bracket upper bound {upper} is not below 1")
            }
            Error::ReducibleSystem => f.write_str("system is reducible"),
            Error::NoEigenset => f.write_str("no eigenset exists for this eigenvalue"),
            Error::Undetermined { lower, upper } => {
                write!(f, "eigenvalue lies inside the bracket [{lower}, {upper}]")
            }
        }
    }
}

impl core::error::Error for Error {}
