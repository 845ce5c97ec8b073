//! Numerical toolkit for dyadic time-frequency analysis of Banach-space-valued
//! Fourier series.
//!
//! The crate operates on piecewise-constant functions `f: (-2,2) -> X` sampled
//! on a uniform grid, where `X` is a concrete normed space (complex scalars,
//! finite-dimensional `l_p` vectors, or Schatten-p matrices). On top of that it
//! builds the classical apparatus of Carleson-style time-frequency analysis:
//!
//! * generalized Fourier coefficients at arbitrary real frequency and their
//!   Carleson averages ([`fourier`]),
//! * dyadic / smoothing interval combinatorics with exact endpoints ([`dyadic`]),
//! * singular and maximal operators with principal-value quadrature
//!   ([`operators`]),
//! * Carleson partitions and the good/bad decomposition ([`decomposition`]),
//! * Hausdorff-Young type certificates on `L(log L)^beta` ([`hausdorff_young`]),
//! * exceptional-set construction ([`exceptional`]),
//! * the triplet iteration certifying `||S_n f(x)|| = O(log log n)` off the
//!   exceptional set ([`growth`]).
//!
//! Everything is deterministic for a fixed configuration and seed; random
//! corpus members use a seeded ChaCha stream.

pub mod acceptance;
pub mod config;
pub mod corpus;
pub mod decomposition;
pub mod dyadic;
pub mod exceptional;
pub mod fit;
pub mod fourier;
pub mod growth;
pub mod hausdorff_young;
pub mod operators;
pub mod report;
pub mod values;

use thiserror::Error;

/// Errors shared by every module of the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Payload dimensions or space tags are inconsistent.
    #[error("structural error: {0}")]
    Structural(String),

    /// An interval is not aligned with the sampling grid, or a point is not a
    /// cell midpoint.
    #[error("alignment error: {0}")]
    Alignment(String),

    /// A construction exceeded the representable generation range, the pair
    /// budget, or another hard capacity limit.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// A documented precondition does not hold for the given inputs.
    #[error("contract error: {0}")]
    Contract(String),

    /// The requested frequency is under-resolved on the current grid.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// Degenerate input (for instance the zero function where a positive
    /// threshold is required).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Invalid configuration file or field.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
