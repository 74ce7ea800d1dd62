//! Exact-arithmetic engine for two-faced noncommutative probability.
//!
//! The crate computes bi-free and bi-Boolean cumulants from moments and back,
//! detects R-diagonal and eta-diagonal pairs, evaluates product-pair formulas
//! against a brute-force partition oracle, and checks Boolean independence
//! with amalgamation for 2x2 matrix algebras. All arithmetic is exact over
//! the Gaussian rationals; the algebraic layers are generic over any scalar
//! field with conjugation.

pub mod cumulants;
pub mod distribution;
pub mod error;
pub mod ncpoly;
pub mod partitions;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{GaussianRational, Scalar};

/// The exact scalar used by the CLI and every shipped table.
pub type Exact = GaussianRational;

/// Moment table over the exact scalar.
pub type ExactMoments = distribution::MomentTable<Exact>;

/// Cumulant table over the exact scalar.
pub type ExactCumulants = cumulants::CumulantTable<Exact>;

/// Polynomial over the exact scalar.
pub type ExactPolynomial = ncpoly::NcPolynomial<Exact>;
