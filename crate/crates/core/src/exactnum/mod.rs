//! Exact arithmetic substrate: Gaussian rationals, polynomials and rational
//! functions in a formal parameter ε, Hermite interpolation, and exact
//! determinants.

mod field;
mod gaussian;
mod hermite;
mod laurent;
mod qops;
mod matrix;
mod poly;
mod ratfunc;

pub use field::{sign, Scalar};
pub use gaussian::GaussianRational;
pub use hermite::hermite_interpolant;
pub use laurent::{with_precision, LaurentEps};
pub use matrix::ScalarMatrix;
pub use poly::{Poly, PolyEps};
pub use ratfunc::RationalFunctionEps;
