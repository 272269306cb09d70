pub mod dwpf;
pub mod error;
pub mod exactnum;
pub mod highest;
pub mod kernels;
pub mod partitions;
pub mod random;
pub mod scalar;
pub mod spectral;
pub mod verdict;

pub use error::{Error, Result};
pub use exactnum::{GaussianRational, RationalFunctionEps, Scalar, ScalarMatrix};

/// Exact Gaussian rationals.
pub type Q = GaussianRational;
/// Rational functions of ε over [`Q`].
pub type Eps = RationalFunctionEps;
pub type C64 = num_complex::Complex<f64>;
pub type C32 = num_complex::Complex<f32>;
