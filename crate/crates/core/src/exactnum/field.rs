//! The scalar abstraction every formula in the crate is written against.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{Float, One, ToPrimitive, Zero};

use super::GaussianRational;

/// A field the kernels, determinants and partition sums can be evaluated
/// over.
///
/// Exact fields ([`GaussianRational`], [`super::RationalFunctionEps`]) give
/// tolerance-free identities. `Complex<f32>`/`Complex<f64>` are supported for
/// quick numeric evaluation; pole detection there is an exact-zero test.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    /// Embeds an exact Gaussian rational.
    fn from_exact(x: &GaussianRational) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_exact(&GaussianRational::from(n))
    }

    fn checked_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::one() / self.clone())
        }
    }

    fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * &base;
            }
            base = base.clone() * &base;
            e >>= 1;
        }
        acc
    }
}

impl Scalar for GaussianRational {
    fn from_exact(x: &GaussianRational) -> Self {
        x.clone()
    }
}

impl<T> Scalar for Complex<T>
where
    T: Float + Debug + Display + Send + Sync + 'static,
{
    fn from_exact(x: &GaussianRational) -> Self {
        let conv = |r: &num_rational::BigRational| T::from(r.to_f64().unwrap_or(f64::NAN)).unwrap();
        Complex::new(conv(&x.re), conv(&x.im))
    }
}

/// `(-1)^n` in any scalar field.
pub fn sign<S: Scalar>(n: usize) -> S {
    if n % 2 == 0 {
        S::one()
    } else {
        -S::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn float_embedding() {
        let z = Complex64::from_exact(&"1/2-3/4i".parse().unwrap());
        assert_eq!(z, Complex64::new(0.5, -0.75));
        let w: Complex<f32> = Scalar::from_i64(3);
        assert_eq!(w, Complex::new(3.0f32, 0.0));
    }

    #[test]
    fn pow_and_sign() {
        let x = GaussianRational::from_parts(1, 1, 1, 1);
        assert_eq!(x.pow(4), GaussianRational::from(-4));
        assert_eq!(x.pow(0), GaussianRational::one());
        assert_eq!(sign::<GaussianRational>(3), GaussianRational::from(-1));
        assert!(Scalar::checked_inv(&GaussianRational::zero()).is_none());
    }
}
