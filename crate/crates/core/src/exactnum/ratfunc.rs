//! Rational functions in one formal parameter ε with Gaussian-rational
//! coefficients. Limits ε → 0 and first derivatives at ε = 0 become exact
//! coefficient extraction.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{GaussianRational, Poly, Scalar};
use crate::error::{Error, Result};

/// `numerator / denominator`, kept reduced with a monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunctionEps {
    num: Poly,
    den: Poly,
}

impl RationalFunctionEps {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = Poly::gcd(&num, &den);
        let (num, den) = if g.degree() == Some(0) {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        let lc_inv = den.leading().unwrap().inv().unwrap();
        Self { num: num.scale(&lc_inv), den: den.scale(&lc_inv) }
    }

    pub fn from_poly(p: Poly) -> Self {
        Self { num: p, den: Poly::one() }
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    /// The formal parameter ε itself.
    pub fn eps() -> Self {
        Self::from_poly(Poly::x())
    }

    /// `a + b·ε`.
    pub fn linear(a: &GaussianRational, b: &GaussianRational) -> Self {
        Self::from_poly(Poly::new(vec![a.clone(), b.clone()]))
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self / rhs)
    }

    /// Value of the function at ε = 0.
    pub fn eval_at_eps_zero(&self) -> Result<GaussianRational> {
        let d0 = self.den.coeff(0);
        if d0.is_zero() {
            return Err(Error::PoleAtZero);
        }
        Ok(self.num.coeff(0) / d0)
    }

    /// Coefficient of ε in the Taylor expansion about 0, `(N′D − ND′)/D²` at 0.
    pub fn first_derivative_at_zero(&self) -> Result<GaussianRational> {
        let d0 = self.den.coeff(0);
        if d0.is_zero() {
            return Err(Error::PoleAtZero);
        }
        let (n0, n1, d1) = (self.num.coeff(0), self.num.coeff(1), self.den.coeff(1));
        Ok((n1 * &d0 - n0 * &d1) / (&d0 * &d0))
    }

    /// Evaluates at a concrete value of ε.
    pub fn eval(&self, eps: &GaussianRational) -> Result<GaussianRational> {
        let d = self.den.eval(eps);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.num.eval(eps) / d)
    }
}

impl Zero for RationalFunctionEps {
    fn zero() -> Self {
        Self { num: Poly::zero(), den: Poly::one() }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RationalFunctionEps {
    fn one() -> Self {
        Self { num: Poly::one(), den: Poly::one() }
    }
}

impl<'a> Add<&'a RationalFunctionEps> for &'a RationalFunctionEps {
    type Output = RationalFunctionEps;
    fn add(self, rhs: &RationalFunctionEps) -> RationalFunctionEps {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RationalFunctionEps::reduce(&self.num + &rhs.num, self.den.clone());
        }
        RationalFunctionEps::reduce(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl<'a> Sub<&'a RationalFunctionEps> for &'a RationalFunctionEps {
    type Output = RationalFunctionEps;
    fn sub(self, rhs: &RationalFunctionEps) -> RationalFunctionEps {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a RationalFunctionEps> for &'a RationalFunctionEps {
    type Output = RationalFunctionEps;
    fn mul(self, rhs: &RationalFunctionEps) -> RationalFunctionEps {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunctionEps::zero();
        }
        RationalFunctionEps::reduce(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

/// Panics on a zero divisor; see [`RationalFunctionEps::checked_div`].
impl<'a> Div<&'a RationalFunctionEps> for &'a RationalFunctionEps {
    type Output = RationalFunctionEps;
    fn div(self, rhs: &RationalFunctionEps) -> RationalFunctionEps {
        assert!(!rhs.is_zero(), "division of RationalFunctionEps by zero");
        if self.is_zero() {
            return RationalFunctionEps::zero();
        }
        RationalFunctionEps::reduce(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Neg for &RationalFunctionEps {
    type Output = RationalFunctionEps;
    fn neg(self) -> RationalFunctionEps {
        RationalFunctionEps { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RationalFunctionEps {
    type Output = RationalFunctionEps;
    fn neg(self) -> RationalFunctionEps {
        -&self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<RationalFunctionEps> for RationalFunctionEps {
            type Output = RationalFunctionEps;
            fn $method(self, rhs: RationalFunctionEps) -> RationalFunctionEps {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a RationalFunctionEps> for RationalFunctionEps {
            type Output = RationalFunctionEps;
            fn $method(self, rhs: &RationalFunctionEps) -> RationalFunctionEps {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Scalar for RationalFunctionEps {
    fn from_exact(x: &GaussianRational) -> Self {
        Self::constant(x.clone())
    }
}

impl fmt::Display for RationalFunctionEps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "[{}] / [{}]", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFunctionEps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
