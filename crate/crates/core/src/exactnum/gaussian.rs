//! Gaussian rationals: complex numbers whose real and imaginary parts are
//! arbitrary-precision rationals.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::qops;
use crate::error::{Error, Result};

/// Exact complex number `re + im·i` over the rationals.
///
/// `BigRational` keeps both parts reduced with a positive denominator, so
/// structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Self { re, im: BigRational::zero() }
    }

    /// `num/den + 0i`. Panics if `den == 0`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::real(BigRational::new(num.into(), den.into()))
    }

    /// `(re_num/re_den) + (im_num/im_den)·i`.
    pub fn from_parts(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        Self::new(
            BigRational::new(re_num.into(), re_den.into()),
            BigRational::new(im_num.into(), im_den.into()),
        )
    }

    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }

    /// `|z|²`, always rational.
    pub fn norm_sqr(&self) -> BigRational {
        qops::add(&qops::mul(&self.re, &self.re), &qops::mul(&self.im, &self.im))
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.im.is_zero() {
            return Ok(Self::real(self.re.recip()));
        }
        let n = self.norm_sqr().recip();
        Ok(Self::new(qops::mul(&self.re, &n), -qops::mul(&self.im, &n)))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    /// Largest absolute numerator or denominator among both parts; a rough
    /// measure of the size of the number.
    pub fn height(&self) -> BigInt {
        [self.re.numer(), self.re.denom(), self.im.numer(), self.im.denom()]
            .into_iter()
            .map(|x| x.abs())
            .max()
            .unwrap_or_default()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        (self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        Self::real(BigRational::from_integer(n.into()))
    }
}

impl From<BigRational> for GaussianRational {
    fn from(r: BigRational) -> Self {
        Self::real(r)
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::real(BigRational::one())
    }
}

impl Neg for GaussianRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-&self.re, -&self.im)
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(qops::add(&self.re, &rhs.re), qops::add(&self.im, &rhs.im))
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(qops::sub(&self.re, &rhs.re), qops::sub(&self.im, &rhs.im))
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        use qops::{add, mul, sub};
        if self.im.is_zero() {
            return GaussianRational::new(mul(&self.re, &rhs.re), mul(&self.re, &rhs.im));
        }
        if rhs.im.is_zero() {
            return GaussianRational::new(mul(&self.re, &rhs.re), mul(&self.im, &rhs.re));
        }
        GaussianRational::new(
            sub(&mul(&self.re, &rhs.re), &mul(&self.im, &rhs.im)),
            add(&mul(&self.re, &rhs.im), &mul(&self.im, &rhs.re)),
        )
    }
}

/// Panics on a zero divisor, like `BigRational`; use
/// [`GaussianRational::checked_div`] where the divisor may vanish.
impl<'a> Div<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        if rhs.im.is_zero() {
            assert!(!rhs.re.is_zero(), "division of GaussianRational by zero");
            let inv = rhs.re.recip();
            return GaussianRational::new(qops::mul(&self.re, &inv), qops::mul(&self.im, &inv));
        }
        self.checked_div(rhs).expect("division of GaussianRational by zero")
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: &GaussianRational) -> GaussianRational {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<GaussianRational> for &'a GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re = qops::add(&self.re, &rhs.re);
        self.im = qops::add(&self.im, &rhs.im);
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re = qops::sub(&self.re, &rhs.re);
        self.im = qops::sub(&self.im, &rhs.im);
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, rhs: &GaussianRational) {
        *self = &*self * rhs;
    }
}

impl std::iter::Sum for GaussianRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| acc + x)
    }
}

impl std::iter::Product for GaussianRational {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::one(), |acc, x| acc * x)
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, r: &BigRational) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text form: `p/q`, `p/qi`, or `p/q+r/si` (integers drop the
/// `/1`). Parsing this output yields the same value.
impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write_rational(f, &self.re);
        }
        if !self.re.is_zero() {
            write_rational(f, &self.re)?;
            if !self.im.is_negative() {
                f.write_str("+")?;
            }
        }
        write_rational(f, &self.im)?;
        f.write_str("i")
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn parse_rational(s: &str, whole: &str) -> Result<BigRational> {
    let err = || Error::Parse(format!("malformed rational {whole:?}"));
    let (sign, body) = match s.as_bytes().first() {
        Some(b'-') => (-1, &s[1..]),
        Some(b'+') => (1, &s[1..]),
        _ => (1, s),
    };
    let is_digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    let value = match body.split_once('/') {
        Some((n, d)) => {
            if !is_digits(n) || !is_digits(d) {
                return Err(err());
            }
            let n: BigInt = n.parse().map_err(|_| err())?;
            let d: BigInt = d.parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {whole:?}")));
            }
            BigRational::new(n, d)
        }
        None => {
            if !is_digits(body) {
                return Err(err());
            }
            BigRational::from_integer(body.parse().map_err(|_| err())?)
        }
    };
    Ok(if sign < 0 { -value } else { value })
}

impl FromStr for GaussianRational {
    type Err = Error;

    /// Accepts `p`, `p/q`, `p/qi`, `i`, `-i`, `p/q+r/si`, `p/q-r/si` with
    /// optional leading signs and surrounding whitespace.
    fn from_str(input: &str) -> Result<Self> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty rational".into()));
        }
        let Some(body) = s.strip_suffix('i') else {
            return Ok(Self::real(parse_rational(&s, input)?));
        };
        // Split at the last sign that is not the leading one.
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, ch)| ch == '+' || ch == '-')
            .map(|(idx, _)| idx)
            .last();
        let (re_part, im_part) = match split {
            Some(idx) => (&body[..idx], &body[idx..]),
            None => ("", body),
        };
        let im = match im_part {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            other => parse_rational(other, input)?,
        };
        let re = if re_part.is_empty() {
            BigRational::zero()
        } else {
            parse_rational(re_part, input)?
        };
        Ok(Self::new(re, im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    #[test]
    fn basic_arithmetic() {
        assert_eq!(g("1") + g("i"), g("1+1i"));
        assert_eq!(g("1+i") * g("1-i"), g("2"));
        assert_eq!(g("3/2") / g("1/2"), g("3"));
        assert_eq!(-g("1/2-3i"), g("-1/2+3i"));
        assert_eq!(g("2+i").inv().unwrap() * g("2+i"), GaussianRational::one());
    }

    #[test]
    fn division_by_zero_is_reported() {
        assert!(matches!(GaussianRational::zero().inv(), Err(Error::DivisionByZero)));
        assert!(g("1").checked_div(&GaussianRational::zero()).is_err());
    }

    #[test]
    fn parse_forms() {
        assert_eq!(g("-3/2+1/4i"), GaussianRational::from_parts(-3, 2, 1, 4));
        assert_eq!(g("i"), GaussianRational::i());
        assert_eq!(g("-i"), -GaussianRational::i());
        assert_eq!(g("2-i"), GaussianRational::from_parts(2, 1, -1, 1));
        assert_eq!(g("+4/6"), GaussianRational::from_ratio(2, 3));
        assert_eq!(g("-5/3i"), GaussianRational::from_parts(0, 1, -5, 3));
        assert_eq!(g(" 1 / 2 "), GaussianRational::from_ratio(1, 2));
    }

    #[test]
    fn parse_rejects_garbage() {
        for bad in ["3//2", "", "1/0", "abc", "1+", "1/2/3", "ii", "1.5"] {
            assert!(bad.parse::<GaussianRational>().is_err(), "{bad:?} accepted");
        }
    }

    #[test]
    fn display_forms() {
        assert_eq!(g("-3/2+1/4i").to_string(), "-3/2+1/4i");
        assert_eq!(g("2/4").to_string(), "1/2");
        assert_eq!(g("-i").to_string(), "-1i");
        assert_eq!(g("1-2/3i").to_string(), "1-2/3i");
    }

    fn arb_grat() -> impl Strategy<Value = GaussianRational> {
        (-50i64..50, 1i64..30, -50i64..50, 1i64..30)
            .prop_map(|(a, b, c, d)| GaussianRational::from_parts(a, b, c, d))
    }

    proptest! {
        #[test]
        fn text_round_trip(x in arb_grat()) {
            prop_assert_eq!(x.to_string().parse::<GaussianRational>().unwrap(), x);
        }

        #[test]
        fn field_axioms(a in arb_grat(), b in arb_grat(), c in arb_grat()) {
            prop_assert_eq!((&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &a * &b + &a * &c);
            prop_assert_eq!(&a * &b, &b * &a);
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inv().unwrap(), GaussianRational::one());
            }
        }
    }
}
