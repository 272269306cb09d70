//! Truncated Laurent series in ε with exact coefficients. Every value
//! carries the order from which its terms are unknown, so extracted
//! coefficients are either certified or reported as lost.

use std::cell::Cell;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{GaussianRational, Scalar};
use crate::error::{Error, Result};

type Q = GaussianRational;

const LOST: i64 = i64::MIN / 4;

thread_local! {
    static REL_PREC: Cell<usize> = const { Cell::new(16) };
}

/// Runs `f` with `n` terms kept when inverting a series that is not a
/// monomial.
pub fn with_precision<T>(n: usize, f: impl FnOnce() -> T) -> T {
    let old = REL_PREC.with(|p| p.replace(n.max(1)));
    let out = f();
    REL_PREC.with(|p| p.set(old));
    out
}

/// Σ coeffs[k]·ε^{val+k} + O(ε^prec); `prec == None` means the sum is exact.
#[derive(Clone, PartialEq)]
pub struct LaurentEps {
    val: i64,
    coeffs: Vec<Q>,
    prec: Option<i64>,
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) | (None, x) => x,
    }
}

impl LaurentEps {
    fn build(val: i64, mut coeffs: Vec<Q>, prec: Option<i64>) -> Self {
        let mut val = val;
        if let Some(p) = prec {
            coeffs.truncate((p - val).max(0) as usize);
        }
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        coeffs.drain(..lead);
        val += lead as i64;
        if prec.is_none() {
            while coeffs.last().is_some_and(|c| c.is_zero()) {
                coeffs.pop();
            }
        }
        if coeffs.is_empty() {
            val = 0;
        }
        Self { val, coeffs, prec: prec.map(|p| p.max(LOST)) }
    }

    pub fn constant(c: Q) -> Self {
        Self::build(0, vec![c], None)
    }

    /// `a + b·ε`.
    pub fn linear(a: &Q, b: &Q) -> Self {
        Self::build(0, vec![a.clone(), b.clone()], None)
    }

    pub fn eps() -> Self {
        Self::build(1, vec![Q::one()], None)
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// Smallest order that is not certified, or `None` if exact.
    pub fn precision(&self) -> Option<i64> {
        self.prec
    }

    fn effective_val(&self) -> i64 {
        if self.coeffs.is_empty() {
            self.prec.unwrap_or(0)
        } else {
            self.val
        }
    }

    /// Certified coefficient of ε^n.
    pub fn coeff(&self, n: i64) -> Result<Q> {
        if self.prec.is_some_and(|p| p <= n) {
            return Err(Error::PrecisionExhausted);
        }
        let i = n - self.val;
        if self.coeffs.is_empty() || i < 0 || i as usize >= self.coeffs.len() {
            return Ok(Q::zero());
        }
        Ok(self.coeffs[i as usize].clone())
    }

    pub fn eval_at_eps_zero(&self) -> Result<Q> {
        if !self.coeffs.is_empty() && self.val < 0 {
            return Err(Error::PoleAtZero);
        }
        self.coeff(0)
    }

    pub fn first_derivative_at_zero(&self) -> Result<Q> {
        if !self.coeffs.is_empty() && self.val < 0 {
            return Err(Error::PoleAtZero);
        }
        self.coeff(1)
    }

    fn inv_series(&self) -> Self {
        assert!(!self.is_zero(), "division of LaurentEps by zero");
        if self.coeffs.is_empty() {
            return Self::build(0, Vec::new(), Some(LOST));
        }
        let c0_inv = self.coeffs[0].inv().expect("leading coefficient is nonzero");
        if self.prec.is_none() && self.coeffs.len() == 1 {
            return Self::build(-self.val, vec![c0_inv], None);
        }
        let rel = match self.prec {
            Some(p) => (p - self.val) as usize,
            None => REL_PREC.with(Cell::get),
        };
        let mut out: Vec<Q> = Vec::with_capacity(rel);
        out.push(c0_inv.clone());
        for n in 1..rel {
            let mut s = Q::zero();
            for k in 1..=n.min(self.coeffs.len() - 1) {
                s += &(&self.coeffs[k] * &out[n - k]);
            }
            out.push(-(s * &c0_inv));
        }
        Self::build(-self.val, out, Some(-self.val + rel as i64))
    }
}

impl Zero for LaurentEps {
    fn zero() -> Self {
        Self { val: 0, coeffs: Vec::new(), prec: None }
    }
    /// True only for an exact zero.
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.prec.is_none()
    }
}

impl One for LaurentEps {
    fn one() -> Self {
        Self::constant(Q::one())
    }
}

impl<'a> Add<&'a LaurentEps> for &'a LaurentEps {
    type Output = LaurentEps;
    fn add(self, rhs: &LaurentEps) -> LaurentEps {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let prec = min_prec(self.prec, rhs.prec);
        let terms: Vec<&LaurentEps> = [self, rhs].into_iter().filter(|x| !x.coeffs.is_empty()).collect();
        let Some(lo) = terms.iter().map(|x| x.val).min() else {
            return LaurentEps::build(0, Vec::new(), prec);
        };
        let mut hi = terms.iter().map(|x| x.val + x.coeffs.len() as i64).max().unwrap();
        if let Some(p) = prec {
            hi = hi.min(p);
        }
        let mut out = vec![Q::zero(); (hi - lo).max(0) as usize];
        for x in terms {
            for (k, c) in x.coeffs.iter().enumerate() {
                let i = x.val + k as i64 - lo;
                if (i as usize) < out.len() {
                    out[i as usize] += c;
                }
            }
        }
        LaurentEps::build(lo, out, prec)
    }
}

impl<'a> Mul<&'a LaurentEps> for &'a LaurentEps {
    type Output = LaurentEps;
    fn mul(self, rhs: &LaurentEps) -> LaurentEps {
        if self.is_zero() || rhs.is_zero() {
            return LaurentEps::zero();
        }
        let prec = min_prec(self.prec.map(|p| p + rhs.effective_val()), rhs.prec.map(|p| p + self.effective_val()));
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return LaurentEps::build(0, Vec::new(), prec);
        }
        let val = self.val + rhs.val;
        let mut len = self.coeffs.len() + rhs.coeffs.len() - 1;
        if let Some(p) = prec {
            len = len.min((p - val).max(0) as usize);
        }
        let mut out = vec![Q::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            for (j, b) in rhs.coeffs.iter().enumerate().take(len - i) {
                out[i + j] += &(a * b);
            }
        }
        LaurentEps::build(val, out, prec)
    }
}

impl<'a> Sub<&'a LaurentEps> for &'a LaurentEps {
    type Output = LaurentEps;
    fn sub(self, rhs: &LaurentEps) -> LaurentEps {
        self + &(-rhs)
    }
}

/// Panics on an exact zero divisor.
impl<'a> Div<&'a LaurentEps> for &'a LaurentEps {
    type Output = LaurentEps;
    fn div(self, rhs: &LaurentEps) -> LaurentEps {
        self * &rhs.inv_series()
    }
}

impl Neg for &LaurentEps {
    type Output = LaurentEps;
    fn neg(self) -> LaurentEps {
        LaurentEps { val: self.val, coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(), prec: self.prec }
    }
}

impl Neg for LaurentEps {
    type Output = LaurentEps;
    fn neg(self) -> LaurentEps {
        -&self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<LaurentEps> for LaurentEps {
            type Output = LaurentEps;
            fn $method(self, rhs: LaurentEps) -> LaurentEps {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a LaurentEps> for LaurentEps {
            type Output = LaurentEps;
            fn $method(self, rhs: &LaurentEps) -> LaurentEps {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Scalar for LaurentEps {
    fn from_exact(x: &Q) -> Self {
        Self::constant(x.clone())
    }
}

impl fmt::Display for LaurentEps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match self.val + k as i64 {
                0 => format!("({c})"),
                e => format!("({c})e^{e}"),
            })
            .collect();
        if let Some(p) = self.prec {
            parts.push(format!("O(e^{p})"));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for LaurentEps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::RationalFunctionEps;

    fn q(s: &str) -> Q {
        s.parse().unwrap()
    }

    #[test]
    fn exact_polynomials_stay_exact() {
        let x = LaurentEps::linear(&q("2"), &q("3"));
        let y = &x * &x - LaurentEps::constant(q("4"));
        assert!(y.is_exact());
        assert_eq!(y.coeff(1).unwrap(), q("12"));
        assert_eq!(y.coeff(2).unwrap(), q("9"));
        assert!((&x - &x).is_zero());
    }

    #[test]
    fn inverse_series_and_poles() {
        let e = LaurentEps::eps();
        let one_plus = LaurentEps::linear(&q("1"), &q("1"));
        let inv = with_precision(5, || LaurentEps::one() / one_plus.clone());
        for n in 0..5 {
            assert_eq!(inv.coeff(n).unwrap(), if n % 2 == 0 { q("1") } else { q("-1") });
        }
        assert_eq!(inv.coeff(5), Err(Error::PrecisionExhausted));
        let pole = LaurentEps::one() / e.clone();
        assert_eq!(pole.eval_at_eps_zero(), Err(Error::PoleAtZero));
        assert_eq!((pole * &e).eval_at_eps_zero().unwrap(), q("1"));
    }

    #[test]
    fn cancellation_reduces_precision() {
        let one_plus = LaurentEps::linear(&q("1"), &q("1"));
        let inv = with_precision(3, || LaurentEps::one() / one_plus);
        // (1/(1+ε) − 1)/ε = −1 + ε + O(ε²)
        let d = (inv - LaurentEps::one()) / LaurentEps::eps();
        assert_eq!(d.coeff(0).unwrap(), q("-1"));
        assert_eq!(d.coeff(1).unwrap(), q("1"));
        assert_eq!(d.coeff(2), Err(Error::PrecisionExhausted));
    }

    #[test]
    fn agrees_with_rational_functions() {
        let (a, b, c) = (q("3/2+i"), q("-2"), q("1/5-2i"));
        let lf = |x: &Q, y: &Q| LaurentEps::linear(x, y);
        let rf = |x: &Q, y: &Q| RationalFunctionEps::linear(x, y);
        let l = with_precision(12, || (lf(&a, &b) * lf(&c, &a) - lf(&b, &c)) / (lf(&q("0"), &c) * lf(&b, &a)));
        let r = (rf(&a, &b) * rf(&c, &a) - rf(&b, &c)) / (rf(&q("0"), &c) * rf(&b, &a));
        assert_eq!(l.eval_at_eps_zero(), r.eval_at_eps_zero());
        let series = |x: &RationalFunctionEps| {
            let mut v = Vec::new();
            let mut cur = x.clone() * RationalFunctionEps::eps();
            for _ in 0..4 {
                let c0 = cur.eval_at_eps_zero().unwrap();
                v.push(c0.clone());
                cur = (cur - RationalFunctionEps::constant(c0)) / RationalFunctionEps::eps();
            }
            v
        };
        let want = series(&r);
        for (n, w) in want.iter().enumerate() {
            assert_eq!(&l.coeff(n as i64 - 1).unwrap(), w);
        }
    }
}
