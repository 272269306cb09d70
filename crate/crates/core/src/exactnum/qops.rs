//! Reduced rational arithmetic with a Euclidean gcd. The cross-reduction in
//! a product usually pairs a large accumulator with a small kernel factor,
//! where one long division settles the gcd.

use dashu_int::ops::Gcd;
use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Operands above this many bits go to dashu's gcd.
const LARGE_BITS: u64 = 512;

fn gcd_mag(a: &BigUint, b: &BigUint) -> BigUint {
    if a.bits().min(b.bits()) > LARGE_BITS {
        let conv = |x: &BigUint| dashu_int::UBig::from_le_bytes(&x.to_bytes_le());
        return BigUint::from_bytes_le(&conv(a).gcd(&conv(b)).to_le_bytes());
    }
    let (mut x, mut y) = if a >= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    while !y.is_zero() {
        if let Some(small) = y.to_u64() {
            let rest = (&x % &y).to_u64().expect("remainder below a u64");
            return BigUint::from(gcd_u64(small, rest));
        }
        let r = &x % &y;
        x = y;
        y = r;
    }
    x
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    BigInt::from_biguint(Sign::Plus, gcd_mag(a.magnitude(), b.magnitude()))
}

/// Exact quotient by a positive divisor, skipping the division by one.
fn div_exact(a: &BigInt, g: &BigInt) -> BigInt {
    if g.is_one() {
        a.clone()
    } else {
        a / g
    }
}

pub(crate) fn mul(a: &BigRational, b: &BigRational) -> BigRational {
    if a.is_zero() || b.is_zero() {
        return BigRational::zero();
    }
    let g1 = gcd(a.numer(), b.denom());
    let g2 = gcd(b.numer(), a.denom());
    let num = div_exact(a.numer(), &g1) * div_exact(b.numer(), &g2);
    let den = div_exact(a.denom(), &g2) * div_exact(b.denom(), &g1);
    BigRational::new_raw(num, den)
}

pub(crate) fn add(a: &BigRational, b: &BigRational) -> BigRational {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    let (ad, bd) = (a.denom(), b.denom());
    let g = gcd(ad, bd);
    if g.is_one() {
        return BigRational::new_raw(a.numer() * bd + b.numer() * ad, ad * bd);
    }
    let (ad_g, bd_g) = (ad / &g, bd / &g);
    let t = a.numer() * &bd_g + b.numer() * &ad_g;
    if t.is_zero() {
        return BigRational::zero();
    }
    let g2 = gcd(&t, &g);
    BigRational::new_raw(div_exact(&t, &g2), ad_g * div_exact(bd, &g2))
}

pub(crate) fn sub(a: &BigRational, b: &BigRational) -> BigRational {
    add(a, &-b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn large_gcd() {
        let p = BigUint::from(1_000_003u64).pow(60);
        let a = &p * BigUint::from(6u32).pow(300);
        let b = &p * BigUint::from(35u32).pow(300);
        assert_eq!(gcd_mag(&a, &b), p);
    }

    proptest! {
        #[test]
        fn matches_num_rational(a in -500i64..500, b in 1i64..500, c in -500i64..500, d in 1i64..500,
                                e in -9i64..9, f in 1i64..9) {
            let (x, y) = (r(a, b) * r(e, f).pow(7), r(c, d));
            prop_assert_eq!(mul(&x, &y), &x * &y);
            prop_assert_eq!(add(&x, &y), &x + &y);
            prop_assert_eq!(sub(&x, &y), &x - &y);
        }
    }
}
