use num_traits::{One, Zero};

use super::{GaussianRational, Poly};
use crate::error::{Error, Result};

/// Unique polynomial `P` of degree ≤ 2n−1 with `P(xⱼ) = values[j]` and
/// `P′(xⱼ) = derivs[j]`, built from Newton divided differences on the doubled
/// node sequence.
pub fn hermite_interpolant(
    points: &[GaussianRational],
    values: &[GaussianRational],
    derivs: &[GaussianRational],
) -> Result<Poly> {
    let n = points.len();
    if values.len() != n || derivs.len() != n {
        return Err(Error::CardinalityMismatch(format!(
            "{} points, {} values, {} derivatives",
            n,
            values.len(),
            derivs.len()
        )));
    }
    for i in 0..n {
        for j in 0..i {
            if points[i] == points[j] {
                return Err(Error::DuplicatePoints);
            }
        }
    }
    if n == 0 {
        return Ok(Poly::zero());
    }

    let z: Vec<&GaussianRational> = points.iter().flat_map(|p| [p, p]).collect();
    let m = z.len();
    // Column-by-column divided differences; `col[i]` holds f[z_{i-j}..z_i].
    let mut col: Vec<GaussianRational> = values.iter().flat_map(|v| [v.clone(), v.clone()]).collect();
    let mut diag = vec![col[0].clone()];
    for j in 1..m {
        let mut next = vec![GaussianRational::zero(); m];
        for i in j..m {
            next[i] = if j == 1 && i % 2 == 1 {
                derivs[i / 2].clone()
            } else {
                (&col[i] - &col[i - 1]) / (z[i] - z[i - j])
            };
        }
        diag.push(next[j].clone());
        col = next;
    }

    // Newton form to monomial basis by nested multiplication.
    let mut poly = Poly::constant(diag[m - 1].clone());
    for k in (0..m - 1).rev() {
        let factor = Poly::new(vec![-z[k], GaussianRational::one()]);
        poly = &(&poly * &factor) + &Poly::constant(diag[k].clone());
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from(n)
    }

    #[test]
    fn flat_and_identity() {
        assert_eq!(hermite_interpolant(&[g(0)], &[g(1)], &[g(0)]).unwrap(), Poly::one());
        assert_eq!(hermite_interpolant(&[g(0)], &[g(0)], &[g(1)]).unwrap(), Poly::x());
    }

    /// Oracle: solve the 4x4 Hermite system for P(x) = c0 + c1 x + c2 x^2 + c3 x^3
    /// with P(0)=0, P(1)=1, P'(0)=1, P'(1)=1 by hand-written Gaussian elimination.
    #[test]
    fn two_point_cubic_against_linear_system() {
        // Rows: P(0), P'(0), P(1), P'(1); columns c0..c3.
        let mut a: Vec<Vec<GaussianRational>> = [
            [1, 0, 0, 0, 0],
            [0, 1, 0, 0, 1],
            [1, 1, 1, 1, 1],
            [0, 1, 2, 3, 1],
        ]
        .iter()
        .map(|r| r.iter().map(|&x| g(x)).collect())
        .collect();
        for col in 0..4 {
            let piv = (col..4).find(|&r| !a[r][col].is_zero()).unwrap();
            a.swap(col, piv);
            for r in 0..4 {
                if r != col && !a[r][col].is_zero() {
                    let f = &a[r][col] / &a[col][col];
                    for k in 0..5 {
                        let t = &f * &a[col][k];
                        a[r][k] = &a[r][k] - &t;
                    }
                }
            }
        }
        let coeffs: Vec<GaussianRational> = (0..4).map(|r| &a[r][4] / &a[r][r]).collect();
        let expected = Poly::new(coeffs);
        assert_eq!(expected, Poly::x());
        let p = hermite_interpolant(&[g(0), g(1)], &[g(0), g(1)], &[g(1), g(1)]).unwrap();
        assert_eq!(p, expected);
    }

    #[test]
    fn duplicate_points_rejected() {
        let r = hermite_interpolant(&[g(2), g(2)], &[g(0), g(1)], &[g(0), g(0)]);
        assert_eq!(r, Err(Error::DuplicatePoints));
    }

    fn arb_grat() -> impl Strategy<Value = GaussianRational> {
        (-9i64..9, 1i64..6, -9i64..9, 1i64..6)
            .prop_map(|(a, b, c, d)| GaussianRational::from_parts(a, b, c, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn reproduces_values_and_derivatives(
            data in proptest::collection::vec((arb_grat(), arb_grat(), arb_grat()), 1..5)
        ) {
            let mut pts: Vec<GaussianRational> = Vec::new();
            let (mut vals, mut ders) = (Vec::new(), Vec::new());
            for (p, v, d) in data {
                if !pts.contains(&p) {
                    pts.push(p);
                    vals.push(v);
                    ders.push(d);
                }
            }
            let poly = hermite_interpolant(&pts, &vals, &ders).unwrap();
            prop_assert!(poly.degree().map_or(true, |d| d < 2 * pts.len()));
            let dp = poly.derivative();
            for i in 0..pts.len() {
                prop_assert_eq!(poly.eval(&pts[i]), vals[i].clone());
                prop_assert_eq!(dp.eval(&pts[i]), ders[i].clone());
            }
        }
    }
}
