//! Domain-wall partition function K_n and the partition-sum identities it
//! satisfies, plus the single-sum and row-stacking identities.

use crate::error::{Error, Result};
use crate::exactnum::{sign, Scalar, ScalarMatrix};
use crate::kernels::{shift_all, BetheConfig, Kernel, Kernels};
use crate::partitions::splits;
use crate::spectral::omega_components;
use crate::verdict::Verdict;

/// K_n(ū|v̄) = Δ′(ū)Δ(v̄)h(ū,v̄)·det t(uⱼ,vₖ). K₀ = 1.
pub fn dwpf<S: Scalar>(us: &[S], vs: &[S], k: &Kernels<S>) -> Result<S> {
    if us.len() != vs.len() {
        return Err(Error::CardinalityMismatch(format!("K_n needs |u| = |v|, got {} and {}", us.len(), vs.len())));
    }
    if us.is_empty() {
        return Ok(S::one());
    }
    let det = k.kernel_matrix(Kernel::T, us, vs)?.det()?;
    Ok(k.delta_prime(us)? * &k.delta(vs)? * &k.prod(Kernel::H, us, vs)? * &det)
}

fn cat<S: Clone>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().chain(b).cloned().collect()
}

/// Σ g(w̄_I,ū)g(w̄_II,v̄)g(w̄_II,w̄_I) = g(w̄,ū)g(w̄,v̄)/g(ū,v̄).
pub fn lemma_gg_check<S: Scalar>(ws: &[S], us: &[S], vs: &[S], k: &Kernels<S>) -> Result<Verdict> {
    check_sizes(ws, us, vs)?;
    let mut lhs = S::zero();
    for s in splits(ws.len(), us.len())? {
        let (w1, w2) = s.apply(ws);
        lhs = lhs
            + &(k.prod(Kernel::G, &w1, us)? * &k.prod(Kernel::G, &w2, vs)? * &k.prod(Kernel::G, &w2, &w1)?);
    }
    let rhs = k.prod(Kernel::G, ws, us)? * &k.prod(Kernel::G, ws, vs)? / k.prod(Kernel::G, us, vs)?;
    let mut v = Verdict::new("gg partition sum");
    v.check(|| format!("m1 = {}, m2 = {}", us.len(), vs.len()), &lhs, &rhs);
    Ok(v)
}

/// Σ K_{m₁}(w̄_I|ū)K_{m₂}(v̄|w̄_II)f(w̄_II,w̄_I) = (−1)^{m₁}f(w̄,ū)K_{m₁+m₂}({ū−c,v̄}|w̄).
pub fn lemma_kk_check<S: Scalar>(ws: &[S], us: &[S], vs: &[S], k: &Kernels<S>) -> Result<Verdict> {
    check_sizes(ws, us, vs)?;
    let mut lhs = S::zero();
    for s in splits(ws.len(), us.len())? {
        let (w1, w2) = s.apply(ws);
        lhs = lhs + &(dwpf(&w1, us, k)? * &dwpf(vs, &w2, k)? * &k.prod(Kernel::F, &w2, &w1)?);
    }
    let shifted = cat(&shift_all(us, &-k.c().clone()), vs);
    let rhs = sign::<S>(us.len()) * &k.prod(Kernel::F, ws, us)? * &dwpf(&shifted, ws, k)?;
    let mut v = Verdict::new("KK partition sum");
    v.check(|| format!("m1 = {}, m2 = {}", us.len(), vs.len()), &lhs, &rhs);
    Ok(v)
}

fn check_sizes<S>(ws: &[S], us: &[S], vs: &[S]) -> Result<()> {
    if ws.len() != us.len() + vs.len() {
        return Err(Error::CardinalityMismatch(format!(
            "|w| = {} but |u| + |v| = {}",
            ws.len(),
            us.len() + vs.len()
        )));
    }
    Ok(())
}

/// Σ over all splits of w̄ of K_m({w̄_I−c, w̄_II}|ξ̄)f(ξ̄,w̄_I)f(w̄_II,w̄_I)C₁(w̄_I)C₂(w̄_II)
/// against Δ′(ξ̄)Δ(w̄)·det[C₂(wₖ)t(wₖ,ξⱼ)h(wₖ,ξ̄) + (−1)^m C₁(wₖ)t(ξⱼ,wₖ)h(ξ̄,wₖ)].
/// `c1[k]`, `c2[k]` are the values at `ws[k]`.
pub fn lemma_longdet_check<S: Scalar>(ws: &[S], xis: &[S], c1: &[S], c2: &[S], k: &Kernels<S>) -> Result<Verdict> {
    let m = ws.len();
    if xis.len() != m || c1.len() != m || c2.len() != m {
        return Err(Error::CardinalityMismatch("w, xi, C1 and C2 must all have the same length".into()));
    }
    let lhs = longdet_sum(ws, xis, c1, c2, k)?;
    let rhs = longdet_det(ws, xis, c1, c2, k)?;
    let mut v = Verdict::new("long determinant");
    v.check(|| format!("m = {m}"), &lhs, &rhs);
    Ok(v)
}

pub(crate) fn longdet_sum<S: Scalar>(ws: &[S], xis: &[S], c1: &[S], c2: &[S], k: &Kernels<S>) -> Result<S> {
    let m = ws.len();
    let minus_c = -k.c().clone();
    let mut acc = S::zero();
    for n1 in 0..=m {
        for s in splits(m, n1)? {
            let weight: S = s.subset_i.iter().map(|&i| &c1[i]).chain(s.subset_ii.iter().map(|&i| &c2[i])).fold(
                S::one(),
                |acc, x| acc * x,
            );
            if weight.is_zero() {
                continue;
            }
            let (w1, w2) = s.apply(ws);
            let first = cat(&shift_all(&w1, &minus_c), &w2);
            acc = acc
                + &(weight
                    * &dwpf(&first, xis, k)?
                    * &k.prod(Kernel::F, xis, &w1)?
                    * &k.prod(Kernel::F, &w2, &w1)?);
        }
    }
    Ok(acc)
}

pub(crate) fn longdet_det<S: Scalar>(ws: &[S], xis: &[S], c1: &[S], c2: &[S], k: &Kernels<S>) -> Result<S> {
    let m = ws.len();
    let sgn = sign::<S>(m);
    let mat = ScalarMatrix::try_from_fn(m, m, |j, kk| {
        let w = &ws[kk];
        let a = c2[kk].clone() * &k.t(w, &xis[j])? * &k.prod1(Kernel::H, w, xis)?;
        let b = sgn.clone() * &c1[kk] * &k.t(&xis[j], w)? * &k.prod2(Kernel::H, xis, w)?;
        Ok(a + b)
    })?;
    Ok(k.delta_prime(xis)? * &k.delta(ws)? * &mat.det()?)
}

/// Σ over splits of x̄ with |x̄_I| = a of
/// g(x̄_II,x̄_I)Δ_a(x̄_I)det A(x̄_I)·Δ_b(x̄_II)det B(x̄_II) = Δ_{a+b}(x̄)·det(A over B).
/// `a_tab` is a×(a+b) with entry (j,k) = A_j(x_k); `b_tab` is b×(a+b).
pub fn row_stack_check<S: Scalar>(
    a_tab: &ScalarMatrix<S>,
    b_tab: &ScalarMatrix<S>,
    xs: &[S],
    k: &Kernels<S>,
) -> Result<Verdict> {
    let (a, b) = (a_tab.rows(), b_tab.rows());
    let n = xs.len();
    if a + b != n || a_tab.cols() != n || b_tab.cols() != n {
        return Err(Error::CardinalityMismatch(format!("row blocks {a}+{b} against {n} points")));
    }
    let mut lhs = S::zero();
    for s in splits(n, a)? {
        let (x1, x2) = s.apply(xs);
        let da = ScalarMatrix::from_fn(a, a, |j, kk| a_tab[(j, s.subset_i[kk])].clone()).det()?;
        let db = ScalarMatrix::from_fn(b, b, |j, kk| b_tab[(j, s.subset_ii[kk])].clone()).det()?;
        lhs = lhs + &(k.prod(Kernel::G, &x2, &x1)? * &k.delta(&x1)? * &da * &k.delta(&x2)? * &db);
    }
    let stacked =
        ScalarMatrix::from_fn(n, n, |j, kk| if j < a { a_tab[(j, kk)].clone() } else { b_tab[(j - a, kk)].clone() });
    let rhs = k.delta(xs)? * &stacked.det()?;
    let mut v = Verdict::new("row stacking");
    v.check(|| format!("a = {a}, b = {b}"), &lhs, &rhs);
    Ok(v)
}

/// The four Ω-weighted single sums, each checked at every point of x̄ and at
/// the extra `probes`. The g(x,v̄^C) sum is compared after multiplying
/// through by 1/g(x,v̄^C), so it also holds at x ∈ v̄^C.
pub fn single_sum_checks<S: Scalar>(cfg: &BetheConfig<S>, probes: &[S]) -> Result<Verdict> {
    let k = cfg.kernels();
    let (a, b) = (cfg.a(), cfg.b());
    let om = omega_components(cfg)?;
    let (om_u, om_v) = om.split_at(a);
    let mut v = Verdict::new("single sums");
    let points: Vec<S> = cfg.x_set().into_iter().chain(probes.iter().cloned()).collect();
    for (idx, x) in points.iter().enumerate() {
        let ctx = |which: &str| format!("{which} at point #{idx} = {x}");
        let on_vc = cfg.v_c.contains(x);

        // Σ t(u^C_j,x)Ω_j = h(ū^B,x)/h(ū^C,x) − g(x,ū^C)/g(x,ū^B)
        let mut lhs = S::zero();
        for j in 0..a {
            lhs = lhs + &(k.t(&cfg.u_c[j], x)? * &om_u[j]);
        }
        let g_ratio = k.prod1(Kernel::G, x, &cfg.u_c)? * &k.prod_inv_g(std::slice::from_ref(x), &cfg.u_b);
        let rhs = k.prod2(Kernel::H, &cfg.u_b, x)? / k.prod2(Kernel::H, &cfg.u_c, x)? - g_ratio.clone();
        v.check(|| ctx("sum t(uC,x) Omega"), &lhs, &rhs);

        // Σ t(x,u^C_j)Ω_j = g(x,ū^C)/g(x,ū^B) − h(x,ū^B)/h(x,ū^C)
        let mut lhs = S::zero();
        for j in 0..a {
            lhs = lhs + &(k.t(x, &cfg.u_c[j])? * &om_u[j]);
        }
        let rhs = g_ratio - k.prod1(Kernel::H, x, &cfg.u_b)? / k.prod1(Kernel::H, x, &cfg.u_c)?;
        v.check(|| ctx("sum t(x,uC) Omega"), &lhs, &rhs);

        // Σ g(x,v^C_j)Ω_{a+j} = g(x,v̄^C)/g(x,v̄^B) − 1, regularized by 1/g(x,v̄^C)
        let x1 = std::slice::from_ref(x);
        let mut lhs = S::zero();
        for j in 0..b {
            let others: Vec<S> = (0..b).filter(|&l| l != j).map(|l| cfg.v_c[l].clone()).collect();
            lhs = lhs + &(k.prod_inv_g(x1, &others) * &om_v[j]);
        }
        let rhs = k.prod_inv_g(x1, &cfg.v_b) - k.prod_inv_g(x1, &cfg.v_c);
        v.check(|| ctx("sum g(x,vC) Omega, regularized"), &lhs, &rhs);
        if !on_vc {
            let mut lhs = S::zero();
            for j in 0..b {
                lhs = lhs + &(k.g(x, &cfg.v_c[j])? * &om_v[j]);
            }
            let rhs = k.prod1(Kernel::G, x, &cfg.v_c)? * &k.prod_inv_g(x1, &cfg.v_b) - S::one();
            v.check(|| ctx("sum g(x,vC) Omega"), &lhs, &rhs);
            v.check(|| ctx("contour residue form"), &residue_form(x, &cfg.v_c, &cfg.v_b)?, &S::one());
        }

        // Σ Ω_{a+j}/h(v^C_j,x) = 1 − h(v̄^B,x)/h(v̄^C,x)
        let mut lhs = S::zero();
        for j in 0..b {
            lhs = lhs + &(om_v[j].clone() * &k.inv_h(&cfg.v_c[j], x)?);
        }
        let rhs = S::one() - k.prod2(Kernel::H, &cfg.v_b, x)? / k.prod2(Kernel::H, &cfg.v_c, x)?;
        v.check(|| ctx("sum Omega / h(vC,x)"), &lhs, &rhs);
    }
    Ok(v)
}

/// ∏(x−v^B_l)/(x−v^C_l) − Σⱼ 1/(x−v^C_j)·∏_l(v^C_j−v^B_l)/∏_{l≠j}(v^C_j−v^C_l),
/// which the residue theorem sets equal to 1.
fn residue_form<S: Scalar>(x: &S, vc: &[S], vb: &[S]) -> Result<S> {
    let inv = |d: S| d.checked_inv().ok_or(Error::DivisionByZero);
    let mut prod = S::one();
    for (c, b) in vc.iter().zip(vb) {
        prod = prod * &(x.clone() - b) * &inv(x.clone() - c)?;
    }
    let mut sum = S::zero();
    for (j, cj) in vc.iter().enumerate() {
        let mut term = inv(x.clone() - cj)?;
        for b in vb {
            term = term * &(cj.clone() - b);
        }
        for (l, cl) in vc.iter().enumerate() {
            if l != j {
                term = term * &inv(cj.clone() - cl)?;
            }
        }
        sum = sum + &term;
    }
    Ok(prod - sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::GaussianRational as Q;
    use crate::random::{random_config, random_points, random_values};
    use num_traits::{One, Zero};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(s: &str) -> Q {
        s.parse().unwrap()
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn k_small_cases() {
        let k = Kernels::new(q("1")).unwrap();
        assert_eq!(dwpf::<Q>(&[], &[], &k).unwrap(), Q::one());
        let (u, v) = (q("3/2+i"), q("-1/3"));
        assert_eq!(dwpf(&[u.clone()], &[v.clone()], &k).unwrap(), k.g(&u, &v).unwrap());
        // K₂({4,7}|{1,2}), c = 1, expanded by hand:
        // Δ′ = g(4,7) = −1/3, Δ = g(2,1) = 1, h(ū,v̄) = 4·3·7·6 = 504,
        // det t = t(4,1)t(7,2) − t(4,2)t(7,1) = (1/12)(1/30) − (1/6)(1/42) = −1/840.
        let val = dwpf(&[q("4"), q("7")], &[q("1"), q("2")], &k).unwrap();
        assert_eq!(val, q("-1/3") * q("504") * q("-1/840"));
        assert_eq!(val, q("1/5"));
        assert!(dwpf(&[q("1")], &[], &k).is_err());
    }

    #[test]
    fn k_symmetry_and_asymmetry() {
        let mut r = rng(7);
        for _ in 0..10 {
            let c = q("1/2+1/3i");
            let k = Kernels::new(c.clone()).unwrap();
            let pts = random_points(&mut r, 6, &c, 20, &[]);
            let (us, vs) = (&pts[..3], &pts[3..]);
            let base = dwpf(us, vs, &k).unwrap();
            let us_p = vec![us[2].clone(), us[0].clone(), us[1].clone()];
            let vs_p = vec![vs[1].clone(), vs[2].clone(), vs[0].clone()];
            assert_eq!(dwpf(&us_p, &vs_p, &k).unwrap(), base);
            assert_ne!(dwpf(&us[..2], &vs[..2], &k).unwrap(), dwpf(&vs[..2], &us[..2], &k).unwrap());
        }
    }

    #[test]
    fn lemmas_hold_on_random_inputs() {
        let mut r = rng(11);
        for trial in 0..15 {
            let c = random_values(&mut r, 1, 20)[0].clone();
            let k = Kernels::new(c.clone()).unwrap();
            let (m1, m2) = (trial % 3, (trial / 3) % 3);
            let pts = random_points(&mut r, 2 * (m1 + m2), &c, 20, &[]);
            let (ws, rest) = pts.split_at(m1 + m2);
            let (us, vs) = rest.split_at(m1);
            let v = lemma_gg_check(ws, us, vs, &k).unwrap();
            assert!(v.passed(), "{v}");
            let v = lemma_kk_check(ws, us, vs, &k).unwrap();
            assert!(v.passed(), "{v}");

            let m = trial % 4;
            let pts = random_points(&mut r, 2 * m, &c, 20, &[]);
            let c1 = random_values(&mut r, m, 20);
            let c2 = random_values(&mut r, m, 20);
            let v = lemma_longdet_check(&pts[..m], &pts[m..], &c1, &c2, &k).unwrap();
            assert!(v.passed(), "{v}");
        }
    }

    #[test]
    fn longdet_m1_c1_zero() {
        let k = Kernels::new(q("2/3")).unwrap();
        let (w, xi) = (q("1/5"), q("-2+i"));
        let c2 = q("7/3");
        assert_eq!(longdet_sum(&[w.clone()], &[xi.clone()], &[Q::zero()], &[c2.clone()], &k).unwrap(), c2.clone() * k.g(&w, &xi).unwrap());
        let v = lemma_longdet_check(&[w], &[xi], &[Q::zero()], &[c2], &k).unwrap();
        assert!(v.passed(), "{v}");
    }

    #[test]
    fn kk_m1_one_m2_zero_by_hand() {
        // K₁(w|u) = g(w,u) and −f(w,u)K₁(u−c|w) = −f(w,u)g(u−c,w) = g(w,u)
        let c = q("3/4");
        let k = Kernels::new(c.clone()).unwrap();
        let (w, u) = (q("2+i"), q("-1/7"));
        let rhs = -(k.f(&w, &u).unwrap() * k.g(&(u.clone() - c), &w).unwrap());
        assert_eq!(rhs, k.g(&w, &u).unwrap());
    }

    #[test]
    fn row_stack_random() {
        let mut r = rng(3);
        for (a, b) in [(1, 0), (0, 1), (1, 1), (2, 1), (2, 2), (1, 3)] {
            let c = q("1");
            let k = Kernels::new(c.clone()).unwrap();
            let xs = random_points(&mut r, a + b, &c, 20, &[]);
            let mut table = |rows: usize| {
                ScalarMatrix::from_fn(rows, a + b, |_, _| random_values(&mut r, 1, 20).remove(0))
            };
            let (at, bt) = (table(a), table(b));
            let v = row_stack_check(&at, &bt, &xs, &k).unwrap();
            assert!(v.passed(), "{v}");
        }
    }

    #[test]
    fn single_sums_random() {
        let mut r = rng(5);
        for (a, b) in [(1, 0), (0, 1), (1, 1), (2, 2), (3, 1), (2, 3)] {
            let cfg = random_config(&mut r, a, b, 20);
            let probes = random_points(&mut r, 2, &cfg.c, 20, &cfg.all_points());
            let v = single_sum_checks(&cfg, &probes).unwrap();
            assert!(v.passed(), "({a},{b}) {v}");
        }
    }

    #[test]
    fn single_sum_b1_by_hand() {
        // b = 1: g(x,v^C)Ω_{a+1} with Ω_{a+1} = 1/g(v^C,v^B) equals g(x,v^C)/g(x,v^B) − 1.
        let c = q("1");
        let k = Kernels::new(c).unwrap();
        let (x, vc, vb) = (q("1/3"), q("5/2"), q("-4"));
        let lhs = k.g(&x, &vc).unwrap() / k.g(&vc, &vb).unwrap();
        let rhs = k.g(&x, &vc).unwrap() / k.g(&x, &vb).unwrap() - Q::one();
        assert_eq!(lhs, rhs);
    }

}
