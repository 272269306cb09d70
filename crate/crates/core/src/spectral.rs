//! Orthogonality, on-shell norms and diagonal form factors.

use num_traits::One;

use crate::error::{Error, Result};
use crate::exactnum::{
    hermite_interpolant, sign, with_precision, GaussianRational, LaurentEps, Poly, RationalFunctionEps, Scalar, ScalarMatrix,
};
use crate::kernels::{BetheConfig, Kernel, Kernels};
use crate::scalar::{apply_constraints, det_rep, det_rep_twisted, sum_formula, twisted_matrix, Variant};
use crate::verdict::Verdict;

type Q = GaussianRational;
type Eps = RationalFunctionEps;

fn same_set<S: PartialEq>(xs: &[S], ys: &[S]) -> bool {
    xs.len() == ys.len() && xs.iter().all(|x| ys.contains(x))
}

fn without<S: Clone>(xs: &[S], j: usize) -> Vec<S> {
    xs.iter().enumerate().filter(|&(l, _)| l != j).map(|(_, x)| x.clone()).collect()
}

/// Ω_1..Ω_a (u-block) followed by Ω_{a+1}..Ω_{a+b} (v-block).
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaVector<S> {
    pub components: Vec<S>,
}

impl<S: Scalar> OmegaVector<S> {
    /// 1-based indices p with Ω_p ≠ 0.
    pub fn admissible(&self) -> Vec<usize> {
        self.components.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, _)| i + 1).collect()
    }
}

/// Ω_j = ∏_{k≠j} g(u^C_j,u^C_k)/g(u^C_j,ū^B), Ω_{a+j} likewise on the v side.
/// Coinciding points give zero components; fully coinciding states are a
/// pole.
pub fn omega<S: Scalar>(cfg: &BetheConfig<S>) -> Result<OmegaVector<S>> {
    if same_set(&cfg.u_c, &cfg.u_b) && same_set(&cfg.v_c, &cfg.v_b) {
        return Err(Error::Pole {
            kernel: "omega",
            left: "{uC, vC}".into(),
            right: "{uB, vB} (identical states)".into(),
        });
    }
    let k = cfg.kernels();
    let mut components = Vec::with_capacity(cfg.a() + cfg.b());
    for (xs, ys) in [(&cfg.u_c, &cfg.u_b), (&cfg.v_c, &cfg.v_b)] {
        for (j, x) in xs.iter().enumerate() {
            let x1 = std::slice::from_ref(x);
            components.push(k.prod(Kernel::G, x1, &without(xs, j))? * &k.prod_inv_g(x1, ys));
        }
    }
    Ok(OmegaVector { components })
}

pub fn omega_components<S: Scalar>(cfg: &BetheConfig<S>) -> Result<Vec<S>> {
    omega(cfg).map(|o| o.components)
}

struct ColumnRatios<S> {
    /// f(v̄^B,x)/f(v̄^C,x)
    fv: S,
    /// g(v̄^B,x)/g(v̄^C,x)
    gv: S,
    /// f(x,ū^C)/f(x,ū^B)
    fu: S,
    /// f(ū^C,x)/f(ū^B,x)
    fu_rev: S,
}

fn ratios<S: Scalar>(cfg: &BetheConfig<S>, x: &S) -> Result<ColumnRatios<S>> {
    let k = cfg.kernels();
    let x1 = std::slice::from_ref(x);
    Ok(ColumnRatios {
        fv: k.prod2(Kernel::F, &cfg.v_b, x)? * &k.prod_inv_f(&cfg.v_c, x1)?,
        gv: k.prod2(Kernel::G, &cfg.v_b, x)? * &k.prod_inv_g(&cfg.v_c, x1),
        fu: k.prod1(Kernel::F, x, &cfg.u_c)? * &k.prod_inv_f(x1, &cfg.u_b)?,
        fu_rev: k.prod2(Kernel::F, &cfg.u_c, x)? * &k.prod_inv_f(&cfg.u_b, x1)?,
    })
}

/// Row sums of the twisted 𝒩 weighted by Ω at the config's κ̄ (per column,
/// and at `probes` for the two block sums), then det 𝒩 = 0 at κ̄ = 1.
pub fn orthogonality_check<S: Scalar>(cfg: &BetheConfig<S>, probes: &[S]) -> Result<Verdict> {
    let k = cfg.kernels();
    let (a, b) = (cfg.a(), cfg.b());
    let om = omega_components(cfg)?;
    let inv = |x: &S| x.checked_inv().ok_or(Error::DivisionByZero);
    let [k1, k2, k3] = cfg.kappa.clone();
    let (k21, k23, k13) = (k2.clone() * &inv(&k1)?, k2.clone() * &inv(&k3)?, k1.clone() * &inv(&k3)?);
    let mut v = Verdict::new("orthogonality");

    // columns of 𝒩 first, then the probes
    let xs: Vec<S> = cfg.x_set().into_iter().chain(probes.iter().cloned()).collect();
    for (col, x) in xs.iter().enumerate() {
        let on_column = col < a + b;
        let h_xub = k.prod1(Kernel::H, x, &cfg.u_b)?;
        let rows = twisted_column(cfg, x, &cfg.kappa)?;
        let mut su = S::zero();
        for j in 0..a {
            su = su + &(rows[j].clone() * &om[j]);
        }
        let mut sv = S::zero();
        for j in 0..b {
            sv = sv + &(rows[a + j].clone() * &om[a + j]);
        }
        let (su, sv) = (su / h_xub.clone(), sv / h_xub);
        let r = ratios(cfg, x)?;
        let rhs_u = r.fv.clone() * &(S::one() - r.fu_rev.clone()) + &(k21.clone() * &(r.fu.clone() - S::one()));
        let phi = S::one() - k23.clone() * &r.fu;
        let rhs_v = phi
            * &((k13.clone() - S::one()) * &r.gv + &S::one() - k13.clone() * &r.fv);
        let ctx = |what: &str| format!("{what} at x #{col} = {x}");
        v.check(|| ctx("u-block row sum"), &su, &rhs_u);
        v.check(|| ctx("v-block row sum"), &sv, &rhs_v);
        if on_column {
            let tot = S::one() - k21.clone()
                + &((k13.clone() - S::one()) * &(r.gv.clone() - r.fv.clone()))
                + &(r.fu.clone() * &(k21.clone() - k23.clone()));
            v.check(|| ctx("total row sum"), &(su.clone() + &sv), &tot);
        }
    }
    let one = [S::one(), S::one(), S::one()];
    v.check(|| "det N at kappa = 1".into(), &twisted_matrix(cfg, &one)?.det()?, &S::zero());
    v.check(|| "det_rep at kappa = 1".into(), &det_rep_twisted(cfg, &one)?, &S::zero());
    Ok(v)
}

/// The twisted 𝒩 entries of one column at an arbitrary point x.
fn twisted_column<S: Scalar>(cfg: &BetheConfig<S>, x: &S, kappa: &[S; 3]) -> Result<Vec<S>> {
    let k = cfg.kernels();
    let x1 = std::slice::from_ref(x);
    let inv = |y: &S| y.checked_inv().ok_or(Error::DivisionByZero);
    let k21 = kappa[1].clone() * &inv(&kappa[0])?;
    let k23 = kappa[1].clone() * &inv(&kappa[2])?;
    let k13 = kappa[0].clone() * &inv(&kappa[2])?;
    let h_xub = k.prod1(Kernel::H, x, &cfg.u_b)?;
    let lead = k.prod2(Kernel::F, &cfg.v_b, x)?
        * &k.prod2(Kernel::H, &cfg.u_c, x)?
        * &k.prod_inv_f(&cfg.v_c, x1)?
        * &h_xub
        / k.prod2(Kernel::H, &cfg.u_b, x)?;
    let h_xuc = k.prod1(Kernel::H, x, &cfg.u_c)?;
    let mut out = Vec::with_capacity(cfg.a() + cfg.b());
    for uj in &cfg.u_c {
        let first = if lead.is_zero() { S::zero() } else { lead.clone() * &k.t(uj, x)? };
        out.push(first + &(k21.clone() * &k.t(x, uj)? * &h_xuc));
    }
    let phi = S::one() - k23 * &k.prod1(Kernel::F, x, &cfg.u_c)? * &k.prod_inv_f(x1, &cfg.u_b)?;
    let pref = h_xub * &k.prod1(Kernel::G, x, &cfg.v_b)? * &phi;
    let kill_g = k.prod_inv_g(x1, &cfg.v_c);
    for (j, vj) in cfg.v_c.iter().enumerate() {
        let mut bracket = k.prod_inv_g(x1, &without(&cfg.v_c, j));
        if !kill_g.is_zero() {
            bracket = bracket + &(kill_g.clone() * &k13 * &k.inv_h(vj, x)?);
        }
        out.push(pref.clone() * &bracket);
    }
    Ok(out)
}

/// The linearized Bethe-equation matrix 𝒩̂ with the r′/r data it was built
/// from.
#[derive(Debug, Clone, PartialEq)]
pub struct GaudinSpec<S> {
    pub matrix: ScalarMatrix<S>,
    pub r1_logderivs: Vec<S>,
    pub r3_logderivs: Vec<S>,
}

/// 𝒩̂ for roots (u, v) with r₁′/r₁ at u and r₃′/r₃ at v.
pub fn gaudin_matrix<S: Scalar>(u: &[S], v: &[S], r1_logderivs: &[S], r3_logderivs: &[S], c: &S) -> Result<GaudinSpec<S>> {
    let (a, b) = (u.len(), v.len());
    if r1_logderivs.len() != a || r3_logderivs.len() != b {
        return Err(Error::CardinalityMismatch(format!(
            "{a} u-roots with {} r1 log-derivatives, {b} v-roots with {} r3 log-derivatives",
            r1_logderivs.len(),
            r3_logderivs.len()
        )));
    }
    let k = Kernels::new(c.clone())?;
    let two_c2 = S::from_i64(2) * c * c;
    let coupling = |x: &S, y: &S| -> Result<S> {
        let d = x.clone() - y;
        let den = d.clone() * &d - c.clone() * c;
        if den.is_zero() || d.is_zero() {
            return Err(Error::Pole { kernel: "2c^2/(u^2-c^2)", left: x.to_string(), right: y.to_string() });
        }
        Ok(two_c2.clone() / den)
    };
    let m = ScalarMatrix::try_from_fn(a + b, a + b, |j, kk| match (j < a, kk < a) {
        (true, true) if j == kk => {
            let mut d = c.clone() * &r1_logderivs[kk];
            for (l, ul) in u.iter().enumerate() {
                if l != kk {
                    d = d + &coupling(&u[kk], ul)?;
                }
            }
            for vm in v {
                d = d - k.t(vm, &u[kk])?;
            }
            Ok(d)
        }
        (true, true) => Ok(-coupling(&u[kk], &u[j])?),
        (true, false) => k.t(&v[kk - a], &u[j]),
        (false, true) => Ok(-k.t(&v[j - a], &u[kk])?),
        (false, false) if j == kk => {
            let mut d = c.clone() * &r3_logderivs[kk - a];
            for ul in u {
                d = d + &k.t(&v[kk - a], ul)?;
            }
            Ok(d)
        }
        (false, false) => Ok(S::zero()),
    })?;
    Ok(GaudinSpec { matrix: m, r1_logderivs: r1_logderivs.to_vec(), r3_logderivs: r3_logderivs.to_vec() })
}

/// (−1)^{a+b}·f(v̄,ū)·∏_{j≠k}f(u_j,u_k)·∏_{j≠k}g(v_j,v_k)·det 𝒩̂.
pub fn norm_via_gaudin<S: Scalar>(u: &[S], v: &[S], r1_logderivs: &[S], r3_logderivs: &[S], c: &S) -> Result<S> {
    let k = Kernels::new(c.clone())?;
    let g = gaudin_matrix(u, v, r1_logderivs, r3_logderivs, c)?;
    let mut pref = sign::<S>(u.len() + v.len()) * &k.prod(Kernel::F, v, u)?;
    for (j, x) in u.iter().enumerate() {
        pref = pref * &k.prod1(Kernel::F, x, &without(u, j))?;
    }
    for (j, x) in v.iter().enumerate() {
        pref = pref * &k.prod1(Kernel::G, x, &without(v, j))?;
    }
    Ok(pref * &g.matrix.det()?)
}

/// On-shell r₁ values ∏_{k≠j} f(u_j,u_k)/f(u_k,u_j)·f(v̄,u_j) and r₃ values
/// f(v_j,ū) at ϰ = 1.
pub fn on_shell_values<S: Scalar>(u: &[S], v: &[S], c: &S) -> Result<(Vec<S>, Vec<S>)> {
    let k = Kernels::new(c.clone())?;
    let mut r1 = Vec::with_capacity(u.len());
    for (j, x) in u.iter().enumerate() {
        let mut acc = k.prod2(Kernel::F, v, x)?;
        for (l, y) in u.iter().enumerate() {
            if l != j {
                acc = acc * &k.f(x, y)? * &k.inv_f(y, x)?;
            }
        }
        r1.push(acc);
    }
    let mut r3 = Vec::with_capacity(v.len());
    for y in v {
        r3.push(k.prod1(Kernel::F, y, u)?);
    }
    Ok((r1, r3))
}

/// A straight-line approach ū^B = u + ε·du, v̄^C = v + ε·dv to the on-shell
/// point.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    pub du: Vec<Q>,
    pub dv: Vec<Q>,
}

/// Result of comparing the ε-limit of det_rep with the Gaudin norm.
#[derive(Debug, Clone, PartialEq)]
pub struct NormLimit {
    /// Gaudin norm with r′₁ = d, r′₃ = e.
    pub gaudin: Q,
    /// ε → 0 value of det_rep along each direction.
    pub limits: Vec<Q>,
    /// Limits against `gaudin`, and against each other.
    pub verdict: Verdict,
    /// Gaudin norm with the difference quotients of r₁, r₃ realised along
    /// each direction, constrained values included.
    pub effective: Vec<Q>,
    /// Limits against `effective`.
    pub effective_verdict: Verdict,
}

/// Fields of functions of ε in which the limit can be taken.
pub trait EpsField: Scalar {
    fn constant(c: Q) -> Self;
    fn linear(a: &Q, b: &Q) -> Self;
    fn value_at_zero(&self) -> Result<Q>;
}

impl EpsField for Eps {
    fn constant(c: Q) -> Self {
        Eps::constant(c)
    }
    fn linear(a: &Q, b: &Q) -> Self {
        Eps::linear(a, b)
    }
    fn value_at_zero(&self) -> Result<Q> {
        self.eval_at_eps_zero()
    }
}

impl EpsField for LaurentEps {
    fn constant(c: Q) -> Self {
        LaurentEps::constant(c)
    }
    fn linear(a: &Q, b: &Q) -> Self {
        LaurentEps::linear(a, b)
    }
    fn value_at_zero(&self) -> Result<Q> {
        self.eval_at_eps_zero()
    }
}

/// det_rep at ε → 0 on the family ū^C = u, v̄^B = v, ū^B = u + ε·du,
/// v̄^C = v + ε·dv with ϰ = 1, free values r₁(u^B_k) = R₁(u^B_k),
/// r₃(v^C_k) = R₃(v^C_k) and the constrained values exact in ε.
pub fn limit_along<S: EpsField>(u: &[Q], v: &[Q], c: &Q, dir: &Direction, big_r1: &Poly, big_r3: &Poly) -> Result<Q> {
    let lin = |xs: &[Q], ds: &[Q]| xs.iter().zip(ds).map(|(x, dx)| S::linear(x, dx)).collect::<Vec<_>>();
    let konst = |xs: &[Q]| xs.iter().cloned().map(S::constant).collect::<Vec<_>>();
    let mut cfg = BetheConfig::new(S::constant(c.clone()), konst(u), lin(v, &dir.dv), lin(u, &dir.du), konst(v))?;
    for p in cfg.u_b.clone() {
        let val = big_r1.eval(&p);
        cfg.r1_table.insert(p, val, None);
    }
    for p in cfg.v_c.clone() {
        let val = big_r3.eval(&p);
        cfg.r3_table.insert(p, val, None);
    }
    let r = apply_constraints(&cfg, Variant::SemiOnShell)?;
    det_rep(&cfg, &r, Variant::SemiOnShell)?.value_at_zero()
}

/// [`limit_along`] over truncated series, doubling the precision until the
/// value is certified.
pub fn limit_along_series(u: &[Q], v: &[Q], c: &Q, dir: &Direction, big_r1: &Poly, big_r3: &Poly) -> Result<Q> {
    let mut prec = 4 * (u.len() + v.len()) + 8;
    loop {
        match with_precision(prec, || limit_along::<LaurentEps>(u, v, c, dir, big_r1, big_r3)) {
            Err(Error::PrecisionExhausted) if prec < 1024 => prec *= 2,
            other => return other,
        }
    }
}

/// Takes the limit ū^B → ū^C = u, v̄^C → v̄^B = v of det_rep along each
/// direction, with r₁, r₃ near the roots given by Hermite interpolants with
/// derivatives `d` at u and `e` at v, and compares with [`norm_via_gaudin`].
pub fn norm_limit_check(u: &[Q], v: &[Q], c: &Q, directions: &[Direction], d: &[Q], e: &[Q]) -> Result<NormLimit> {
    let (a, b) = (u.len(), v.len());
    if d.len() != a || e.len() != b {
        return Err(Error::CardinalityMismatch(format!("{a} u-roots, {} d values; {b} v-roots, {} e values", d.len(), e.len())));
    }
    let k = Kernels::new(c.clone())?;
    let (r1v, r3v) = on_shell_values(u, v, c)?;
    let big_r1 = hermite_interpolant(u, &r1v, d)?;
    let big_r3 = hermite_interpolant(v, &r3v, e)?;
    let ratio = |x: &Q, y: &Q| -> Result<Q> { Ok(x.clone() * &y.inv()?) };
    let ld1 = d.iter().zip(&r1v).map(|(x, y)| ratio(x, y)).collect::<Result<Vec<_>>>()?;
    let ld3 = e.iter().zip(&r3v).map(|(x, y)| ratio(x, y)).collect::<Result<Vec<_>>>()?;
    let gaudin = norm_via_gaudin(u, v, &ld1, &ld3, c)?;
    let mut verdict = Verdict::new("norm limit");
    let mut effective_verdict = Verdict::new("norm limit, effective derivatives");
    let mut limits = Vec::with_capacity(directions.len());
    let mut effective = Vec::with_capacity(directions.len());
    for (n, dir) in directions.iter().enumerate() {
        if dir.du.len() != a || dir.dv.len() != b {
            return Err(Error::CardinalityMismatch(format!("direction #{n} has wrong length")));
        }
        if dir.du.iter().chain(&dir.dv).any(num_traits::Zero::is_zero) {
            return Err(Error::InvalidConfig(format!("direction #{n} has a zero component")));
        }
        let lim = limit_along_series(u, v, c, dir, &big_r1, &big_r3)?;
        verdict.check(|| format!("direction #{n} against Gaudin"), &lim, &gaudin);
        if let Some(first) = limits.first() {
            verdict.check(|| format!("direction #{n} against direction #0"), &lim, first);
        }
        // r₁(u^C_j) drifts by −ε·r₁Σ_m dv_m t(v_m,u_j)/c, r₃(v^B_j) by
        // ε·r₃Σ_l du_l t(v_j,u_l)/c
        let mut e1 = Vec::with_capacity(a);
        for j in 0..a {
            let mut s = Q::from(0);
            for m in 0..b {
                s += &(dir.dv[m].clone() * &k.t(&v[m], &u[j])?);
            }
            e1.push(ld1[j].clone() + &ratio(&s, &(c.clone() * &dir.du[j]))?);
        }
        let mut e3 = Vec::with_capacity(b);
        for j in 0..b {
            let mut s = Q::from(0);
            for l in 0..a {
                s += &(dir.du[l].clone() * &k.t(&v[j], &u[l])?);
            }
            e3.push(ld3[j].clone() - ratio(&s, &(c.clone() * &dir.dv[j]))?);
        }
        let eff = norm_via_gaudin(u, v, &e1, &e3, c)?;
        effective_verdict.check(|| format!("direction #{n}"), &lim, &eff);
        effective.push(eff);
        limits.push(lim);
    }
    Ok(NormLimit { gaudin, limits, verdict, effective, effective_verdict })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Var {
    U(usize),
    V(usize),
}

#[derive(Debug, Clone, Copy)]
enum LogTerm {
    R1(usize),
    R3(usize),
    F(Var, Var),
}

/// Φ as a signed sum of logarithms.
fn phi_terms(a: usize, b: usize, j: usize) -> Vec<(bool, LogTerm)> {
    let mut out = Vec::new();
    if j < a {
        out.push((true, LogTerm::R1(j)));
        for m in 0..b {
            out.push((false, LogTerm::F(Var::V(m), Var::U(j))));
        }
        for l in (0..a).filter(|&l| l != j) {
            out.push((true, LogTerm::F(Var::U(l), Var::U(j))));
            out.push((false, LogTerm::F(Var::U(j), Var::U(l))));
        }
    } else {
        let j = j - a;
        out.push((true, LogTerm::R3(j)));
        for l in 0..a {
            out.push((false, LogTerm::F(Var::V(j), Var::U(l))));
        }
    }
    out
}

/// Compares c·∂Φ_j/∂(u,v)_k, obtained by differentiating each logarithm,
/// and independently through the ε-field, with 𝒩̂.
pub fn jacobian_check(u: &[Q], v: &[Q], r1_logderivs: &[Q], r3_logderivs: &[Q], c: &Q) -> Result<Verdict> {
    let (a, b) = (u.len(), v.len());
    let gs = gaudin_matrix(u, v, r1_logderivs, r3_logderivs, c)?;
    let k = Kernels::new(c.clone())?;
    let val = |x: Var| match x {
        Var::U(i) => &u[i],
        Var::V(i) => &v[i],
    };
    let var_of = |col: usize| if col < a { Var::U(col) } else { Var::V(col - a) };
    let mut verdict = Verdict::new("jacobian");
    for j in 0..a + b {
        let terms = phi_terms(a, b, j);
        for col in 0..a + b {
            let w = var_of(col);
            let mut d = Q::from(0);
            for &(plus, term) in &terms {
                let t = match term {
                    LogTerm::R1(i) if w == Var::U(i) => c.clone() * &r1_logderivs[i],
                    LogTerm::R3(i) if w == Var::V(i) => c.clone() * &r3_logderivs[i],
                    LogTerm::F(x, y) if x == w && y != w => -k.t(val(x), val(y))?,
                    LogTerm::F(x, y) if y == w && x != w => k.t(val(x), val(y))?,
                    _ => Q::from(0),
                };
                d = if plus { d + &t } else { d - &t };
            }
            verdict.check(|| format!("analytic entry ({j}, {col})"), &d, &gs.matrix[(j, col)]);
        }
    }
    // ε route: r₁, r₃ as Hermite interpolants with value 1 and derivative r′/r
    let ones = |n: usize| vec![Q::from(1); n];
    let p1 = hermite_interpolant(u, &ones(a), r1_logderivs)?;
    let p3 = hermite_interpolant(v, &ones(b), r3_logderivs)?;
    let ke = Kernels::new(Eps::constant(c.clone()))?;
    for col in 0..a + b {
        let w = var_of(col);
        let lift = |x: Var| {
            let base = val(x).clone();
            if x == w {
                Eps::linear(&base, &Q::from(1))
            } else {
                Eps::constant(base)
            }
        };
        for j in 0..a + b {
            let mut num = Eps::one();
            for (plus, term) in phi_terms(a, b, j) {
                let t = match term {
                    LogTerm::R1(i) => p1.eval(&lift(Var::U(i))),
                    LogTerm::R3(i) => p3.eval(&lift(Var::V(i))),
                    LogTerm::F(x, y) => ke.f(&lift(x), &lift(y))?,
                };
                num = if plus { num * &t } else { num / t };
            }
            let dlog = num.first_derivative_at_zero()? / num.eval_at_eps_zero()?;
            verdict.check(|| format!("epsilon entry ({j}, {col})"), &(c.clone() * &dlog), &gs.matrix[(j, col)]);
        }
    }
    Ok(verdict)
}


/// 𝒩^{(i)} for the form factor 𝔉^{(i,i)} with pivot row p (1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct FormFactorSpec<S> {
    pub i: usize,
    pub p: usize,
    pub matrix: ScalarMatrix<S>,
}

fn check_index(i: usize) -> Result<()> {
    if !(1..=3).contains(&i) {
        return Err(Error::InvalidConfig(format!("form factor index i = {i}, expected 1, 2 or 3")));
    }
    Ok(())
}

/// Grading [1] = [2] = 0, [3] = 1.
pub fn grading(i: usize) -> usize {
    usize::from(i == 3)
}

pub fn formfactor_matrix<S: Scalar>(cfg: &BetheConfig<S>, i: usize, p: usize) -> Result<FormFactorSpec<S>> {
    check_index(i)?;
    let om = omega(cfg)?;
    let adm = om.admissible();
    if !adm.contains(&p) {
        return Err(Error::ZeroPivot { pivot: p, admissible: adm });
    }
    let k = cfg.kernels();
    let (a, b) = (cfg.a(), cfg.b());
    let x = cfg.x_set();
    let mut m = ScalarMatrix::zeros(a + b, a + b);
    for (col, xk) in x.iter().enumerate() {
        let x1 = std::slice::from_ref(xk);
        let r = ratios(cfg, xk)?;
        let lead = r.fv.clone() * &k.prod2(Kernel::H, &cfg.u_c, xk)? / k.prod2(Kernel::H, &cfg.u_b, xk)?;
        let tail = k.prod1(Kernel::H, xk, &cfg.u_c)? / k.prod1(Kernel::H, xk, &cfg.u_b)?;
        for (j, uj) in cfg.u_c.iter().enumerate() {
            let first = if lead.is_zero() { S::zero() } else { lead.clone() * &k.t(uj, xk)? };
            m[(j, col)] = first + &(k.t(xk, uj)? * &tail);
        }
        // −g(x,v̄^B)/g(x,v̄^C)·(1 − f(x,ū^C)/f(x,ū^B))·t(v^C_j,x), with
        // t(v,x)·(x−v)/c = −1/h(v,x) absorbing the pole at x = v^C_j
        let pref = k.prod1(Kernel::G, xk, &cfg.v_b)? * &(S::one() - r.fu.clone());
        for (j, vj) in cfg.v_c.iter().enumerate() {
            m[(a + j, col)] = pref.clone() * &k.prod_inv_g(x1, &without(&cfg.v_c, j)) * &k.inv_h(vj, xk)?;
        }
        let y1 = S::one() + &r.gv - r.fv.clone() - r.fu.clone();
        m[(p - 1, col)] = match i {
            1 => y1,
            2 => -S::one(),
            _ => y1 - S::one(),
        };
    }
    Ok(FormFactorSpec { i, p, matrix: m })
}

/// 𝔉^{(i,i)} = Ω_p⁻¹·f(v̄^C,ū^B)h(ū^B,ū^B)Δ′(ū^C)Δ(ū^B)Δ(v̄^C)Δ′(v̄^C)·det 𝒩^{(i)}.
pub fn formfactor_value<S: Scalar>(cfg: &BetheConfig<S>, i: usize, p: usize) -> Result<S> {
    let spec = formfactor_matrix(cfg, i, p)?;
    let k = cfg.kernels();
    let om = omega_components(cfg)?;
    let pref = om[p - 1].checked_inv().ok_or(Error::DivisionByZero)?
        * &k.prod(Kernel::F, &cfg.v_c, &cfg.u_b)?
        * &k.prod(Kernel::H, &cfg.u_b, &cfg.u_b)?
        * &k.delta_prime(&cfg.u_c)?
        * &k.delta(&cfg.u_b)?
        * &k.delta(&cfg.v_c)?
        * &k.delta_prime(&cfg.v_c)?;
    Ok(pref * &spec.matrix.det()?)
}

/// Smallest admissible pivot.
pub fn default_pivot<S: Scalar>(cfg: &BetheConfig<S>) -> Result<usize> {
    let adm = omega(cfg)?.admissible();
    adm.first().copied().ok_or(Error::ZeroPivot { pivot: 0, admissible: adm })
}

/// The κ_i-derivative of the twisted determinant (and of the twisted sum
/// formula) at κ̄ = 1 against 𝔉^{(i,i)} at every admissible pivot.
pub fn formfactor_derivative_check(cfg: &BetheConfig<Q>, i: usize) -> Result<Verdict> {
    check_index(i)?;
    let e = cfg.map(|x| Eps::constant(x.clone()));
    let mut kappa = [Eps::one(), Eps::one(), Eps::one()];
    kappa[i - 1] = Eps::linear(&Q::from(1), &Q::from(1));
    let e = e.with_kappa(kappa.clone());
    let sgn: Q = sign(grading(i));
    let from_det = sgn.clone() * &det_rep_twisted(&e, &kappa)?.first_derivative_at_zero()?;
    let r = apply_constraints(&e, Variant::TwistedOnShell)?;
    let from_sum = sgn * &sum_formula(&e, &r)?.first_derivative_at_zero()?;
    let mut v = Verdict::new(format!("form factor F{i}{i}"));
    v.check(|| "sum formula vs determinant derivative".into(), &from_sum, &from_det);
    for p in omega(cfg)?.admissible() {
        v.check(|| format!("pivot {p}"), &formfactor_value(cfg, i, p)?, &from_det);
    }
    Ok(v)
}

/// Row structure of 𝒩^{(i)} and 𝔉^{(11)} + 𝔉^{(22)} − 𝔉^{(33)} = 0.
pub fn supertrace_check<S: Scalar>(cfg: &BetheConfig<S>) -> Result<Verdict> {
    let p = default_pivot(cfg)?;
    let specs = [formfactor_matrix(cfg, 1, p)?, formfactor_matrix(cfg, 2, p)?, formfactor_matrix(cfg, 3, p)?];
    let n = cfg.a() + cfg.b();
    let mut v = Verdict::new("supertrace");
    for col in 0..n {
        for row in (0..n).filter(|&r| r != p - 1) {
            v.check(|| format!("row {row} shared, column {col}"), &specs[0].matrix[(row, col)], &specs[2].matrix[(row, col)]);
            v.check(|| format!("row {row} shared, column {col}"), &specs[1].matrix[(row, col)], &specs[2].matrix[(row, col)]);
        }
        v.check(|| format!("N2 pivot row, column {col}"), &specs[1].matrix[(p - 1, col)], &-S::one());
        let sum = specs[0].matrix[(p - 1, col)].clone() + &specs[1].matrix[(p - 1, col)];
        v.check(|| format!("N3 = N1 + N2 pivot row, column {col}"), &specs[2].matrix[(p - 1, col)], &sum);
    }
    let f = |i| formfactor_value(cfg, i, p);
    v.check(|| "F11 + F22 - F33".into(), &(f(1)? + &f(2)? - f(3)?), &S::zero());
    Ok(v)
}
