//! Scalar products of semi-on-shell Bethe vectors: the partition-sum formula,
//! the constraints on r₁, r₃, and the determinant representation.

use crate::dwpf::{dwpf, longdet_sum};
use crate::error::{Error, Result};
use crate::exactnum::{sign, Scalar, ScalarMatrix};
use crate::highest::{z_eta_counted, z_omega_counted, ZArgs};
use crate::kernels::{shift_all, BetheConfig, Kernel, Kernels};
use crate::partitions::splits;
use crate::verdict::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    SemiOnShell,
    TwistedOnShell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Free,
    Constrained,
}

#[derive(Debug, Clone, PartialEq)]
pub struct REntry<S> {
    pub point: S,
    pub value: S,
    pub provenance: Provenance,
}

/// r₁ over ū^C ∪ ū^B and r₃ over v̄^C ∪ v̄^B, each value tagged free or
/// constrained. `varkappa` is the ϰ the constraints were imposed with.
#[derive(Debug, Clone, PartialEq)]
pub struct RAssignment<S> {
    pub variant: Variant,
    pub varkappa: S,
    pub r1_at: Vec<REntry<S>>,
    pub r3_at: Vec<REntry<S>>,
}

fn lookup<'a, S: Scalar>(tab: &'a [REntry<S>], function: &'static str, x: &S) -> Result<&'a S> {
    tab.iter()
        .find(|e| &e.point == x)
        .map(|e| &e.value)
        .ok_or_else(|| Error::MissingRValue { function, at: x.to_string() })
}

fn upsert<S: Scalar>(tab: &mut Vec<REntry<S>>, point: S, value: S, provenance: Provenance) {
    match tab.iter_mut().find(|e| e.point == point) {
        Some(e) => {
            e.value = value;
            e.provenance = provenance;
        }
        None => tab.push(REntry { point, value, provenance }),
    }
}

impl<S: Scalar> RAssignment<S> {
    pub fn r1(&self, x: &S) -> Result<S> {
        lookup(&self.r1_at, "r1", x).cloned()
    }

    pub fn r3(&self, x: &S) -> Result<S> {
        lookup(&self.r3_at, "r3", x).cloned()
    }

    pub fn set_r1(&mut self, point: S, value: S, provenance: Provenance) {
        upsert(&mut self.r1_at, point, value, provenance);
    }

    pub fn set_r3(&mut self, point: S, value: S, provenance: Provenance) {
        upsert(&mut self.r3_at, point, value, provenance);
    }

    fn provenance_of(tab: &[REntry<S>], x: &S) -> Option<Provenance> {
        tab.iter().find(|e| &e.point == x).map(|e| e.provenance)
    }

    /// ConstraintViolation unless every point the variant constrains is
    /// tagged constrained.
    pub fn require(&self, cfg: &BetheConfig<S>, variant: Variant) -> Result<()> {
        if variant == Variant::TwistedOnShell && self.variant != Variant::TwistedOnShell {
            return Err(Error::ConstraintViolation("twisted matrix requested for a semi-on-shell assignment".into()));
        }
        let mut need: Vec<(&'static str, &[S], &[REntry<S>])> =
            vec![("r1 at uC", &cfg.u_c, &self.r1_at), ("r3 at vB", &cfg.v_b, &self.r3_at)];
        if variant == Variant::TwistedOnShell {
            need.push(("r1 at uB", &cfg.u_b, &self.r1_at));
            need.push(("r3 at vC", &cfg.v_c, &self.r3_at));
        }
        for (what, pts, tab) in need {
            for p in pts {
                if Self::provenance_of(tab, p) != Some(Provenance::Constrained) {
                    return Err(Error::ConstraintViolation(format!("{what} = {p} is not constrained")));
                }
            }
        }
        Ok(())
    }
}

/// ∏_{k≠j} f(x_j,x_k)/f(x_k,x_j).
fn f_ratio_others<S: Scalar>(k: &Kernels<S>, xs: &[S], j: usize) -> Result<S> {
    let mut acc = S::one();
    for (l, y) in xs.iter().enumerate() {
        if l != j {
            acc = acc * &k.f(&xs[j], y)? * &k.inv_f(y, &xs[j])?;
        }
    }
    Ok(acc)
}

/// Imposes the semi-on-shell constraints (and, for the twisted variant, the
/// additional ones with ϰ = κ₂/κ₁). Remaining values are read from the
/// config tables.
pub fn apply_constraints<S: Scalar>(cfg: &BetheConfig<S>, variant: Variant) -> Result<RAssignment<S>> {
    let k = cfg.kernels();
    let kappa_inv = |x: &S| x.checked_inv().ok_or(Error::DivisionByZero);
    let varkappa = match variant {
        Variant::SemiOnShell => cfg.varkappa.clone(),
        Variant::TwistedOnShell => cfg.kappa[1].clone() * &kappa_inv(&cfg.kappa[0])?,
    };
    let mut r = RAssignment { variant, varkappa: varkappa.clone(), r1_at: Vec::new(), r3_at: Vec::new() };
    for (j, u) in cfg.u_c.iter().enumerate() {
        let v = varkappa.clone() * &f_ratio_others(&k, &cfg.u_c, j)? * &k.prod2(Kernel::F, &cfg.v_c, u)?;
        r.set_r1(u.clone(), v, Provenance::Constrained);
    }
    for v in &cfg.v_b {
        r.set_r3(v.clone(), k.prod1(Kernel::F, v, &cfg.u_b)?, Provenance::Constrained);
    }
    match variant {
        Variant::SemiOnShell => {
            for u in &cfg.u_b {
                r.set_r1(u.clone(), cfg.r1(u)?, Provenance::Free);
            }
            for v in &cfg.v_c {
                r.set_r3(v.clone(), cfg.r3(v)?, Provenance::Free);
            }
        }
        Variant::TwistedOnShell => {
            for (j, u) in cfg.u_b.iter().enumerate() {
                let val = f_ratio_others(&k, &cfg.u_b, j)? * &k.prod2(Kernel::F, &cfg.v_b, u)?;
                r.set_r1(u.clone(), val, Provenance::Constrained);
            }
            let k23 = cfg.kappa[1].clone() * &kappa_inv(&cfg.kappa[2])?;
            for v in &cfg.v_c {
                r.set_r3(v.clone(), k23.clone() * &k.prod1(Kernel::F, v, &cfg.u_c)?, Provenance::Constrained);
            }
        }
    }
    Ok(r)
}

fn prod_r<S: Scalar>(xs: &[S], f: impl Fn(&S) -> Result<S>) -> Result<S> {
    let mut acc = S::one();
    for x in xs {
        acc = acc * &f(x)?;
    }
    Ok(acc)
}

/// Which representation of the highest coefficient the sum formula uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZRep {
    Omega,
    Eta,
}

/// Term bookkeeping for one evaluation of the sum formula.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SumCounts {
    /// Four-fold splits visited.
    pub outer: u64,
    /// Terms summed inside the two highest coefficients, over all splits.
    pub inner: u64,
}

/// ΣC(a,k)²·ΣC(b,n)².
pub fn outer_term_count(a: usize, b: usize) -> u64 {
    let sq = |n: usize| (0..=n).map(|k| binom(n, k).pow(2)).sum::<u64>();
    sq(a) * sq(b)
}

/// Inner Z terms summed over all outer splits:
/// Σ C(a,k)²C(b,n)²·(C(a−k+n, n) + C(k+b−n, k)).
pub fn inner_term_count(a: usize, b: usize) -> u64 {
    let mut acc = 0;
    for k in 0..=a {
        for n in 0..=b {
            acc += binom(a, k).pow(2) * binom(b, n).pow(2) * (binom(a - k + n, n) + binom(k + b - n, k));
        }
    }
    acc
}

pub fn binom(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// The partition-sum formula for S_{a,b}. S_{0,0} = 1.
pub fn sum_formula<S: Scalar>(cfg: &BetheConfig<S>, r: &RAssignment<S>) -> Result<S> {
    sum_formula_counted(cfg, r, ZRep::Omega).map(|(v, _)| v)
}

/// [`sum_formula`] with the chosen Z representation and term counts.
pub fn sum_formula_counted<S: Scalar>(cfg: &BetheConfig<S>, r: &RAssignment<S>, rep: ZRep) -> Result<(S, SumCounts)> {
    sum_formula_budgeted(cfg, r, rep, &mut || false).map(|o| o.expect("never interrupted"))
}

/// Like [`sum_formula_counted`], polling `stop` between outer terms and
/// returning `None` once it answers true.
pub fn sum_formula_budgeted<S: Scalar>(
    cfg: &BetheConfig<S>,
    r: &RAssignment<S>,
    rep: ZRep,
    stop: &mut dyn FnMut() -> bool,
) -> Result<Option<(S, SumCounts)>> {
    let k = cfg.kernels();
    let (a, b) = (cfg.a(), cfg.b());
    let z = |args: ZArgs<S>| match rep {
        ZRep::Omega => z_omega_counted(&args, &k),
        ZRep::Eta => z_eta_counted(&args, &k),
    };
    let mut counts = SumCounts::default();
    let mut acc = S::zero();
    for kk in 0..=a {
        for n in 0..=b {
            for suc in splits(a, kk)? {
                let (uc1, uc2) = suc.apply(&cfg.u_c);
                let w_uc = prod_r(&uc2, |x| r.r1(x))? * &k.prod(Kernel::F, &uc1, &uc2)?;
                for sub in splits(a, kk)? {
                    let (ub1, ub2) = sub.apply(&cfg.u_b);
                    let w_ub = w_uc.clone()
                        * &prod_r(&ub1, |x| r.r1(x))?
                        * &k.prod(Kernel::F, &ub2, &ub1)?;
                    for svc in splits(b, n)? {
                        let (vc1, vc2) = svc.apply(&cfg.v_c);
                        let w_vc = w_ub.clone()
                            * &prod_r(&vc2, |x| r.r3(x))?
                            * &k.prod(Kernel::G, &vc1, &vc2)?
                            * &k.prod(Kernel::F, &vc1, &uc1)?;
                        for svb in splits(b, n)? {
                            if stop() {
                                return Ok(None);
                            }
                            let (vb1, vb2) = svb.apply(&cfg.v_b);
                            let (z1, n1) = z(ZArgs::new(uc2.clone(), ub2.clone(), vc1.clone(), vb1.clone())?)?;
                            let (z2, n2) = z(ZArgs::new(ub1.clone(), uc1.clone(), vb2.clone(), vc2.clone())?)?;
                            counts.outer += 1;
                            counts.inner += n1 + n2;
                            let term = w_vc.clone()
                                * &prod_r(&vb1, |x| r.r3(x))?
                                * &k.prod(Kernel::G, &vb2, &vb1)?
                                * &k.prod(Kernel::F, &vb2, &ub2)?
                                * &z1
                                * &z2;
                            acc = acc + &term;
                        }
                    }
                }
            }
        }
    }
    let den = k.prod_inv_f(&cfg.v_c, &cfg.u_c)? * &k.prod_inv_f(&cfg.v_b, &cfg.u_b)?;
    Ok(Some((acc * &den, counts)))
}

/// The assembled matrix 𝒩 with columns indexed by x̄ = {ū^B, v̄^C}.
#[derive(Debug, Clone, PartialEq)]
pub struct NMatrixSpec<S> {
    pub variant: Variant,
    pub x: Vec<S>,
    pub matrix: ScalarMatrix<S>,
}

fn without<S: Clone>(xs: &[S], j: usize) -> Vec<S> {
    xs.iter().enumerate().filter(|&(l, _)| l != j).map(|(_, x)| x.clone()).collect()
}

/// 𝒩 in the semi-on-shell form, or in the twisted form carrying κ̄
/// explicitly. Factors 1/f(v̄^C,x), 1/f(x,ū^B), 1/g(x,v̄^C) are built as
/// literal zeros and their r-values are never looked up there.
pub fn build_n<S: Scalar>(cfg: &BetheConfig<S>, r: &RAssignment<S>, variant: Variant) -> Result<NMatrixSpec<S>> {
    r.require(cfg, variant)?;
    let matrix = match variant {
        Variant::SemiOnShell => semi_matrix(cfg, r)?,
        Variant::TwistedOnShell => twisted_matrix(cfg, &cfg.kappa)?,
    };
    Ok(NMatrixSpec { variant, x: cfg.x_set(), matrix })
}

fn semi_matrix<S: Scalar>(cfg: &BetheConfig<S>, r: &RAssignment<S>) -> Result<ScalarMatrix<S>> {
    let k = cfg.kernels();
    let (a, b) = (cfg.a(), cfg.b());
    let x = cfg.x_set();
    let sgn: S = sign(a + 1);
    let inv_vk = r.varkappa.checked_inv().ok_or(Error::DivisionByZero)?;
    let mut m = ScalarMatrix::zeros(a + b, a + b);
    for (col, xk) in x.iter().enumerate() {
        let x1 = std::slice::from_ref(xk);
        let kill_vc = k.prod_inv_f(&cfg.v_c, x1)?;
        // (−1)^{a−1} r₁(x)/f(v̄^C,x), zero on v̄^C without reading r₁ there
        let r1_part = if kill_vc.is_zero() { S::zero() } else { sgn.clone() * &r.r1(xk)? * &kill_vc };
        let h_ucx = k.prod2(Kernel::H, &cfg.u_c, xk)?;
        let h_xuc = k.prod1(Kernel::H, xk, &cfg.u_c)?;
        let mut entries = Vec::with_capacity(a + b);
        for uj in &cfg.u_c {
            let first = if r1_part.is_zero() { S::zero() } else { r1_part.clone() * &k.t(uj, xk)? * &h_ucx };
            entries.push(first + &(r.varkappa.clone() * &k.t(xk, uj)? * &h_xuc));
        }
        let kill_ub = k.prod_inv_f(x1, &cfg.u_b)?;
        let phi = if kill_ub.is_zero() { S::one() } else { S::one() - r.r3(xk)? * &kill_ub };
        let pref = k.prod1(Kernel::G, xk, &cfg.v_b)? * &phi;
        let kill_g = k.prod_inv_g(x1, &cfg.v_c);
        let h_xub = k.prod1(Kernel::H, xk, &cfg.u_b)?;
        let second_common = if kill_g.is_zero() || r1_part.is_zero() {
            S::zero()
        } else {
            // r1_part already carries 1/f(v̄^C,x); undo it and use 1/f(v̄^B,x)
            sgn.clone()
                * &r.r1(xk)?
                * &kill_g
                * &k.prod2(Kernel::H, &cfg.u_b, xk)?
                * &k.prod_inv_f(&cfg.v_b, x1)?
                * &inv_vk
        };
        for (j, vj) in cfg.v_c.iter().enumerate() {
            let mut bracket = k.prod_inv_g(x1, &without(&cfg.v_c, j)) * &h_xub;
            if !second_common.is_zero() {
                bracket = bracket
                    + &(second_common.clone()
                        * &r.r3(vj)?
                        * &k.prod_inv_f(std::slice::from_ref(vj), &cfg.u_c)?
                        * &k.inv_h(vj, xk)?);
            }
            entries.push(pref.clone() * &bracket);
        }
        for (row, e) in entries.into_iter().enumerate() {
            m[(row, col)] = e;
        }
    }
    Ok(m)
}

/// Twisted 𝒩 at an explicit κ̄.
pub fn twisted_matrix<S: Scalar>(cfg: &BetheConfig<S>, kappa: &[S; 3]) -> Result<ScalarMatrix<S>> {
    let k = cfg.kernels();
    let (a, b) = (cfg.a(), cfg.b());
    let inv = |x: &S| x.checked_inv().ok_or(Error::DivisionByZero);
    let k21 = kappa[1].clone() * &inv(&kappa[0])?;
    let k23 = kappa[1].clone() * &inv(&kappa[2])?;
    let k13 = kappa[0].clone() * &inv(&kappa[2])?;
    let x = cfg.x_set();
    let mut m = ScalarMatrix::zeros(a + b, a + b);
    for (col, xk) in x.iter().enumerate() {
        let x1 = std::slice::from_ref(xk);
        let h_xub = k.prod1(Kernel::H, xk, &cfg.u_b)?;
        let lead = k.prod2(Kernel::F, &cfg.v_b, xk)?
            * &k.prod2(Kernel::H, &cfg.u_c, xk)?
            * &k.prod_inv_f(&cfg.v_c, x1)?
            * &h_xub
            / k.prod2(Kernel::H, &cfg.u_b, xk)?;
        let h_xuc = k.prod1(Kernel::H, xk, &cfg.u_c)?;
        for (j, uj) in cfg.u_c.iter().enumerate() {
            let first = if lead.is_zero() { S::zero() } else { lead.clone() * &k.t(uj, xk)? };
            m[(j, col)] = first + &(k21.clone() * &k.t(xk, uj)? * &h_xuc);
        }
        let phi = S::one() - k23.clone() * &k.prod1(Kernel::F, xk, &cfg.u_c)? * &k.prod_inv_f(x1, &cfg.u_b)?;
        let pref = h_xub * &k.prod1(Kernel::G, xk, &cfg.v_b)? * &phi;
        let kill_g = k.prod_inv_g(x1, &cfg.v_c);
        for (j, vj) in cfg.v_c.iter().enumerate() {
            let mut bracket = k.prod_inv_g(x1, &without(&cfg.v_c, j));
            if !kill_g.is_zero() {
                bracket = bracket + &(kill_g.clone() * &k13 * &k.inv_h(vj, xk)?);
            }
            m[(a + j, col)] = pref.clone() * &bracket;
        }
    }
    Ok(m)
}

/// Δ_{a+b}(x̄)·Δ′_a(ū^C)·Δ′_b(v̄^C)·det 𝒩.
pub fn det_rep<S: Scalar>(cfg: &BetheConfig<S>, r: &RAssignment<S>, variant: Variant) -> Result<S> {
    let n = build_n(cfg, r, variant)?;
    Ok(det_prefactor(cfg)? * &n.matrix.det()?)
}

/// det_rep of the twisted matrix at an explicit κ̄; needs no r-values.
pub fn det_rep_twisted<S: Scalar>(cfg: &BetheConfig<S>, kappa: &[S; 3]) -> Result<S> {
    Ok(det_prefactor(cfg)? * &twisted_matrix(cfg, kappa)?.det()?)
}

fn det_prefactor<S: Scalar>(cfg: &BetheConfig<S>) -> Result<S> {
    let k = cfg.kernels();
    Ok(k.delta(&cfg.x_set())? * &k.delta_prime(&cfg.u_c)? * &k.delta_prime(&cfg.v_c)?)
}

/// Semi-on-shell constraints imposed on the mirrored configuration, then
/// det_rep and sum_formula compared there. Also checks that the sum formula
/// itself is mirror symmetric for a common set of r-values.
pub fn swap_cb_check<S: Scalar>(cfg: &BetheConfig<S>) -> Result<Verdict> {
    let m = cfg.mirrored();
    let r = apply_constraints(&m, Variant::SemiOnShell)?;
    let mut v = Verdict::new("C/B swap");
    let s = sum_formula(&m, &r)?;
    v.check(|| "det_rep vs sum_formula on mirrored cfg".into(), &det_rep(&m, &r, Variant::SemiOnShell)?, &s);
    v.check(|| "sum_formula mirror symmetry".into(), &sum_formula(cfg, &r)?, &s);
    Ok(v)
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..(1 << n)).map(move |mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
}

/// Σ over V ⇒ {V_ii, V_iii} of (−1)^{#V_ii} r₃(V_ii)/f(V_ii, ū^B).
pub fn lv_sum<S: Scalar>(cfg: &BetheConfig<S>, r: &RAssignment<S>, vs: &[S]) -> Result<S> {
    let k = cfg.kernels();
    let mut acc = S::zero();
    for n in 0..=vs.len() {
        for sp in splits(vs.len(), n)? {
            let (ii, _) = sp.apply(vs);
            acc = acc + &(sign::<S>(n) * &prod_r(&ii, |x| r.r3(x))? * &k.prod_inv_f(&ii, &cfg.u_b)?);
        }
    }
    Ok(acc)
}

/// ∏(1 − r₃(v)/f(v, ū^B)).
pub fn lv_closed<S: Scalar>(cfg: &BetheConfig<S>, r: &RAssignment<S>, vs: &[S]) -> Result<S> {
    let k = cfg.kernels();
    prod_r(vs, |v| Ok(S::one() - r.r3(v)? * &k.prod_inv_f(std::slice::from_ref(v), &cfg.u_b)?))
}

fn r1_hat<S: Scalar>(cfg: &BetheConfig<S>, r: &RAssignment<S>, u: &S) -> Result<S> {
    let k = cfg.kernels();
    let j = cfg.u_b.iter().position(|x| x == u).expect("point of uB");
    let rest = without(&cfg.u_b, j);
    let u1 = std::slice::from_ref(u);
    Ok(r.r1(u)? * &k.prod(Kernel::F, &rest, u1)? * &k.prod_inv_f(u1, &rest)? * &k.prod_inv_f(&cfg.v_b, u1)?)
}

fn r3_hat<S: Scalar>(cfg: &BetheConfig<S>, r: &RAssignment<S>, v: &S) -> Result<S> {
    Ok(r.r3(v)? * &cfg.kernels().prod_inv_f(std::slice::from_ref(v), &cfg.u_c)?)
}

/// G(U|V) as a partition sum, U ⊂ ū^B, V ⊂ v̄^C.
pub fn g_sum<S: Scalar>(cfg: &BetheConfig<S>, r: &RAssignment<S>, us: &[S], vs: &[S]) -> Result<S> {
    let k = cfg.kernels();
    let n = us.len();
    let inv_vk = r.varkappa.checked_inv().ok_or(Error::DivisionByZero)?;
    let mut acc = S::zero();
    for ni in 0..=n {
        for su in splits(n, ni)? {
            let (ui, uiv) = su.apply(us);
            for sv in splits(n, ni)? {
                let (vi, viv) = sv.apply(vs);
                let term = inv_vk.pow(ni as u32)
                    * &prod_r(&vi, |v| r3_hat(cfg, r, v))?
                    * &prod_r(&ui, |u| r1_hat(cfg, r, u))?
                    * &k.prod(Kernel::G, &ui, &uiv)?
                    * &k.prod(Kernel::G, &viv, &vi)?
                    * &k.prod(Kernel::G, &uiv, &viv)?
                    * &k.prod_inv_h(&vi, &ui)?;
                acc = acc + &term;
            }
        }
    }
    Ok(acc)
}

/// Δ(V)Δ′(U)·det[g(U_k,V_j) + r̂₃(V_j)r̂₁(U_k)/(ϰ h(V_j,U_k))].
pub fn g_det<S: Scalar>(cfg: &BetheConfig<S>, r: &RAssignment<S>, us: &[S], vs: &[S]) -> Result<S> {
    let k = cfg.kernels();
    let n = us.len();
    let inv_vk = r.varkappa.checked_inv().ok_or(Error::DivisionByZero)?;
    let m = ScalarMatrix::try_from_fn(n, n, |j, kk| {
        Ok(k.g(&us[kk], &vs[j])? + &(r3_hat(cfg, r, &vs[j])? * &r1_hat(cfg, r, &us[kk])? * &inv_vk * &k.inv_h(&vs[j], &us[kk])?))
    })?;
    Ok(k.delta(vs)? * &k.delta_prime(us)? * &m.det()?)
}

/// ℒ^(u)(w̄|ū^C) as the partition sum over w̄ ∩ ū^B, with w̄ = {ub2, vc1}.
pub fn lu_sum<S: Scalar>(cfg: &BetheConfig<S>, r: &RAssignment<S>, ub2: &[S], vc1: &[S]) -> Result<S> {
    let k = cfg.kernels();
    let a = cfg.a();
    let mut acc = S::zero();
    for kii in 0..=ub2.len() {
        for sp in splits(ub2.len(), kii)? {
            let (ii, iii) = sp.apply(ub2);
            let args: Vec<S> = shift_all(&ii, &-k.c().clone()).into_iter().chain(vc1.iter().cloned()).chain(iii.iter().cloned()).collect();
            let term = dwpf(&args, &cfg.u_c, &k)?
                * &r.varkappa.pow((a - kii) as u32)
                * &sign::<S>(kii)
                * &prod_r(&ii, |x| r.r1(x))?
                * &k.prod_inv_f(&cfg.v_c, &ii)?
                * &k.prod(Kernel::F, &cfg.u_c, &ii)?
                * &k.prod(Kernel::F, &iii, &ii)?
                * &k.prod(Kernel::F, vc1, &ii)?;
            acc = acc + &term;
        }
    }
    Ok(acc)
}

/// Δ′_a(ū^C)Δ_a(w̄)·det ℳ.
pub fn lu_det<S: Scalar>(cfg: &BetheConfig<S>, r: &RAssignment<S>, ws: &[S]) -> Result<S> {
    let k = cfg.kernels();
    let a = cfg.a();
    let sgn: S = sign(a + 1);
    let m = ScalarMatrix::try_from_fn(a, a, |j, kk| {
        let w = &ws[kk];
        let w1 = std::slice::from_ref(w);
        let kill = k.prod_inv_f(&cfg.v_c, w1)?;
        let first = if kill.is_zero() {
            S::zero()
        } else {
            sgn.clone() * &r.r1(w)? * &kill * &k.t(&cfg.u_c[j], w)? * &k.prod2(Kernel::H, &cfg.u_c, w)?
        };
        Ok(first + &(r.varkappa.clone() * &k.t(w, &cfg.u_c[j])? * &k.prod1(Kernel::H, w, &cfg.u_c)?))
    })?;
    Ok(k.delta_prime(&cfg.u_c)? * &k.delta(ws)? * &m.det()?)
}

/// The same quantity through the generic longdet sum with
/// C₁(w) = −r₁(w)/f(v̄^C,w) and C₂ = ϰ.
fn lu_longdet<S: Scalar>(cfg: &BetheConfig<S>, r: &RAssignment<S>, ws: &[S]) -> Result<S> {
    let k = cfg.kernels();
    let mut c1 = Vec::with_capacity(ws.len());
    for w in ws {
        let kill = k.prod_inv_f(&cfg.v_c, std::slice::from_ref(w))?;
        c1.push(if kill.is_zero() { S::zero() } else { -(r.r1(w)? * &kill) });
    }
    let c2 = vec![r.varkappa.clone(); ws.len()];
    longdet_sum(ws, &cfg.u_c, &c1, &c2, &k)
}

/// The partly factorized form of S_{a,b} built from the partition sums of
/// G, ℒ^(u) and ℒ^(v).
pub fn sab_factorized<S: Scalar>(cfg: &BetheConfig<S>, r: &RAssignment<S>) -> Result<S> {
    let k = cfg.kernels();
    let (a, b) = (cfg.a(), cfg.b());
    let mut acc = S::zero();
    for ni in 0..=a.min(b) {
        for su in splits(a, ni)? {
            let (ub1, ub2) = su.apply(&cfg.u_b);
            for sv in splits(b, ni)? {
                let (vc1, vc2) = sv.apply(&cfg.v_c);
                let w: Vec<S> = ub2.iter().chain(&vc1).cloned().collect();
                let term = k.prod(Kernel::F, &ub1, &ub2)?
                    * &k.prod(Kernel::H, &ub1, &ub1)?
                    * &k.prod(Kernel::G, &vc2, &vc1)?
                    * &k.prod(Kernel::G, &cfg.v_b, &ub1)?
                    * &k.prod(Kernel::G, &cfg.v_b, &vc2)?
                    * &k.prod(Kernel::G, &vc2, &ub2)?
                    * &k.prod(Kernel::H, &vc2, &cfg.u_b)?
                    * &g_sum(cfg, r, &ub1, &vc1)?
                    * &lu_sum(cfg, r, &ub2, &vc1)?
                    * &lv_sum(cfg, r, &vc2)?;
                debug_assert_eq!(w.len(), a);
                acc = acc + &term;
            }
        }
    }
    Ok(sign::<S>(b) * &acc)
}

/// Intermediate identities of the determinant derivation: the ℒ^(v)
/// product, the G determinant, the ℒ^(u) determinant (also via the generic
/// longdet sum), and the partly factorized form against the sum formula.
pub fn derivation_checks<S: Scalar>(cfg: &BetheConfig<S>, r: &RAssignment<S>) -> Result<Verdict> {
    r.require(cfg, Variant::SemiOnShell)?;
    let (a, b) = (cfg.a(), cfg.b());
    let mut v = Verdict::new("derivation");
    for sub in subsets(b) {
        let vs: Vec<S> = sub.iter().map(|&i| cfg.v_c[i].clone()).collect();
        v.check(|| format!("Lv product on vC{sub:?}"), &lv_sum(cfg, r, &vs)?, &lv_closed(cfg, r, &vs)?);
    }
    for ni in 0..=a.min(b) {
        for su in splits(a, ni)? {
            let (ub1, ub2) = su.apply(&cfg.u_b);
            for sv in splits(b, ni)? {
                let (vc1, _) = sv.apply(&cfg.v_c);
                v.check(
                    || format!("G determinant on uB{:?}, vC{:?}", su.subset_i, sv.subset_i),
                    &g_sum(cfg, r, &ub1, &vc1)?,
                    &g_det(cfg, r, &ub1, &vc1)?,
                );
                let w: Vec<S> = ub2.iter().chain(&vc1).cloned().collect();
                let lu = lu_sum(cfg, r, &ub2, &vc1)?;
                let ctx = || format!("Lu on uB{:?}, vC{:?}", su.subset_ii, sv.subset_i);
                v.check(ctx, &lu, &lu_det(cfg, r, &w)?);
                v.check(|| format!("Lu longdet on uB{:?}, vC{:?}", su.subset_ii, sv.subset_i), &lu, &lu_longdet(cfg, r, &w)?);
            }
        }
    }
    v.check(|| "factorized form vs sum formula".into(), &sab_factorized(cfg, r)?, &sum_formula(cfg, r)?);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::GaussianRational as Q;
    use crate::random::random_config;
    use num_traits::{One, Zero};
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(s: &str) -> Q {
        s.parse().unwrap()
    }

    fn semi(cfg: &BetheConfig<Q>) -> RAssignment<Q> {
        apply_constraints(cfg, Variant::SemiOnShell).unwrap()
    }

    #[test]
    fn constraint_examples() {
        let mut cfg = BetheConfig::new(q("1"), vec![q("1/2")], vec![], vec![q("3")], vec![]).unwrap();
        cfg.varkappa = q("2+i");
        cfg.r1_table.insert(q("3"), q("5"), None);
        let r = semi(&cfg);
        assert_eq!(r.r1(&q("1/2")).unwrap(), q("2+i"));
        assert_eq!(r.r1(&q("3")).unwrap(), q("5"));

        let mut cfg = BetheConfig::new(q("1"), vec![q("0")], vec![q("7")], vec![q("3")], vec![q("11/2")]).unwrap();
        for p in cfg.all_points() {
            cfg.r1_table.insert(p.clone(), q("2"), None);
            cfg.r3_table.insert(p, q("3"), None);
        }
        let r = semi(&cfg);
        assert_eq!(r.r3(&q("11/2")).unwrap(), cfg.kernels().f(&q("11/2"), &q("3")).unwrap());
    }

    #[test]
    fn constraints_multiply_over_subsets() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cfg = random_config(&mut rng, 2, 1, 20);
        let r = semi(&cfg);
        let k = cfg.kernels();
        let prod = r.r1(&cfg.u_c[0]).unwrap() * &r.r1(&cfg.u_c[1]).unwrap();
        let rhs = cfg.varkappa.pow(2) * &k.prod(Kernel::F, &cfg.v_c, &cfg.u_c).unwrap();
        assert_eq!(prod, rhs);
    }

    #[test]
    fn missing_free_value() {
        let cfg = BetheConfig::new(q("1"), vec![q("0")], vec![], vec![q("3")], vec![]).unwrap();
        assert!(matches!(apply_constraints(&cfg, Variant::SemiOnShell), Err(Error::MissingRValue { .. })));
    }

    #[test]
    fn small_sum_formula_by_hand() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cfg = random_config(&mut rng, 0, 0, 20);
        assert_eq!(sum_formula(&cfg, &semi(&cfg)).unwrap(), Q::one());
        assert_eq!(det_rep(&cfg, &semi(&cfg), Variant::SemiOnShell).unwrap(), Q::one());

        let cfg = random_config(&mut rng, 1, 0, 20);
        let r = semi(&cfg);
        let k = cfg.kernels();
        let (uc, ub) = (&cfg.u_c[0], &cfg.u_b[0]);
        let hand = k.g(uc, ub).unwrap() * &(r.r1(ub).unwrap() - r.r1(uc).unwrap());
        assert_eq!(sum_formula(&cfg, &r).unwrap(), hand);
        assert_eq!(det_rep(&cfg, &r, Variant::SemiOnShell).unwrap(), hand);

        // a = 0, b = 1: the two terms n = 0, 1 expanded by hand
        let cfg = random_config(&mut rng, 0, 1, 20);
        let r = semi(&cfg);
        let k = cfg.kernels();
        let (vc, vb) = (&cfg.v_c[0], &cfg.v_b[0]);
        let hand = k.g(vb, vc).unwrap() * &(r.r3(vc).unwrap() - r.r3(vb).unwrap());
        assert_eq!(sum_formula(&cfg, &r).unwrap(), hand);
        assert_eq!(det_rep(&cfg, &r, Variant::SemiOnShell).unwrap(), hand);
    }

    #[test]
    fn term_counts_match_bookkeeping() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        assert_eq!(outer_term_count(3, 3), 400);
        assert_eq!(outer_term_count(2, 2), 36);
        for (a, b) in [(0, 0), (1, 2), (2, 2), (3, 1)] {
            let cfg = random_config(&mut rng, a, b, 20);
            let r = semi(&cfg);
            let (vo, co) = sum_formula_counted(&cfg, &r, ZRep::Omega).unwrap();
            let (ve, ce) = sum_formula_counted(&cfg, &r, ZRep::Eta).unwrap();
            assert_eq!(vo, ve);
            assert_eq!(co, ce);
            assert_eq!(co.outer, outer_term_count(a, b));
            assert_eq!(co.inner, inner_term_count(a, b));
        }
    }

    #[test]
    fn determinant_matches_sum_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for a in 0..=2 {
            for b in 0..=2 {
                for _ in 0..3 {
                    let cfg = random_config(&mut rng, a, b, 20);
                    let r = semi(&cfg);
                    assert_eq!(det_rep(&cfg, &r, Variant::SemiOnShell).unwrap(), sum_formula(&cfg, &r).unwrap(), "a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn twisted_matches_sum_and_semi() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (a, b) in [(0, 1), (1, 0), (1, 1), (2, 1), (1, 2), (2, 2)] {
            let cfg = random_config(&mut rng, a, b, 20);
            let r = apply_constraints(&cfg, Variant::TwistedOnShell).unwrap();
            let d = det_rep(&cfg, &r, Variant::TwistedOnShell).unwrap();
            assert_eq!(d, sum_formula(&cfg, &r).unwrap(), "a={a} b={b}");
            assert_eq!(d, det_rep(&cfg, &r, Variant::SemiOnShell).unwrap());
        }
    }

    #[test]
    fn provenance_is_enforced() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let cfg = random_config(&mut rng, 1, 1, 20);
        let r = semi(&cfg);
        assert!(matches!(build_n(&cfg, &r, Variant::TwistedOnShell), Err(Error::ConstraintViolation(_))));
        let mut bad = r.clone();
        bad.set_r1(cfg.u_c[0].clone(), q("1"), Provenance::Free);
        assert!(matches!(build_n(&cfg, &bad, Variant::SemiOnShell), Err(Error::ConstraintViolation(_))));
    }

    #[test]
    fn block_structure_and_audit() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let cfg = random_config(&mut rng, 2, 3, 20);
        let r = semi(&cfg);
        let n = build_n(&cfg, &r, Variant::SemiOnShell).unwrap();
        for j in 0..3 {
            for kk in 0..3 {
                if j != kk {
                    assert!(n.matrix[(2 + j, 2 + kk)].is_zero());
                }
            }
        }
        // garbage r₃ at ū^B and r₁ at v̄^C leave 𝒩 untouched
        let mut noisy = r.clone();
        for u in &cfg.u_b {
            noisy.set_r3(u.clone(), q("123/7"), Provenance::Free);
        }
        for v in &cfg.v_c {
            noisy.set_r1(v.clone(), q("-9+4i"), Provenance::Free);
        }
        assert_eq!(build_n(&cfg, &noisy, Variant::SemiOnShell).unwrap(), n);
        // and the assignment never holds those entries in the first place
        assert!(cfg.u_b.iter().all(|u| r.r3(u).is_err()));
        assert!(cfg.v_c.iter().all(|v| r.r1(v).is_err()));
    }

    #[test]
    fn single_entry_a0_b1() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cfg = random_config(&mut rng, 0, 1, 20);
        let r = semi(&cfg);
        let k = cfg.kernels();
        let (vc, vb) = (&cfg.v_c[0], &cfg.v_b[0]);
        let n = build_n(&cfg, &r, Variant::SemiOnShell).unwrap();
        assert_eq!(n.matrix[(0, 0)], k.g(vc, vb).unwrap() * &(Q::one() - r.r3(vc).unwrap()));
    }

    #[test]
    fn permutation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let cfg = random_config(&mut rng, 3, 2, 20);
        let r = semi(&cfg);
        let d = det_rep(&cfg, &r, Variant::SemiOnShell).unwrap();
        let mut p = cfg.clone();
        p.u_c.shuffle(&mut rng);
        p.u_c.reverse();
        p.v_c.reverse();
        p.u_b.swap(0, 2);
        p.v_b.reverse();
        let rp = semi(&p);
        assert_eq!(det_rep(&p, &rp, Variant::SemiOnShell).unwrap(), d);
    }

    #[test]
    fn mirror_and_derivation() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for (a, b) in [(0, 0), (1, 1), (2, 1), (1, 2), (2, 2)] {
            let cfg = random_config(&mut rng, a, b, 20);
            let v = swap_cb_check(&cfg).unwrap();
            assert!(v.passed(), "{v}");
            let v = derivation_checks(&cfg, &semi(&cfg)).unwrap();
            assert!(v.passed(), "a={a} b={b}: {v}");
        }
    }
}
