//! Elementary rational kernels g, f, h, t, their set-product shorthand,
//! Vandermonde-type prefactors, Cauchy determinants, and the twisted
//! transfer-matrix eigenvalue.
//!
//! Only the ratios r₁ = λ₁/λ₂ and r₃ = λ₃/λ₂ are ever represented; every
//! eigenvalue is normalized by λ₂.

use std::ops::Deref;


use crate::error::{Error, Result};
use crate::exactnum::{Scalar, ScalarMatrix};
use crate::verdict::Verdict;

/// The four elementary kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    /// g(u,v) = c/(u−v)
    G,
    /// f(u,v) = (u−v+c)/(u−v)
    F,
    /// h(u,v) = (u−v+c)/c
    H,
    /// t(u,v) = c²/((u−v)(u−v+c))
    T,
}

impl Kernel {
    pub fn name(self) -> &'static str {
        match self {
            Kernel::G => "g",
            Kernel::F => "f",
            Kernel::H => "h",
            Kernel::T => "t",
        }
    }
}

fn pole<S: Scalar>(kernel: &'static str, u: &S, v: &S) -> Error {
    Error::Pole { kernel, left: u.to_string(), right: v.to_string() }
}

/// Kernel evaluator bound to a crossing constant `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernels<S> {
    c: S,
}

impl<S: Scalar> Kernels<S> {
    pub fn new(c: S) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::InvalidConfig("crossing constant c must be nonzero".into()));
        }
        Ok(Self { c })
    }

    pub fn c(&self) -> &S {
        &self.c
    }

    pub fn g(&self, u: &S, v: &S) -> Result<S> {
        let d = u.clone() - v;
        if d.is_zero() {
            return Err(pole("g", u, v));
        }
        Ok(self.c.clone() / d)
    }

    pub fn f(&self, u: &S, v: &S) -> Result<S> {
        let d = u.clone() - v;
        if d.is_zero() {
            return Err(pole("f", u, v));
        }
        Ok((d.clone() + &self.c) / d)
    }

    pub fn h(&self, u: &S, v: &S) -> Result<S> {
        Ok((u.clone() - v + &self.c) / &self.c)
    }

    pub fn t(&self, u: &S, v: &S) -> Result<S> {
        let d = u.clone() - v;
        let e = d.clone() + &self.c;
        if d.is_zero() || e.is_zero() {
            return Err(pole("t", u, v));
        }
        Ok(self.c.clone() * &self.c / (d * e))
    }

    pub fn eval(&self, kernel: Kernel, u: &S, v: &S) -> Result<S> {
        match kernel {
            Kernel::G => self.g(u, v),
            Kernel::F => self.f(u, v),
            Kernel::H => self.h(u, v),
            Kernel::T => self.t(u, v),
        }
    }

    /// 1/g(u,v) = (u−v)/c; vanishes at u = v instead of being singular.
    pub fn inv_g(&self, u: &S, v: &S) -> S {
        (u.clone() - v) / &self.c
    }

    /// 1/f(u,v) = (u−v)/(u−v+c); vanishes at u = v.
    pub fn inv_f(&self, u: &S, v: &S) -> Result<S> {
        let d = u.clone() - v;
        let e = d.clone() + &self.c;
        if e.is_zero() {
            return Err(pole("1/f", u, v));
        }
        Ok(d / e)
    }

    /// 1/h(u,v) = c/(u−v+c).
    pub fn inv_h(&self, u: &S, v: &S) -> Result<S> {
        let e = u.clone() - v + &self.c;
        if e.is_zero() {
            return Err(pole("1/h", u, v));
        }
        Ok(self.c.clone() / e)
    }

    /// Shorthand product `k(x̄, ȳ) = ∏ⱼ ∏ₖ k(xⱼ, yₖ)`; empty sets give 1.
    pub fn prod(&self, kernel: Kernel, xs: &[S], ys: &[S]) -> Result<S> {
        let mut acc = S::one();
        for x in xs {
            for y in ys {
                acc = acc * &self.eval(kernel, x, y)?;
            }
        }
        Ok(acc)
    }

    /// `k(x, ȳ)` for a single point.
    pub fn prod1(&self, kernel: Kernel, x: &S, ys: &[S]) -> Result<S> {
        self.prod(kernel, std::slice::from_ref(x), ys)
    }

    /// `k(x̄, y)` for a single point.
    pub fn prod2(&self, kernel: Kernel, xs: &[S], y: &S) -> Result<S> {
        self.prod(kernel, xs, std::slice::from_ref(y))
    }

    /// `1/g(x̄, ȳ)`, zero as soon as the sets share a point.
    pub fn prod_inv_g(&self, xs: &[S], ys: &[S]) -> S {
        let mut acc = S::one();
        for x in xs {
            for y in ys {
                acc = acc * &self.inv_g(x, y);
            }
        }
        acc
    }

    /// `1/f(x̄, ȳ)`, zero as soon as the sets share a point.
    pub fn prod_inv_f(&self, xs: &[S], ys: &[S]) -> Result<S> {
        let mut acc = S::one();
        for x in xs {
            for y in ys {
                acc = acc * &self.inv_f(x, y)?;
            }
        }
        Ok(acc)
    }

    /// `1/h(x̄, ȳ)`.
    pub fn prod_inv_h(&self, xs: &[S], ys: &[S]) -> Result<S> {
        let mut acc = S::one();
        for x in xs {
            for y in ys {
                acc = acc * &self.inv_h(x, y)?;
            }
        }
        Ok(acc)
    }

    /// Δ′ₙ(x̄) = ∏_{j<k} g(xⱼ, xₖ).
    pub fn delta_prime(&self, xs: &[S]) -> Result<S> {
        let mut acc = S::one();
        for j in 0..xs.len() {
            for k in j + 1..xs.len() {
                acc = acc * &self.g(&xs[j], &xs[k])?;
            }
        }
        Ok(acc)
    }

    /// Δₙ(x̄) = ∏_{j>k} g(xⱼ, xₖ).
    pub fn delta(&self, xs: &[S]) -> Result<S> {
        let mut acc = S::one();
        for j in 0..xs.len() {
            for k in 0..j {
                acc = acc * &self.g(&xs[j], &xs[k])?;
            }
        }
        Ok(acc)
    }

    /// Matrix `[k(uⱼ, vₖ)]`.
    pub fn kernel_matrix(&self, kernel: Kernel, us: &[S], vs: &[S]) -> Result<ScalarMatrix<S>> {
        ScalarMatrix::try_from_fn(us.len(), vs.len(), |j, k| self.eval(kernel, &us[j], &vs[k]))
    }

    /// Checks both Cauchy-determinant product forms and the explicit Cauchy
    /// evaluation for `|ū| = |v̄|`.
    pub fn cauchy_identities(&self, us: &[S], vs: &[S]) -> Result<Verdict> {
        let n = us.len();
        if vs.len() != n {
            return Err(Error::CardinalityMismatch(format!("|u| = {n}, |v| = {}", vs.len())));
        }
        let mut verdict = Verdict::new("cauchy");
        let pref = self.delta(us)? * &self.delta_prime(vs)?;

        let g_det = self.kernel_matrix(Kernel::G, us, vs)?.det()?;
        verdict.check(|| "g(u,v) = D(u)D'(v) det g".into(), &self.prod(Kernel::G, us, vs)?, &(pref.clone() * &g_det));

        let inv_h = ScalarMatrix::try_from_fn(n, n, |j, k| self.inv_h(&us[j], &vs[k]))?;
        verdict.check(
            || "1/h(u,v) = D(u)D'(v) det 1/h".into(),
            &self.prod_inv_h(us, vs)?,
            &(pref * &inv_h.det()?),
        );

        let cauchy = ScalarMatrix::try_from_fn(n, n, |j, k| {
            let d = us[j].clone() - &vs[k];
            d.checked_inv().ok_or_else(|| pole("1/(u-v)", &us[j], &vs[k]))
        })?
        .det()?;
        let mut num = S::one();
        for j in 0..n {
            for k in 0..j {
                num = num * &(us[j].clone() - &us[k]) * &(vs[k].clone() - &vs[j]);
            }
        }
        let mut den = S::one();
        for u in us {
            for v in vs {
                den = den * &(u.clone() - v);
            }
        }
        verdict.check(|| "Cauchy determinant = double product".into(), &cauchy, &(num / den));
        Ok(verdict)
    }
}

/// g(u,v) = c/(u−v).
pub fn kernel_g<S: Scalar>(u: &S, v: &S, c: &S) -> Result<S> {
    Kernels::new(c.clone())?.g(u, v)
}

/// f(u,v) = (u−v+c)/(u−v).
pub fn kernel_f<S: Scalar>(u: &S, v: &S, c: &S) -> Result<S> {
    Kernels::new(c.clone())?.f(u, v)
}

/// h(u,v) = (u−v+c)/c.
pub fn kernel_h<S: Scalar>(u: &S, v: &S, c: &S) -> Result<S> {
    Kernels::new(c.clone())?.h(u, v)
}

/// t(u,v) = c²/((u−v)(u−v+c)).
pub fn kernel_t<S: Scalar>(u: &S, v: &S, c: &S) -> Result<S> {
    Kernels::new(c.clone())?.t(u, v)
}

/// Which of the Bethe parameter sets a [`ParamSet`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetLabel {
    UC,
    VC,
    UB,
    VB,
    X,
    Other,
}

impl SetLabel {
    pub fn name(self) -> &'static str {
        match self {
            SetLabel::UC => "uC",
            SetLabel::VC => "vC",
            SetLabel::UB => "uB",
            SetLabel::VB => "vB",
            SetLabel::X => "x",
            SetLabel::Other => "set",
        }
    }
}

/// A labelled parameter sequence kept in natural (subscript) order.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSet<S> {
    pub label: SetLabel,
    pub values: Vec<S>,
}

impl<S: Scalar> ParamSet<S> {
    pub fn new(label: SetLabel, values: Vec<S>) -> Self {
        Self { label, values }
    }

    /// `x̄ + shift`, as a new set.
    pub fn shifted(&self, shift: &S) -> Self {
        Self { label: self.label, values: self.values.iter().map(|x| x.clone() + shift).collect() }
    }

    /// Elements at the given indices, in the given order.
    pub fn select(&self, idx: &[usize]) -> Vec<S> {
        idx.iter().map(|&i| self.values[i].clone()).collect()
    }
}

impl<S> Deref for ParamSet<S> {
    type Target = [S];
    fn deref(&self) -> &[S] {
        &self.values
    }
}

/// Elements of `xs` at the given indices.
pub fn select<S: Clone>(xs: &[S], idx: &[usize]) -> Vec<S> {
    idx.iter().map(|&i| xs[i].clone()).collect()
}

/// `x̄ + shift`.
pub fn shift_all<S: Scalar>(xs: &[S], shift: &S) -> Vec<S> {
    xs.iter().map(|x| x.clone() + shift).collect()
}

/// Free values of r₁ or r₃: point → (value, optional derivative).
#[derive(Debug, Clone, PartialEq)]
pub struct RTable<S> {
    entries: Vec<(S, S, Option<S>)>,
}

impl<S: Scalar> Default for RTable<S> {
    fn default() -> Self {
        Self { entries: Vec::new() }
    }
}

impl<S: Scalar> RTable<S> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts or replaces the entry at `point`.
    pub fn insert(&mut self, point: S, value: S, deriv: Option<S>) {
        match self.entries.iter_mut().find(|(p, _, _)| *p == point) {
            Some(e) => *e = (point, value, deriv),
            None => self.entries.push((point, value, deriv)),
        }
    }

    pub fn value(&self, point: &S) -> Option<&S> {
        self.entries.iter().find(|(p, _, _)| p == point).map(|(_, v, _)| v)
    }

    pub fn deriv(&self, point: &S) -> Option<&S> {
        self.entries.iter().find(|(p, _, _)| p == point).and_then(|(_, _, d)| d.as_ref())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&S, &S, Option<&S>)> {
        self.entries.iter().map(|(p, v, d)| (p, v, d.as_ref()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Which vector of the scalar product an eigenvalue refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    C,
    B,
}

/// All free symbols of the generalized model for one scalar product
/// ⟨C(ū^C; v̄^C) | B(ū^B; v̄^B)⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct BetheConfig<S> {
    pub c: S,
    pub u_c: Vec<S>,
    pub v_c: Vec<S>,
    pub u_b: Vec<S>,
    pub v_b: Vec<S>,
    /// ϰ in the semi-on-shell constraint on r₁(ū^C).
    pub varkappa: S,
    /// Twist (κ₁, κ₂, κ₃).
    pub kappa: [S; 3],
    pub r1_table: RTable<S>,
    pub r3_table: RTable<S>,
}

impl<S: Scalar> BetheConfig<S> {
    /// Builds a configuration, rejecting repeated points and any pair of
    /// parameters whose difference is 0 or ±c.
    pub fn new(c: S, u_c: Vec<S>, v_c: Vec<S>, u_b: Vec<S>, v_b: Vec<S>) -> Result<Self> {
        let cfg = Self::new_unchecked(c, u_c, v_c, u_b, v_b)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Like [`BetheConfig::new`] but only checks cardinalities and `c ≠ 0`;
    /// for configurations with deliberately coinciding sets.
    pub fn new_unchecked(c: S, u_c: Vec<S>, v_c: Vec<S>, u_b: Vec<S>, v_b: Vec<S>) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::InvalidConfig("crossing constant c must be nonzero".into()));
        }
        if u_c.len() != u_b.len() || v_c.len() != v_b.len() {
            return Err(Error::CardinalityMismatch(format!(
                "#uC = {}, #uB = {}, #vC = {}, #vB = {}",
                u_c.len(),
                u_b.len(),
                v_c.len(),
                v_b.len()
            )));
        }
        Ok(Self {
            c,
            u_c,
            v_c,
            u_b,
            v_b,
            varkappa: S::one(),
            kappa: [S::one(), S::one(), S::one()],
            r1_table: RTable::new(),
            r3_table: RTable::new(),
        })
    }

    pub fn with_varkappa(mut self, varkappa: S) -> Self {
        self.varkappa = varkappa;
        self
    }

    pub fn with_kappa(mut self, kappa: [S; 3]) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn a(&self) -> usize {
        self.u_c.len()
    }

    pub fn b(&self) -> usize {
        self.v_c.len()
    }

    pub fn kernels(&self) -> Kernels<S> {
        Kernels { c: self.c.clone() }
    }

    pub fn sets(&self) -> [ParamSet<S>; 4] {
        [
            ParamSet::new(SetLabel::UC, self.u_c.clone()),
            ParamSet::new(SetLabel::VC, self.v_c.clone()),
            ParamSet::new(SetLabel::UB, self.u_b.clone()),
            ParamSet::new(SetLabel::VB, self.v_b.clone()),
        ]
    }

    /// ū^C, v̄^C, ū^B, v̄^B concatenated.
    pub fn all_points(&self) -> Vec<S> {
        self.u_c.iter().chain(&self.v_c).chain(&self.u_b).chain(&self.v_b).cloned().collect()
    }

    /// x̄ = {ū^B, v̄^C}, ū^B first.
    pub fn x_set(&self) -> Vec<S> {
        self.u_b.iter().chain(&self.v_c).cloned().collect()
    }

    /// Rejects differences 0 or ±c between any two parameters.
    pub fn validate(&self) -> Result<()> {
        let all: Vec<(SetLabel, usize, &S)> = self
            .sets()
            .iter()
            .flat_map(|s| s.values.iter().enumerate().map(|(i, _)| (s.label, i)).collect::<Vec<_>>())
            .zip(self.u_c.iter().chain(&self.v_c).chain(&self.u_b).chain(&self.v_b))
            .map(|((l, i), x)| (l, i, x))
            .collect();
        for (p, &(la, ia, x)) in all.iter().enumerate() {
            for &(lb, ib, y) in &all[..p] {
                let d = x.clone() - y;
                if d.is_zero() || (d.clone() - &self.c).is_zero() || (d + &self.c).is_zero() {
                    return Err(Error::InvalidConfig(format!(
                        "{}[{ia}] = {x} and {}[{ib}] = {y} differ by 0 or ±c",
                        la.name(),
                        lb.name()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn r1(&self, point: &S) -> Result<S> {
        self.r1_table
            .value(point)
            .cloned()
            .ok_or_else(|| Error::MissingRValue { function: "r1", at: point.to_string() })
    }

    pub fn r3(&self, point: &S) -> Result<S> {
        self.r3_table
            .value(point)
            .cloned()
            .ok_or_else(|| Error::MissingRValue { function: "r3", at: point.to_string() })
    }

    /// Mirrored configuration: ū^C ↔ ū^B, v̄^C ↔ v̄^B.
    pub fn mirrored(&self) -> Self {
        Self {
            u_c: self.u_b.clone(),
            u_b: self.u_c.clone(),
            v_c: self.v_b.clone(),
            v_b: self.v_c.clone(),
            ..self.clone()
        }
    }

    /// Entrywise conversion into another scalar field.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> BetheConfig<T> {
        let conv = |xs: &[S]| xs.iter().map(&f).collect::<Vec<T>>();
        let conv_table = |t: &RTable<S>| {
            let mut out = RTable::new();
            for (p, v, d) in t.iter() {
                out.insert(f(p), f(v), d.map(&f));
            }
            out
        };
        BetheConfig {
            c: f(&self.c),
            u_c: conv(&self.u_c),
            v_c: conv(&self.v_c),
            u_b: conv(&self.u_b),
            v_b: conv(&self.v_b),
            varkappa: f(&self.varkappa),
            kappa: [f(&self.kappa[0]), f(&self.kappa[1]), f(&self.kappa[2])],
            r1_table: conv_table(&self.r1_table),
            r3_table: conv_table(&self.r3_table),
        }
    }
}

/// λ₂-normalized eigenvalue of the twisted transfer matrix,
/// κ₁r₁(w)f(ū,w) + κ₂f(w,ū)f(v̄,w) − κ₃r₃(w)f(v̄,w), for the chosen side's
/// Bethe parameters.
pub fn tau_kappa<S: Scalar>(w: &S, cfg: &BetheConfig<S>, side: Side) -> Result<S> {
    let k = cfg.kernels();
    let (us, vs) = match side {
        Side::C => (&cfg.u_c, &cfg.v_c),
        Side::B => (&cfg.u_b, &cfg.v_b),
    };
    let [k1, k2, k3] = &cfg.kappa;
    let f_vw = k.prod2(Kernel::F, vs, w)?;
    let first = k1.clone() * &cfg.r1(w)? * &k.prod2(Kernel::F, us, w)?;
    let second = k2.clone() * &k.prod1(Kernel::F, w, us)? * &f_vw;
    let third = k3.clone() * &cfg.r3(w)? * &f_vw;
    Ok(first + second - third)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};
    use crate::exactnum::GaussianRational as Q;
    use proptest::prelude::*;

    fn q(s: &str) -> Q {
        s.parse().unwrap()
    }

    fn one() -> Kernels<Q> {
        Kernels::new(Q::one()).unwrap()
    }

    #[test]
    fn direct_substitution() {
        let k = one();
        assert_eq!(k.g(&q("2"), &q("1")).unwrap(), q("1"));
        assert_eq!(k.f(&q("2"), &q("1")).unwrap(), q("2"));
        assert_eq!(k.h(&q("2"), &q("1")).unwrap(), q("2"));
        assert_eq!(k.t(&q("2"), &q("1")).unwrap(), q("1/2"));
        assert!(matches!(k.g(&q("1"), &q("1")), Err(Error::Pole { kernel: "g", .. })));
        assert!(k.t(&q("0"), &q("1")).is_err());
        assert_eq!(kernel_g(&q("2"), &q("1"), &q("1")).unwrap(), q("1"));
        assert!(kernel_f(&q("1"), &q("1"), &q("0")).is_err());
    }

    #[test]
    fn shorthand_products() {
        let k = one();
        assert_eq!(k.prod(Kernel::F, &[], &[q("1"), q("2")]).unwrap(), Q::one());
        assert_eq!(k.prod(Kernel::F, &[q("3")], &[q("1"), q("2")]).unwrap(), q("3"));
        let v = [q("1/2+i"), q("-3")];
        let w = q("7/3");
        assert_eq!(
            k.prod2(Kernel::G, &v, &w).unwrap(),
            k.g(&v[0], &w).unwrap() * k.g(&v[1], &w).unwrap()
        );
        assert!(k.prod(Kernel::G, &[q("1")], &[q("2"), q("1")]).is_err());
    }

    #[test]
    fn deltas() {
        let k = one();
        assert_eq!(k.delta_prime(&[q("5")]).unwrap(), Q::one());
        assert_eq!(k.delta(&[q("1"), q("2"), q("4")]).unwrap(), q("1/6"));
        let us = [q("2/3+i"), q("-1/5")];
        let g12 = k.g(&us[0], &us[1]).unwrap();
        assert_eq!(k.delta_prime(&us).unwrap() * k.delta(&us).unwrap(), -(g12.clone() * g12));
    }

    #[test]
    fn inverse_kernels_vanish_on_coincidence() {
        let k = one();
        assert!(k.inv_g(&q("3"), &q("3")).is_zero());
        assert!(k.inv_f(&q("3"), &q("3")).unwrap().is_zero());
        assert!(k.inv_f(&q("0"), &q("1")).is_err());
        assert!(k.prod_inv_f(&[q("2")], &[q("5"), q("2")]).unwrap().is_zero());
    }

    #[test]
    fn cauchy_small() {
        let k = Kernels::new(q("1/3+i")).unwrap();
        assert!(k.cauchy_identities(&[q("2")], &[q("7/2")]).unwrap().passed());
        let v = k.cauchy_identities(&[q("2"), q("-1+i")], &[q("7/2"), q("1/9")]).unwrap();
        assert!(v.passed(), "{v}");
        let v = k
            .cauchy_identities(&[q("2"), q("-1+i"), q("5/4")], &[q("7/2"), q("1/9"), q("-2i")])
            .unwrap();
        assert!(v.passed(), "{v}");
    }

    #[test]
    fn tau_kappa_specializations() {
        let mut cfg = BetheConfig::new(q("1"), vec![], vec![], vec![], vec![]).unwrap();
        cfg = cfg.with_kappa([q("2"), q("3"), q("5")]);
        let w = q("1/2");
        cfg.r1_table.insert(w.clone(), q("7"), None);
        cfg.r3_table.insert(w.clone(), q("11"), None);
        // κ₁r₁ + κ₂ − κ₃r₃
        assert_eq!(tau_kappa(&w, &cfg, Side::C).unwrap(), q("14") + q("3") - q("55"));

        let mut cfg = BetheConfig::new(q("1"), vec![q("3")], vec![], vec![q("5")], vec![]).unwrap();
        cfg.r1_table.insert(w.clone(), q("7"), None);
        cfg.r3_table.insert(w.clone(), q("11"), None);
        let k = one();
        let expected = q("7") * k.f(&q("3"), &w).unwrap() + k.f(&w, &q("3")).unwrap() - q("11");
        assert_eq!(tau_kappa(&w, &cfg, Side::C).unwrap(), expected);

        cfg.r3_table = RTable::new();
        assert!(matches!(tau_kappa(&w, &cfg, Side::B), Err(Error::MissingRValue { function: "r3", .. })));
    }

    /// a = b = 1 expanded by hand: κ₁r₁(w)(u−w+c)/(u−w) + κ₂(w−u+c)/(w−u)·(v−w+c)/(v−w)
    /// − κ₃r₃(w)(v−w+c)/(v−w).
    #[test]
    fn tau_kappa_one_one_by_hand() {
        let (c, u, v, w) = (q("2/3"), q("1+i"), q("-1/2"), q("3/7"));
        let (k1, k2, k3, r1, r3) = (q("2"), q("-1/3"), q("5/4"), q("1/2-i"), q("3"));
        let mut cfg = BetheConfig::new(c.clone(), vec![u.clone()], vec![v.clone()], vec![q("9")], vec![q("-9")])
            .unwrap()
            .with_kappa([k1.clone(), k2.clone(), k3.clone()]);
        cfg.r1_table.insert(w.clone(), r1.clone(), None);
        cfg.r3_table.insert(w.clone(), r3.clone(), None);
        let f = |x: &Q, y: &Q| (x - y + c.clone()) / (x - y);
        let expected = k1 * r1 * f(&u, &w) + k2 * f(&w, &u) * f(&v, &w) - k3 * r3 * f(&v, &w);
        assert_eq!(tau_kappa(&w, &cfg, Side::C).unwrap(), expected);
    }

    #[test]
    fn config_validation() {
        let ok = BetheConfig::new(q("1"), vec![q("1/3")], vec![q("5")], vec![q("7/2")], vec![q("i")]);
        assert!(ok.is_ok());
        let shifted = BetheConfig::new(q("1"), vec![q("1/3")], vec![q("4/3")], vec![q("7/2")], vec![q("i")]);
        assert!(matches!(shifted, Err(Error::InvalidConfig(_))));
        let mismatch = BetheConfig::new(q("1"), vec![q("1/3")], vec![], vec![], vec![]);
        assert!(matches!(mismatch, Err(Error::CardinalityMismatch(_))));
    }

    fn arb_q() -> impl Strategy<Value = Q> {
        (-20i64..20, 1i64..20, -20i64..20, 1i64..20).prop_map(|(a, b, c, d)| Q::from_parts(a, b, c, d))
    }

    proptest! {
        #[test]
        fn kernel_properties(u in arb_q(), v in arb_q(), c in arb_q()) {
            prop_assume!(!c.is_zero());
            let d = &u - &v;
            prop_assume!(!d.is_zero() && !(&d + &c).is_zero() && !(&d - &c).is_zero());
            let k = Kernels::new(c.clone()).unwrap();
            let vc = &v + &c;
            prop_assert_eq!(k.g(&u, &v).unwrap(), -k.g(&v, &u).unwrap());
            prop_assert_eq!(k.h(&u, &vc).unwrap() * k.g(&u, &v).unwrap(), Q::one());
            prop_assert_eq!(k.f(&u, &vc).unwrap() * k.f(&v, &u).unwrap(), Q::one());
            prop_assert_eq!(k.t(&u, &vc).unwrap(), k.t(&v, &u).unwrap());
            prop_assert_eq!(k.h(&u, &v).unwrap() * k.t(&u, &v).unwrap(), k.g(&u, &v).unwrap());
            prop_assert_eq!(k.prod(Kernel::T, &[u.clone()], &[v.clone()]).unwrap(), k.t(&u, &v).unwrap());
        }
    }
}
