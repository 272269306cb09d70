//! The highest coefficient Z_{a,b}(t̄; x̄ | s̄; ȳ) in its two partition-sum
//! representations.

use crate::dwpf::dwpf;
use crate::error::{Error, Result};
use crate::exactnum::Scalar;
use crate::kernels::{shift_all, Kernel, Kernels};
use crate::partitions::splits;

/// Arguments of Z_{a,b}: |t̄| = |x̄| = a, |s̄| = |ȳ| = b.
#[derive(Debug, Clone, PartialEq)]
pub struct ZArgs<S> {
    pub t: Vec<S>,
    pub x: Vec<S>,
    pub s: Vec<S>,
    pub y: Vec<S>,
}

impl<S: Scalar> ZArgs<S> {
    pub fn new(t: Vec<S>, x: Vec<S>, s: Vec<S>, y: Vec<S>) -> Result<Self> {
        if t.len() != x.len() || s.len() != y.len() {
            return Err(Error::CardinalityMismatch(format!(
                "Z needs |t| = |x| and |s| = |y|, got {}, {}, {}, {}",
                t.len(),
                x.len(),
                s.len(),
                y.len()
            )));
        }
        Ok(Self { t, x, s, y })
    }

    pub fn a(&self) -> usize {
        self.t.len()
    }

    pub fn b(&self) -> usize {
        self.s.len()
    }
}

/// Σ over ω̄ = {x̄, s̄} ⇒ {ω̄_I, ω̄_II}, |ω̄_I| = a, of
/// g(ω̄_II,ω̄_I)h(ω̄_II,x̄)g(ω̄_II,ȳ)K_a(ω̄_I|t̄).
pub fn z_omega<S: Scalar>(args: &ZArgs<S>, k: &Kernels<S>) -> Result<S> {
    z_omega_counted(args, k).map(|(v, _)| v)
}

/// [`z_omega`] together with the number of terms summed.
pub fn z_omega_counted<S: Scalar>(args: &ZArgs<S>, k: &Kernels<S>) -> Result<(S, u64)> {
    let omega: Vec<S> = args.x.iter().chain(&args.s).cloned().collect();
    let mut acc = S::zero();
    let mut terms = 0;
    for sp in splits(omega.len(), args.a())? {
        let (w1, w2) = sp.apply(&omega);
        terms += 1;
        acc = acc
            + &(k.prod(Kernel::G, &w2, &w1)?
                * &k.prod(Kernel::H, &w2, &args.x)?
                * &k.prod(Kernel::G, &w2, &args.y)?
                * &dwpf(&w1, &args.t, k)?);
    }
    Ok((acc, terms))
}

/// f(s̄,t̄)f(ȳ,x̄) Σ over η̄ = {t̄, ȳ+c} ⇒ {η̄_I, η̄_II}, |η̄_I| = a, of
/// g(η̄_I,η̄_II)·h(t̄,η̄_II)/h(s̄,η̄_II)·K_a(x̄|η̄_I).
pub fn z_eta<S: Scalar>(args: &ZArgs<S>, k: &Kernels<S>) -> Result<S> {
    z_eta_counted(args, k).map(|(v, _)| v)
}

/// [`z_eta`] together with the number of terms summed.
pub fn z_eta_counted<S: Scalar>(args: &ZArgs<S>, k: &Kernels<S>) -> Result<(S, u64)> {
    let eta: Vec<S> = args.t.iter().cloned().chain(shift_all(&args.y, k.c())).collect();
    let mut acc = S::zero();
    let mut terms = 0;
    for sp in splits(eta.len(), args.a())? {
        let (e1, e2) = sp.apply(&eta);
        terms += 1;
        acc = acc
            + &(k.prod(Kernel::G, &e1, &e2)? * &k.prod(Kernel::H, &args.t, &e2)? * &k.prod_inv_h(&args.s, &e2)?
                * &dwpf(&args.x, &e1, k)?);
    }
    let pref = k.prod(Kernel::F, &args.s, &args.t)? * &k.prod(Kernel::F, &args.y, &args.x)?;
    Ok((pref * &acc, terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::GaussianRational as Q;
    use crate::random::{random_nonzero, random_points};
    use num_traits::One;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(s: &str) -> Q {
        s.parse().unwrap()
    }

    fn random_args(r: &mut ChaCha8Rng, a: usize, b: usize) -> (ZArgs<Q>, Kernels<Q>) {
        let c = random_nonzero(r, 20);
        let p = random_points(r, 2 * a + 2 * b, &c, 20, &[]);
        let args = ZArgs::new(p[..a].to_vec(), p[a..2 * a].to_vec(), p[2 * a..2 * a + b].to_vec(), p[2 * a + b..].to_vec())
            .unwrap();
        (args, Kernels::new(c).unwrap())
    }

    #[test]
    fn trivial_cases() {
        let k = Kernels::new(q("1")).unwrap();
        let empty = ZArgs::<Q>::new(vec![], vec![], vec![], vec![]).unwrap();
        assert_eq!(z_omega(&empty, &k).unwrap(), Q::one());
        assert_eq!(z_eta(&empty, &k).unwrap(), Q::one());
        let args = ZArgs::new(vec![q("1/2"), q("3+i")], vec![q("-2"), q("7/3")], vec![], vec![]).unwrap();
        let kx = dwpf(&args.x, &args.t, &k).unwrap();
        assert_eq!(z_omega(&args, &k).unwrap(), kx);
        assert_eq!(z_eta(&args, &k).unwrap(), kx);
        assert!(ZArgs::new(vec![q("1")], vec![], vec![], vec![]).is_err());
    }

    #[test]
    fn representations_agree() {
        let mut r = ChaCha8Rng::seed_from_u64(17);
        for a in 0..=3 {
            for b in 0..=3 {
                let (args, k) = random_args(&mut r, a, b);
                let (zo, no) = z_omega_counted(&args, &k).unwrap();
                let (ze, ne) = z_eta_counted(&args, &k).unwrap();
                assert_eq!(zo, ze, "a = {a}, b = {b}");
                assert_eq!(no, ne);
            }
        }
    }

    #[test]
    fn permutation_invariance() {
        let mut r = ChaCha8Rng::seed_from_u64(23);
        let (args, k) = random_args(&mut r, 2, 3);
        let z = z_omega(&args, &k).unwrap();
        let mut p = args.clone();
        for set in [&mut p.t, &mut p.x, &mut p.s, &mut p.y] {
            set.shuffle(&mut r);
        }
        p.s.reverse();
        assert_eq!(z_omega(&p, &k).unwrap(), z);
        assert_eq!(z_eta(&p, &k).unwrap(), z);
    }
}
