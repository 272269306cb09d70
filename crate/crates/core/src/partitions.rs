//! Ordered two-way splits of an index range with permutation parity.

use crate::error::{Error, Result};
use crate::exactnum::{sign, Scalar, ScalarMatrix};
use crate::kernels::{select, Kernel, Kernels};
use crate::verdict::Verdict;

/// One split {0..n} ⇒ {I, II}, both halves increasing. `odd` is the parity
/// of the permutation taking (I, II) to (0..n).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSplit {
    pub subset_i: Vec<usize>,
    pub subset_ii: Vec<usize>,
    pub odd: bool,
}

impl PartitionSplit {
    /// (−1)^{[P]} as an integer.
    pub fn sign(&self) -> i8 {
        if self.odd {
            -1
        } else {
            1
        }
    }

    pub fn sign_in<S: Scalar>(&self) -> S {
        sign(self.odd as usize)
    }

    /// Splits `xs` into (xs_I, xs_II).
    pub fn apply<T: Clone>(&self, xs: &[T]) -> (Vec<T>, Vec<T>) {
        (select(xs, &self.subset_i), select(xs, &self.subset_ii))
    }
}

/// Streams all C(n,k) splits of 0..n with |I| = k, I in lexicographic order.
#[derive(Debug, Clone)]
pub struct Splits {
    n: usize,
    idx: Vec<usize>,
    inversions: usize,
    done: bool,
}

/// All splits of 0..n with |I| = k.
pub fn splits(n: usize, k: usize) -> Result<Splits> {
    if k > n {
        return Err(Error::BadCardinality { n, k });
    }
    Ok(Splits { n, idx: (0..k).collect(), inversions: 0, done: false })
}

impl Splits {
    fn current(&self) -> PartitionSplit {
        let mut subset_ii = Vec::with_capacity(self.n - self.idx.len());
        let mut it = self.idx.iter().peekable();
        for j in 0..self.n {
            if it.peek() == Some(&&j) {
                it.next();
            } else {
                subset_ii.push(j);
            }
        }
        PartitionSplit { subset_i: self.idx.clone(), subset_ii, odd: self.inversions % 2 == 1 }
    }

    fn advance(&mut self) {
        let k = self.idx.len();
        let Some(t) = (0..k).rev().find(|&t| self.idx[t] < self.n - k + t) else {
            self.done = true;
            return;
        };
        // Each I_s contributes I_s − s inversions (elements of II it jumps).
        for s in t..k {
            self.inversions -= self.idx[s] - s;
        }
        self.idx[t] += 1;
        for s in t + 1..k {
            self.idx[s] = self.idx[s - 1] + 1;
        }
        for s in t..k {
            self.inversions += self.idx[s] - s;
        }
    }
}

impl Iterator for Splits {
    type Item = PartitionSplit;

    fn next(&mut self) -> Option<PartitionSplit> {
        if self.done {
            return None;
        }
        let out = self.current();
        self.advance();
        Some(out)
    }
}

/// Cartesian product of independent split streams, last factor fastest.
#[derive(Debug, Clone)]
pub struct MultiSplits {
    fresh: Vec<Splits>,
    live: Vec<Splits>,
    current: Option<Vec<PartitionSplit>>,
    started: bool,
}

/// Streams tuples of splits for `spec = [(n₀,k₀), (n₁,k₁), …]`.
pub fn multi_splits(spec: &[(usize, usize)]) -> Result<MultiSplits> {
    let fresh = spec.iter().map(|&(n, k)| splits(n, k)).collect::<Result<Vec<_>>>()?;
    Ok(MultiSplits { live: fresh.clone(), fresh, current: None, started: false })
}

impl Iterator for MultiSplits {
    type Item = Vec<PartitionSplit>;

    fn next(&mut self) -> Option<Vec<PartitionSplit>> {
        if !self.started {
            self.started = true;
            let first: Option<Vec<_>> = self.live.iter_mut().map(Iterator::next).collect();
            self.current = first;
            return self.current.clone();
        }
        let cur = self.current.as_mut()?;
        let mut pos = self.live.len();
        loop {
            if pos == 0 {
                self.current = None;
                return None;
            }
            pos -= 1;
            if let Some(s) = self.live[pos].next() {
                cur[pos] = s;
                break;
            }
            self.live[pos] = self.fresh[pos].clone();
            cur[pos] = self.live[pos].next().expect("nonempty split stream");
        }
        Some(cur.clone())
    }
}

/// Laplace expansion of det(A+B) over row/column splits, in both the
/// parity-signed form and the Δ-weighted form built from
/// 𝒜(ū_I|v̄_I) = Δ(ū_I)Δ′(v̄_I)det A and ℬ likewise.
pub fn laplace_check<S, A, B>(a: A, b: B, us: &[S], vs: &[S], kernels: &Kernels<S>) -> Result<Verdict>
where
    S: Scalar,
    A: Fn(&S, &S) -> Result<S>,
    B: Fn(&S, &S) -> Result<S>,
{
    let n = us.len();
    if vs.len() != n {
        return Err(Error::CardinalityMismatch(format!("|u| = {n}, |v| = {}", vs.len())));
    }
    let block = |f: &dyn Fn(&S, &S) -> Result<S>, xs: &[S], ys: &[S]| -> Result<S> {
        ScalarMatrix::try_from_fn(xs.len(), ys.len(), |j, k| f(&xs[j], &ys[k]))?.det()
    };
    let full = ScalarMatrix::try_from_fn(n, n, |j, k| Ok(a(&us[j], &vs[k])? + b(&us[j], &vs[k])?))?.det()?;

    let mut signed = S::zero();
    let mut weighted = S::zero();
    for m in 0..=n {
        for su in splits(n, m)? {
            let (u1, u2) = su.apply(us);
            for sv in splits(n, m)? {
                let (v1, v2) = sv.apply(vs);
                let da = block(&a, &u1, &v1)?;
                let db = block(&b, &u2, &v2)?;
                let prod = da.clone() * &db;
                signed = signed + &(if su.odd != sv.odd { -prod } else { prod });
                let cal_a = kernels.delta(&u1)? * &kernels.delta_prime(&v1)? * &da;
                let cal_b = kernels.delta(&u2)? * &kernels.delta_prime(&v2)? * &db;
                weighted = weighted
                    + &(cal_a
                        * &cal_b
                        * &kernels.prod(Kernel::G, &u2, &u1)?
                        * &kernels.prod(Kernel::G, &v1, &v2)?);
            }
        }
    }
    let mut verdict = Verdict::new("laplace");
    verdict.check(|| format!("signed Laplace expansion, n = {n}"), &full, &signed);
    let lhs = kernels.delta(us)? * &kernels.delta_prime(vs)? * &full;
    verdict.check(|| format!("Delta-weighted Laplace expansion, n = {n}"), &lhs, &weighted);
    Ok(verdict)
}

/// Δ(X) = (−1)^{[P]}·Δ(X_I)Δ(X_II)·g(X_II, X_I) for every split of X.
pub fn delta_split_check<S: Scalar>(xs: &[S], kernels: &Kernels<S>) -> Result<Verdict> {
    let mut verdict = Verdict::new("delta factorization");
    let full = kernels.delta(xs)?;
    for k in 0..=xs.len() {
        for s in splits(xs.len(), k)? {
            let (x1, x2) = s.apply(xs);
            let rhs = s.sign_in::<S>()
                * &kernels.delta(&x1)?
                * &kernels.delta(&x2)?
                * &kernels.prod(Kernel::G, &x2, &x1)?;
            verdict.check(|| format!("split I = {:?}", s.subset_i), &full, &rhs);
        }
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::GaussianRational as Q;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn inversion_oracle(s: &PartitionSplit) -> bool {
        let seq: Vec<usize> = s.subset_i.iter().chain(&s.subset_ii).copied().collect();
        let mut inv = 0;
        for i in 0..seq.len() {
            for j in i + 1..seq.len() {
                if seq[i] > seq[j] {
                    inv += 1;
                }
            }
        }
        inv % 2 == 1
    }

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn spec_examples() {
        let s: Vec<_> = splits(2, 1).unwrap().collect();
        assert_eq!(s.len(), 2);
        assert_eq!((s[0].subset_i.clone(), s[0].subset_ii.clone(), s[0].sign()), (vec![0], vec![1], 1));
        assert_eq!((s[1].subset_i.clone(), s[1].subset_ii.clone(), s[1].sign()), (vec![1], vec![0], -1));
        let s: Vec<_> = splits(3, 0).unwrap().collect();
        assert_eq!(s.len(), 1);
        assert!(s[0].subset_i.is_empty() && s[0].sign() == 1);
        assert_eq!(splits(4, 2).unwrap().count(), 6);
        assert!(matches!(splits(2, 3), Err(Error::BadCardinality { n: 2, k: 3 })));
        assert_eq!(splits(0, 0).unwrap().count(), 1);
    }

    #[test]
    fn parity_matches_inversion_count() {
        for n in 0..=7 {
            for k in 0..=n {
                let all: Vec<_> = splits(n, k).unwrap().collect();
                assert_eq!(all.len(), binom(n, k));
                for w in all.windows(2) {
                    assert!(w[0].subset_i < w[1].subset_i, "lexicographic order");
                }
                for s in &all {
                    assert_eq!(s.odd, inversion_oracle(s), "{s:?}");
                    let mut both: Vec<usize> = s.subset_i.iter().chain(&s.subset_ii).copied().collect();
                    both.sort_unstable();
                    assert_eq!(both, (0..n).collect::<Vec<_>>());
                    assert!(s.subset_ii.windows(2).all(|w| w[0] < w[1]));
                }
            }
        }
    }

    #[test]
    fn multi_split_counts() {
        assert_eq!(multi_splits(&[(1, 0), (1, 1)]).unwrap().count(), 1);
        assert_eq!(multi_splits(&[(2, 1), (2, 1)]).unwrap().count(), 4);
        assert_eq!(multi_splits(&[(3, 1), (2, 0), (2, 2)]).unwrap().count(), 3);
        assert_eq!(multi_splits(&[]).unwrap().count(), 1);
        assert_eq!(multi_splits(&[(4, 2), (3, 1), (2, 1)]).unwrap().count(), 36);
        let tuples: Vec<_> = multi_splits(&[(2, 1), (3, 1)]).unwrap().collect();
        for (i, t) in tuples.iter().enumerate() {
            assert_eq!(t[0].subset_i, vec![i / 3]);
            assert_eq!(t[1].subset_i, vec![i % 3]);
        }
        assert!(multi_splits(&[(1, 2)]).is_err());
    }

    #[test]
    fn cloned_stream_advances_independently() {
        let mut a = splits(4, 2).unwrap();
        a.next();
        let b = a.clone();
        assert_eq!(a.count(), 5);
        assert_eq!(b.count(), 5);
    }

    fn arb_q() -> impl Strategy<Value = Q> {
        (-20i64..20, 1i64..20, -20i64..20, 1i64..20).prop_map(|(a, b, c, d)| Q::from_parts(a, b, c, d))
    }

    fn distinct(xs: &[Q]) -> bool {
        xs.iter().enumerate().all(|(i, x)| xs[..i].iter().all(|y| y != x))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn delta_factorizes(xs in proptest::collection::vec(arb_q(), 0..5), c in arb_q()) {
            prop_assume!(!c.is_zero() && distinct(&xs));
            let v = delta_split_check(&xs, &Kernels::new(c).unwrap()).unwrap();
            prop_assert!(v.passed(), "{}", v);
        }

        #[test]
        fn laplace_with_kernel_matrices(n in 1usize..4, pts in proptest::collection::vec(arb_q(), 6), c in arb_q()) {
            prop_assume!(!c.is_zero());
            let (us, vs) = (pts[..n].to_vec(), pts[3..3 + n].to_vec());
            let all: Vec<Q> = us.iter().chain(&vs).cloned().collect();
            prop_assume!(distinct(&all));
            let k = Kernels::new(c).unwrap();
            let v = laplace_check(|x: &Q, y: &Q| k.g(x, y), |x: &Q, y: &Q| k.h(x, y), &us, &vs, &k).unwrap();
            prop_assert!(v.passed(), "{}", v);
        }
    }
}
