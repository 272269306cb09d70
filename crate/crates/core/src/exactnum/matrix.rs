use std::fmt;
use std::ops::{Index, IndexMut};


use super::Scalar;
use crate::error::{Error, Result};

/// Dense row-major matrix over a scalar field.
#[derive(Clone, PartialEq)]
pub struct ScalarMatrix<S> {
    rows: usize,
    cols: usize,
    entries: Vec<S>,
}

impl<S: Scalar> ScalarMatrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::CardinalityMismatch("ragged matrix rows".into()));
        }
        Ok(Self { rows: nrows, cols: ncols, entries: rows.into_iter().flatten().collect() })
    }

    /// Builds a matrix entry by entry; stops at the first error.
    pub fn try_from_fn<F>(rows: usize, cols: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Result<S>,
    {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j)?);
            }
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_fn<F>(rows: usize, cols: usize, mut f: F) -> Self
    where
        F: FnMut(usize, usize) -> S,
    {
        Self::try_from_fn(rows, cols, |i, j| Ok(f(i, j))).unwrap()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn set_row(&mut self, i: usize, values: Vec<S>) {
        assert_eq!(values.len(), self.cols);
        for (j, v) in values.into_iter().enumerate() {
            self[(i, j)] = v;
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Entrywise conversion into another scalar field.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> ScalarMatrix<T> {
        ScalarMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    /// Exact determinant by Bareiss exact-division elimination with a full
    /// search for a nonzero pivot. The 0×0 determinant is 1.
    pub fn det(&self) -> Result<S> {
        if self.rows != self.cols {
            return Err(Error::NonSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut negate = false;
        let mut prev = S::one();
        for k in 0..n {
            let Some((pi, pj)) = (k..n)
                .flat_map(|i| (k..n).map(move |j| (i, j)))
                .find(|&(i, j)| !a[(i, j)].is_zero())
            else {
                return Ok(S::zero());
            };
            if pi != k {
                a.swap_rows(pi, k);
                negate = !negate;
            }
            if pj != k {
                a.swap_cols(pj, k);
                negate = !negate;
            }
            let pivot = a[(k, k)].clone();
            for i in k + 1..n {
                let aik = a[(i, k)].clone();
                for j in k + 1..n {
                    let updated = a[(i, j)].clone() * &pivot - aik.clone() * &a[(k, j)];
                    a[(i, j)] = updated / &prev;
                }
                a[(i, k)] = S::zero();
            }
            prev = pivot;
        }
        let d = if n == 0 { S::one() } else { a[(n - 1, n - 1)].clone() };
        Ok(if negate { -d } else { d })
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        for c in 0..self.cols {
            self.entries.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for r in 0..self.rows {
            self.entries.swap(r * self.cols + i, r * self.cols + j);
        }
    }
}

impl<S> Index<(usize, usize)> for ScalarMatrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.entries[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for ScalarMatrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.entries[i * self.cols + j]
    }
}

impl<S: fmt::Debug> fmt::Debug for ScalarMatrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> =
                self.entries[i * self.cols..(i + 1) * self.cols].iter().map(|x| format!("{x:?}")).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};
    use crate::exactnum::{GaussianRational, RationalFunctionEps};
    use proptest::prelude::*;

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from(n)
    }

    /// Cofactor expansion along the first row.
    fn cofactor_det(m: &ScalarMatrix<GaussianRational>) -> GaussianRational {
        let n = m.rows();
        if n == 0 {
            return GaussianRational::one();
        }
        (0..n)
            .map(|j| {
                let minor = ScalarMatrix::from_fn(n - 1, n - 1, |r, c| {
                    m[(r + 1, if c < j { c } else { c + 1 })].clone()
                });
                let term = &m[(0, j)] * &cofactor_det(&minor);
                if j % 2 == 0 { term } else { -term }
            })
            .sum()
    }

    #[test]
    fn small_determinants() {
        let m = ScalarMatrix::from_rows(vec![vec![g(2)]]).unwrap();
        assert_eq!(m.det().unwrap(), g(2));
        assert_eq!(ScalarMatrix::<GaussianRational>::identity(3).det().unwrap(), g(1));
        let m = ScalarMatrix::from_rows(vec![vec![g(1), g(2)], vec![g(3), g(4)]]).unwrap();
        assert_eq!(m.det().unwrap(), g(-2));
        assert_eq!(ScalarMatrix::<GaussianRational>::zeros(0, 0).det().unwrap(), g(1));
    }

    #[test]
    fn pivoting_and_singular() {
        // Leading zero forces a pivot swap.
        let m = ScalarMatrix::from_rows(vec![
            vec![g(0), g(1), g(2)],
            vec![g(1), g(0), g(3)],
            vec![g(4), g(-3), g(8)],
        ])
        .unwrap();
        assert_eq!(m.det().unwrap(), cofactor_det(&m));
        let s = ScalarMatrix::from_rows(vec![vec![g(1), g(2)], vec![g(2), g(4)]]).unwrap();
        assert!(s.det().unwrap().is_zero());
    }

    #[test]
    fn non_square_rejected() {
        let m = ScalarMatrix::<GaussianRational>::zeros(2, 3);
        assert_eq!(m.det(), Err(Error::NonSquare { rows: 2, cols: 3 }));
    }

    #[test]
    fn rational_function_entries() {
        // det [[e, 1], [1, e]] = e^2 - 1
        let e = RationalFunctionEps::eps();
        let one = RationalFunctionEps::one();
        let m = ScalarMatrix::from_rows(vec![vec![e.clone(), one.clone()], vec![one.clone(), e.clone()]]).unwrap();
        let d = m.det().unwrap();
        assert_eq!(d, &(&e * &e) - &one);
    }

    fn arb_grat() -> impl Strategy<Value = GaussianRational> {
        (-9i64..9, 1i64..6, -9i64..9, 1i64..6)
            .prop_map(|(a, b, c, d)| GaussianRational::from_parts(a, b, c, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn bareiss_matches_cofactor_4x4(entries in proptest::collection::vec(arb_grat(), 16)) {
            let m = ScalarMatrix::from_fn(4, 4, |i, j| entries[4 * i + j].clone());
            prop_assert_eq!(m.det().unwrap(), cofactor_det(&m));
        }

        #[test]
        fn bareiss_matches_cofactor_sparse(mask in proptest::collection::vec(any::<bool>(), 16),
                                           entries in proptest::collection::vec(arb_grat(), 16)) {
            let m = ScalarMatrix::from_fn(4, 4, |i, j| {
                if mask[4 * i + j] { entries[4 * i + j].clone() } else { GaussianRational::zero() }
            });
            prop_assert_eq!(m.det().unwrap(), cofactor_det(&m));
        }
    }
}
