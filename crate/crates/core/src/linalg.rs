//! Exact row vectors and square matrices over [`Rational`].
//!
//! The library's only multiplication orientation is row vector × matrix: a
//! machine step computes `v' = v · M`, so `v'[j] = Σ_i v[i] · M[i][j]`.
//! Matrices are square, inversion is exact Gauss-Jordan elimination with the
//! first nonzero pivot in each column, and a singular input is an error
//! rather than an approximation.

use crate::rational::Rational;
use std::fmt;

/// Errors from vector/matrix construction and arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinalgError {
    /// Vectors and matrices must have dimension at least 1.
    Empty,
    /// A matrix row had a different length than the number of rows.
    NotSquare { rows: usize, row: usize, len: usize },
    /// Operands of an operation had different dimensions.
    DimensionMismatch { left: usize, right: usize },
    /// The matrix has no inverse.
    Singular,
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::Empty => write!(f, "dimension must be at least 1"),
            LinalgError::NotSquare { rows, row, len } => {
                write!(f, "matrix with {rows} rows has a row {row} of length {len}")
            }
            LinalgError::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            LinalgError::Singular => write!(f, "matrix is singular"),
        }
    }
}

impl std::error::Error for LinalgError {}

/// A row vector of exact rationals, dimension ≥ 1.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RVector(Vec<Rational>);

impl RVector {
    pub fn new(entries: Vec<Rational>) -> Result<Self, LinalgError> {
        if entries.is_empty() {
            return Err(LinalgError::Empty);
        }
        Ok(RVector(entries))
    }

    pub fn from_i64(entries: &[i64]) -> Self {
        RVector(entries.iter().map(|&e| Rational::from(e)).collect())
    }

    /// The all-ones vector of dimension `k`.
    pub fn ones(k: usize) -> Self {
        RVector(vec![Rational::one(); k.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.0
    }

    /// Largest absolute value among the entries.
    pub fn max_abs(&self) -> Rational {
        self.0
            .iter()
            .map(Rational::abs)
            .max()
            .expect("vectors are nonempty")
    }

    /// Row vector × matrix. The vector's dimension must equal the matrix's.
    pub fn mul_matrix(&self, m: &RMatrix) -> Result<RVector, LinalgError> {
        if self.dim() != m.dim() {
            return Err(LinalgError::DimensionMismatch {
                left: self.dim(),
                right: m.dim(),
            });
        }
        let k = self.dim();
        let mut out = vec![Rational::zero(); k];
        for (i, vi) in self.0.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, slot) in out.iter_mut().enumerate() {
                let mij = m.entry(i, j);
                if !mij.is_zero() {
                    *slot += &(vi * mij);
                }
            }
        }
        Ok(RVector(out))
    }
}

impl fmt::Display for RVector {
    /// Space-separated entries, the form used by CLI output.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for RVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// A square matrix of exact rationals, stored row-major.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RMatrix {
    k: usize,
    entries: Vec<Rational>,
}

impl RMatrix {
    /// Builds from rows; every row must have length equal to the row count.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        let k = rows.len();
        if k == 0 {
            return Err(LinalgError::Empty);
        }
        let mut entries = Vec::with_capacity(k * k);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != k {
                return Err(LinalgError::NotSquare {
                    rows: k,
                    row: i,
                    len: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(RMatrix { k, entries })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self, LinalgError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&e| Rational::from(e)).collect())
                .collect(),
        )
    }

    pub fn identity(k: usize) -> Self {
        let mut m = RMatrix {
            k,
            entries: vec![Rational::zero(); k * k],
        };
        for i in 0..k {
            m.entries[i * k + i] = Rational::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn entry(&self, row: usize, col: usize) -> &Rational {
        &self.entries[row * self.k + col]
    }

    pub fn set_entry(&mut self, row: usize, col: usize, value: Rational) {
        self.entries[row * self.k + col] = value;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Rational]> {
        self.entries.chunks(self.k)
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        self.rows().map(<[Rational]>::to_vec).collect()
    }

    pub fn is_identity(&self) -> bool {
        self == &RMatrix::identity(self.k)
    }

    /// Largest absolute value among the entries.
    pub fn max_abs(&self) -> Rational {
        self.entries
            .iter()
            .map(Rational::abs)
            .max()
            .expect("matrices are nonempty")
    }

    /// Matrix product `self · other`; dimensions must match.
    pub fn mul(&self, other: &RMatrix) -> Result<RMatrix, LinalgError> {
        if self.k != other.k {
            return Err(LinalgError::DimensionMismatch {
                left: self.k,
                right: other.k,
            });
        }
        let k = self.k;
        let mut entries = vec![Rational::zero(); k * k];
        for i in 0..k {
            for l in 0..k {
                let a = self.entry(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..k {
                    let b = other.entry(l, j);
                    if !b.is_zero() {
                        entries[i * k + j] += &(a * b);
                    }
                }
            }
        }
        Ok(RMatrix { k, entries })
    }

    /// Exact inverse via Gauss-Jordan elimination on `[M | I]`, taking the
    /// first nonzero pivot in each column. Errors on singular input.
    pub fn inverse(&self) -> Result<RMatrix, LinalgError> {
        let k = self.k;
        let mut left = self.clone();
        let mut right = RMatrix::identity(k);
        for col in 0..k {
            let pivot_row = (col..k)
                .find(|&r| !left.entry(r, col).is_zero())
                .ok_or(LinalgError::Singular)?;
            if pivot_row != col {
                left.swap_rows(pivot_row, col);
                right.swap_rows(pivot_row, col);
            }
            let pivot = left.entry(col, col).clone();
            if !pivot.is_one() {
                let inv = pivot.recip().expect("pivot is nonzero");
                left.scale_row(col, &inv);
                right.scale_row(col, &inv);
            }
            for r in 0..k {
                if r == col {
                    continue;
                }
                let factor = left.entry(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                left.sub_scaled_row(r, col, &factor);
                right.sub_scaled_row(r, col, &factor);
            }
        }
        Ok(right)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.k {
            self.entries.swap(a * self.k + j, b * self.k + j);
        }
    }

    fn scale_row(&mut self, row: usize, factor: &Rational) {
        for j in 0..self.k {
            let idx = row * self.k + j;
            self.entries[idx] = &self.entries[idx] * factor;
        }
    }

    /// row `r` -= factor · row `src`
    fn sub_scaled_row(&mut self, r: usize, src: usize, factor: &Rational) {
        for j in 0..self.k {
            let delta = &(factor * self.entry(src, j));
            let idx = r * self.k + j;
            self.entries[idx] = &self.entries[idx] - delta;
        }
    }
}

impl fmt::Debug for RMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.rows().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for (j, e) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{e}")?;
            }
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn mat(rows: &[&[i64]]) -> RMatrix {
        RMatrix::from_i64_rows(rows).unwrap()
    }

    #[test]
    fn row_vector_times_matrix() {
        // The increment matrix adds the second entry into the first.
        let m_plus = mat(&[&[1, 0], &[1, 1]]);
        let v = RVector::from_i64(&[1, 1]);
        assert_eq!(v.mul_matrix(&m_plus).unwrap(), RVector::from_i64(&[2, 1]));

        let m_minus = mat(&[&[1, 0], &[-1, 1]]);
        assert_eq!(v.mul_matrix(&m_minus).unwrap(), RVector::from_i64(&[0, 1]));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let v = RVector::from_i64(&[1, 2, 3]);
        let m = RMatrix::identity(2);
        assert_eq!(
            v.mul_matrix(&m),
            Err(LinalgError::DimensionMismatch { left: 3, right: 2 })
        );
        assert!(mat(&[&[1, 0], &[0, 1]]).mul(&RMatrix::identity(3)).is_err());
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let rows = vec![
            vec![Rational::one(), Rational::zero()],
            vec![Rational::one()],
        ];
        assert_eq!(
            RMatrix::from_rows(rows),
            Err(LinalgError::NotSquare {
                rows: 2,
                row: 1,
                len: 1
            })
        );
    }

    #[test]
    fn inverse_of_shear_matrices() {
        // The two binary-encoding matrices invert to their subtraction forms.
        let m0 = mat(&[&[1, 1], &[0, 1]]);
        let n0 = mat(&[&[1, -1], &[0, 1]]);
        assert_eq!(m0.inverse().unwrap(), n0);
        assert!(m0.mul(&n0).unwrap().is_identity());

        let m1 = mat(&[&[1, 0], &[1, 1]]);
        let n1 = mat(&[&[1, 0], &[-1, 1]]);
        assert_eq!(m1.inverse().unwrap(), n1);
    }

    #[test]
    fn inverse_needs_row_swaps_and_fractions() {
        let m = mat(&[&[0, 2, 0], &[1, 0, 0], &[0, 0, 4]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).unwrap().is_identity());
        assert!(inv.mul(&m).unwrap().is_identity());
        assert_eq!(inv.entry(1, 0), &rat(1, 2).unwrap());
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let m = mat(&[&[1, 2], &[2, 4]]);
        assert_eq!(m.inverse(), Err(LinalgError::Singular));
        let z = mat(&[&[0]]);
        assert_eq!(z.inverse(), Err(LinalgError::Singular));
    }

    #[test]
    fn exactness_at_large_magnitudes() {
        // Doubling 64 times then undoing it is exact, no drift.
        let double = mat(&[&[2, 0], &[0, 1]]);
        let halve = double.inverse().unwrap();
        let mut v = RVector::from_i64(&[1, 1]);
        for _ in 0..64 {
            v = v.mul_matrix(&double).unwrap();
        }
        assert_eq!(
            v.entries()[0],
            "18446744073709551616".parse().unwrap()
        );
        let m_plus = mat(&[&[1, 0], &[1, 1]]);
        v = v.mul_matrix(&m_plus).unwrap();
        assert_eq!(
            v.entries()[0],
            "18446744073709551617".parse().unwrap()
        );
        v = v.mul_matrix(&m_plus.inverse().unwrap()).unwrap();
        for _ in 0..64 {
            v = v.mul_matrix(&halve).unwrap();
        }
        assert_eq!(v, RVector::from_i64(&[1, 1]));
    }

    fn small_matrix(k: usize) -> impl Strategy<Value = RMatrix> {
        proptest::collection::vec(-3i64..=3, k * k).prop_map(move |es| {
            RMatrix::from_rows(
                es.chunks(k)
                    .map(|row| row.iter().map(|&e| Rational::from(e)).collect())
                    .collect(),
            )
            .unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn vec_mat_chains_associate(
            (k, a, b) in (1usize..=4)
                .prop_flat_map(|k| (Just(k), small_matrix(k), small_matrix(k))),
            seed in proptest::collection::vec(-3i64..=3, 4),
        ) {
            let v =
                RVector::new(seed.iter().take(k).map(|&e| Rational::from(e)).collect()).unwrap();
            let left = v.mul_matrix(&a).unwrap().mul_matrix(&b).unwrap();
            let right = v.mul_matrix(&a.mul(&b).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn inverse_round_trips(m in (1usize..=4).prop_flat_map(small_matrix)) {
            if let Ok(inv) = m.inverse() {
                prop_assert!(m.mul(&inv).unwrap().is_identity());
                prop_assert!(inv.mul(&m).unwrap().is_identity());
            }
        }
    }
}
