//! Dense exact matrices over the Gaussian rationals.
//!
//! Everything later modules need reduces to a handful of primitives here:
//! conjugate transpose, reduced row echelon form, rank, range-inclusion
//! tests, block assembly, full-rank factorization and inversion. All of it
//! is exact; pivoting picks the first nonzero entry (top-to-bottom,
//! left-to-right) so results are fully deterministic.

use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exactnum::GaussianRational;
use crate::Error;

/// Immutable dense matrix; `data` is row-major with `rows * cols` entries.
/// Empty matrices (zero rows or columns) are first-class.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<GaussianRational>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<GaussianRational>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must be rows*cols");
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![GaussianRational::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, GaussianRational::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> GaussianRational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    /// Convenience constructor from integer entries (tests and examples).
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| GaussianRational::from_int(rows[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &GaussianRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: GaussianRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    fn check_same_shape(&self, other: &Self) -> Result<(), Error> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {}x{}, got {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, Error> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j);
                    out.set(i, j, cur + &(a * b));
                }
            }
        }
        Ok(out)
    }

    pub fn madd(&self, other: &Self) -> Result<Self, Error> {
        self.check_same_shape(other)?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j) + other.get(i, j)
        }))
    }

    pub fn msub(&self, other: &Self) -> Result<Self, Error> {
        self.check_same_shape(other)?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j) - other.get(i, j)
        }))
    }

    pub fn scale(&self, lambda: &GaussianRational) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| lambda * self.get(i, j))
    }

    /// Conjugate transpose `A*`.
    pub fn ctranspose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// Reduced row echelon form together with the pivot column indices.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..m.cols {
            if pivot_row == m.rows {
                break;
            }
            // first nonzero entry at or below the current row
            let Some(r) = (pivot_row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            if r != pivot_row {
                for j in 0..m.cols {
                    let a = m.get(pivot_row, j).clone();
                    let b = m.get(r, j).clone();
                    m.set(pivot_row, j, b);
                    m.set(r, j, a);
                }
            }
            let inv = m.get(pivot_row, col).inv().expect("pivot is nonzero");
            for j in col..m.cols {
                let v = m.get(pivot_row, j);
                m.set(pivot_row, j, v * &inv);
            }
            for i in 0..m.rows {
                if i == pivot_row || m.get(i, col).is_zero() {
                    continue;
                }
                let factor = m.get(i, col).clone();
                for j in col..m.cols {
                    let v = m.get(i, j) - &(&factor * m.get(pivot_row, j));
                    m.set(i, j, v);
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        (m, pivots)
    }

    /// Exact rank.
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Column-space inclusion `R(D) ⊆ R(C)`, decided as `r([C, D]) == r(C)`.
    pub fn range_subset(d: &Self, c: &Self) -> Result<bool, Error> {
        if d.rows != c.rows {
            return Err(Error::DimensionMismatch(format!(
                "range_subset: {} vs {} rows",
                d.rows, c.rows
            )));
        }
        Ok(Self::hblock(&[c, d])?.rank() == c.rank())
    }

    /// Range equality `R(A) == R(B)`.
    pub fn range_eq(a: &Self, b: &Self) -> Result<bool, Error> {
        Ok(Self::range_subset(a, b)? && Self::range_subset(b, a)?)
    }

    /// Horizontal concatenation `[A1, A2, ...]`.
    pub fn hblock(parts: &[&Self]) -> Result<Self, Error> {
        assert!(!parts.is_empty());
        let rows = parts[0].rows;
        if parts.iter().any(|p| p.rows != rows) {
            return Err(Error::DimensionMismatch("hblock: unequal row counts".into()));
        }
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut off = 0;
        for p in parts {
            for i in 0..rows {
                for j in 0..p.cols {
                    out.set(i, off + j, p.get(i, j).clone());
                }
            }
            off += p.cols;
        }
        Ok(out)
    }

    /// Vertical concatenation.
    pub fn vblock(parts: &[&Self]) -> Result<Self, Error> {
        assert!(!parts.is_empty());
        let cols = parts[0].cols;
        if parts.iter().any(|p| p.cols != cols) {
            return Err(Error::DimensionMismatch("vblock: unequal column counts".into()));
        }
        let rows = parts.iter().map(|p| p.rows).sum();
        let mut out = Self::zeros(rows, cols);
        let mut off = 0;
        for p in parts {
            for i in 0..p.rows {
                for j in 0..cols {
                    out.set(off + i, j, p.get(i, j).clone());
                }
            }
            off += p.rows;
        }
        Ok(out)
    }

    /// `[[A, B], [C, D]]`.
    pub fn block2x2(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self, Error> {
        Self::vblock(&[&Self::hblock(&[a, b])?, &Self::hblock(&[c, d])?])
    }

    fn take_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, j| self.get(i, cols[j]).clone())
    }

    fn take_rows(&self, count: usize) -> Self {
        Self::from_fn(count, self.cols, |i, j| self.get(i, j).clone())
    }

    /// Full-rank factorization `A = F * G` with `F` m×r of full column rank
    /// and `G` r×n of full row rank, r = rank(A). `F` is the pivot columns
    /// of `A` and `G` the nonzero rows of its RREF, so the factorization is
    /// deterministic.
    pub fn full_rank_factorization(&self) -> (Self, Self) {
        let (r, pivots) = self.rref();
        let f = self.take_columns(&pivots);
        let g = r.take_rows(pivots.len());
        (f, g)
    }

    /// Exact inverse of a nonsingular square matrix.
    pub fn inverse(&self) -> Result<Self, Error> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "inverse of non-square {}x{}",
                self.rows, self.cols
            )));
        }
        let aug = Self::hblock(&[self, &Self::identity(self.rows)])?;
        let (red, pivots) = aug.rref();
        if pivots.len() != self.rows {
            return Err(Error::SingularMatrix);
        }
        let cols: Vec<usize> = (self.cols..2 * self.cols).collect();
        Ok(red.take_columns(&cols))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = GaussianRational;
    fn index(&self, (i, j): (usize, usize)) -> &GaussianRational {
        self.get(i, j)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix({}x{})\n{}", self.rows, self.cols, self)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    data: Vec<Vec<String>>,
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let data = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect())
            .collect();
        MatrixJson { rows: self.rows, cols: self.cols, data }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(deserializer)?;
        if raw.data.len() != raw.rows {
            return Err(D::Error::custom(format!(
                "expected {} rows, found {}",
                raw.rows,
                raw.data.len()
            )));
        }
        let mut data = Vec::with_capacity(raw.rows * raw.cols);
        for (i, row) in raw.data.iter().enumerate() {
            if row.len() != raw.cols {
                return Err(D::Error::custom(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    raw.cols
                )));
            }
            for (j, s) in row.iter().enumerate() {
                let v = GaussianRational::from_str(s).map_err(|e| {
                    D::Error::custom(format!("entry ({i},{j}): {e}"))
                })?;
                data.push(v);
            }
        }
        Ok(Matrix::new(raw.rows, raw.cols, data))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{arb_matrix, random_matrix_with_rank};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matmul_identity_and_zero() {
        let a = Matrix::from_i64(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        assert_eq!(Matrix::identity(3).matmul(&a).unwrap(), a);
        let z = Matrix::zeros(3, 2);
        assert_eq!(a.matmul(&z).unwrap(), Matrix::zeros(3, 2));
    }

    #[test]
    fn matmul_rank_one_kernel() {
        let a = Matrix::from_i64(&[&[1, 1], &[1, 1]]);
        let v = Matrix::from_i64(&[&[1], &[-1]]);
        assert_eq!(a.matmul(&v).unwrap(), Matrix::zeros(2, 1));
    }

    #[test]
    fn matmul_dimension_mismatch() {
        let a = Matrix::zeros(2, 3);
        assert!(matches!(a.matmul(&a), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn ctranspose_basics() {
        let sym = Matrix::from_i64(&[&[1, 2], &[2, 5]]);
        assert_eq!(sym.ctranspose(), sym);
        let i_mat = Matrix::new(1, 1, vec![GaussianRational::from_parts(0, 1, 1, 1)]);
        assert_eq!(
            i_mat.ctranspose(),
            Matrix::new(1, 1, vec![GaussianRational::from_parts(0, 1, -1, 1)])
        );
        let a = Matrix::from_i64(&[&[1, 2, 3], &[4, 5, 6]]);
        assert_eq!(a.ctranspose().ctranspose(), a);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Matrix::identity(4).rank(), 4);
        assert_eq!(Matrix::zeros(3, 5).rank(), 0);
        // oracle: both 2x2 minors vanish but a nonzero entry exists
        let a = Matrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(a.rank(), 1);
    }

    #[test]
    fn range_subset_examples() {
        let c = Matrix::from_i64(&[&[1], &[0]]);
        let d = Matrix::from_i64(&[&[0], &[1]]);
        assert!(Matrix::range_subset(&Matrix::zeros(2, 1), &c).unwrap());
        assert!(Matrix::range_subset(&c, &c).unwrap());
        assert!(!Matrix::range_subset(&d, &c).unwrap());
    }

    #[test]
    fn block_assembly() {
        let a = Matrix::from_i64(&[&[1, 2], &[3, 4]]);
        assert_eq!(Matrix::hblock(&[&a]).unwrap(), a);
        assert_eq!(
            Matrix::block2x2(
                &Matrix::identity(1),
                &Matrix::zeros(1, 1),
                &Matrix::zeros(1, 1),
                &Matrix::identity(1)
            )
            .unwrap(),
            Matrix::identity(2)
        );
        let one = Matrix::from_i64(&[&[1]]);
        let two = Matrix::from_i64(&[&[2]]);
        assert_eq!(
            Matrix::vblock(&[&one, &two]).unwrap(),
            Matrix::from_i64(&[&[1], &[2]])
        );
    }

    #[test]
    fn frf_examples() {
        let (f, g) = Matrix::identity(2).full_rank_factorization();
        assert_eq!(f, Matrix::identity(2));
        assert_eq!(g, Matrix::identity(2));

        let (f, g) = Matrix::zeros(2, 3).full_rank_factorization();
        assert_eq!((f.rows(), f.cols()), (2, 0));
        assert_eq!((g.rows(), g.cols()), (0, 3));
        assert_eq!(f.matmul(&g).unwrap(), Matrix::zeros(2, 3));

        let a = Matrix::from_i64(&[&[1, 2], &[2, 4]]);
        let (f, g) = a.full_rank_factorization();
        assert_eq!(f, Matrix::from_i64(&[&[1], &[2]]));
        assert_eq!(g, Matrix::from_i64(&[&[1, 2]]));
        assert_eq!(f.matmul(&g).unwrap(), a);
        assert_eq!(f.rank(), 1);
        assert_eq!(g.rank(), 1);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(Matrix::identity(3).inverse().unwrap(), Matrix::identity(3));
        let two = Matrix::from_i64(&[&[2]]);
        let half = Matrix::new(1, 1, vec![GaussianRational::from_ratio(1, 2)]);
        assert_eq!(two.inverse().unwrap(), half);
        // oracle: adjugate / determinant for the unit upper-triangular case
        let a = Matrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert_eq!(a.inverse().unwrap(), Matrix::from_i64(&[&[1, -1], &[0, 1]]));
        let sing = Matrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert!(matches!(sing.inverse(), Err(Error::SingularMatrix)));
        assert!(matches!(
            Matrix::zeros(2, 3).inverse(),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn empty_matrix_products() {
        let f = Matrix::zeros(2, 0);
        let g = Matrix::zeros(0, 3);
        assert_eq!(f.matmul(&g).unwrap(), Matrix::zeros(2, 3));
        assert_eq!(g.matmul(&Matrix::zeros(3, 2)).unwrap(), Matrix::zeros(0, 2));
    }

    #[test]
    fn frf_random_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let m = random_matrix_with_rank(&mut rng, 5, 5, None);
            let (f, g) = m.full_rank_factorization();
            let r = m.rank();
            assert_eq!(f.matmul(&g).unwrap(), m);
            assert_eq!(f.rank(), r);
            assert_eq!(g.rank(), r);
        }
    }

    #[test]
    fn json_round_trip() {
        let a = Matrix::from_fn(2, 2, |i, j| {
            GaussianRational::from_parts(i as i64 + 1, 2, j as i64, 3)
        });
        let text = serde_json::to_string(&a).unwrap();
        let back: Matrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn json_rejects_bad_shapes() {
        let bad = r#"{"rows": 2, "cols": 2, "data": [["1", "2"]]}"#;
        assert!(serde_json::from_str::<Matrix>(bad).is_err());
        let ragged = r#"{"rows": 1, "cols": 2, "data": [["1"]]}"#;
        assert!(serde_json::from_str::<Matrix>(ragged).is_err());
        let garbage = r#"{"rows": 1, "cols": 1, "data": [["x"]]}"#;
        assert!(serde_json::from_str::<Matrix>(garbage).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rank_equals_rank_of_ctranspose(a in arb_matrix(4, 4)) {
            prop_assert_eq!(a.rank(), a.ctranspose().rank());
        }

        #[test]
        fn hblock_rank_lower_bound((a, b) in (arb_matrix(3, 3), arb_matrix(3, 3))) {
            let b = Matrix::from_fn(a.rows(), b.cols().max(1), |i, j| {
                b.get(i % b.rows(), j % b.cols()).clone()
            });
            let h = Matrix::hblock(&[&a, &b]).unwrap();
            prop_assert!(h.rank() >= a.rank().max(b.rank()));
        }

        #[test]
        fn inverse_is_two_sided(a in arb_matrix(3, 3)) {
            if a.is_square() && a.rank() == a.rows() {
                let inv = a.inverse().unwrap();
                prop_assert_eq!(a.matmul(&inv).unwrap(), Matrix::identity(a.rows()));
                prop_assert_eq!(inv.matmul(&a).unwrap(), Matrix::identity(a.rows()));
            }
        }
    }
}
