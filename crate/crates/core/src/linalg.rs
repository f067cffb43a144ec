//! Dense matrices, incremental independence testing, rank and linear solves.

use std::ops::{Index, IndexMut};

use thiserror::Error;

use crate::scalar::{max_magnitude, Scalar, Tolerance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("ragged matrix: row {row} has {found} entries, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Matrix<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
}

impl<T: Clone> Matrix<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from rows; `cols` is only consulted when `rows` is
    /// empty.
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(cols, Vec::len);
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::Ragged {
                    row: i,
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: n,
            cols,
            data,
        })
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.iter_rows().map(<[T]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Clone>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn select_rows(&self, indices: &[usize]) -> Self {
        Matrix::from_fn(indices.len(), self.cols, |i, j| self[(indices[i], j)].clone())
    }
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::filled(rows, cols, S::zero())
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, v: &[S]) -> Vec<S> {
        debug_assert_eq!(v.len(), self.rows);
        let mut out = vec![S::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (o, m) in out.iter_mut().zip(self.row(i)) {
                o.add_product(vi, m);
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn right_mul(&self, v: &[S]) -> Vec<S> {
        debug_assert_eq!(v.len(), self.cols);
        self.iter_rows().map(|row| crate::scalar::dot(row, v)).collect()
    }

    pub fn mul(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            data.extend(other.left_mul(self.row(i)));
        }
        Matrix {
            rows: self.rows,
            cols: other.cols,
            data,
        }
    }

    pub fn add(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.add_ref(b))
                .collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &mut self.data[i * self.cols + j]
    }
}

/// Incremental linear-independence test.
///
/// Accepted vectors are kept in reduced echelon form: every stored row has a
/// unit pivot and is zero at the pivot columns of all rows stored before it,
/// so a candidate is reduced with one pass over the stored rows, `O(n^2)`
/// per insert.
#[derive(Clone, Debug)]
pub struct IndependenceTester<S> {
    dim: usize,
    rows: Vec<Vec<S>>,
    pivots: Vec<usize>,
    tol: Tolerance,
    scale: f64,
}

impl<S: Scalar> IndependenceTester<S> {
    pub fn new(dim: usize, tol: Tolerance) -> Self {
        IndependenceTester {
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
            tol,
            scale: 0.0,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// Number of accepted vectors, i.e. the rank of everything inserted.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.dim
    }

    /// The stored echelon rows.
    pub fn basis(&self) -> &[Vec<S>] {
        &self.rows
    }

    pub fn pivot_columns(&self) -> &[usize] {
        &self.pivots
    }

    fn residual(&self, v: &[S]) -> Result<Vec<S>, LinalgError> {
        if v.len() != self.dim {
            return Err(LinalgError::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        let mut r = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if r[p].is_zero() {
                continue;
            }
            let factor = r[p].clone();
            for (x, y) in r.iter_mut().zip(row) {
                x.sub_product(&factor, y);
            }
            r[p] = S::zero();
        }
        Ok(r)
    }

    fn pick_pivot(&self, r: &[S], scale: f64) -> Option<usize> {
        if S::is_exact() {
            return r.iter().position(|x| !x.is_zero());
        }
        let (idx, mag) = r
            .iter()
            .enumerate()
            .map(|(i, x)| (i, x.magnitude()))
            .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if r.is_empty() || mag <= self.tol.pivot * scale {
            None
        } else {
            Some(idx)
        }
    }

    /// True iff `v` lies in the span of the accepted vectors.
    pub fn contains(&self, v: &[S]) -> Result<bool, LinalgError> {
        let r = self.residual(v)?;
        let scale = self.scale.max(max_magnitude(v));
        Ok(self.pick_pivot(&r, scale).is_none())
    }

    /// Absorbs `v` and returns `true` when it is independent of the stored
    /// vectors; leaves the tester unchanged and returns `false` otherwise.
    pub fn try_insert(&mut self, v: &[S]) -> Result<bool, LinalgError> {
        let mut r = self.residual(v)?;
        let scale = self.scale.max(max_magnitude(v));
        let Some(p) = self.pick_pivot(&r, scale) else {
            return Ok(false);
        };
        self.scale = scale.max(r[p].magnitude());
        let inv = S::one() / r[p].clone();
        for x in r.iter_mut() {
            if !x.is_zero() {
                *x = x.mul_ref(&inv);
            }
        }
        r[p] = S::one();
        self.rows.push(r);
        self.pivots.push(p);
        Ok(true)
    }
}

/// Rank by full Gaussian elimination with row pivoting.
///
/// This does not share code with [`IndependenceTester`], so it can serve as
/// an independent check on it. In float mode the zero test is relative to
/// the largest entry of the matrix.
pub fn rank<S: Scalar>(matrix: &[Vec<S>], tol: &Tolerance) -> Result<usize, LinalgError> {
    let Some(first) = matrix.first() else {
        return Ok(0);
    };
    let cols = first.len();
    for (i, row) in matrix.iter().enumerate() {
        if row.len() != cols {
            return Err(LinalgError::Ragged {
                row: i,
                expected: cols,
                found: row.len(),
            });
        }
    }
    let mut m: Vec<Vec<S>> = matrix.to_vec();
    let scale = m.iter().map(|r| max_magnitude(r)).fold(0.0, f64::max);
    let mut rank = 0;
    for col in 0..cols {
        if rank == m.len() {
            break;
        }
        let pivot = if S::is_exact() {
            (rank..m.len()).find(|&i| !m[i][col].is_zero())
        } else {
            (rank..m.len())
                .max_by(|&a, &b| {
                    m[a][col]
                        .magnitude()
                        .partial_cmp(&m[b][col].magnitude())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .filter(|&i| !m[i][col].is_negligible(scale, tol))
        };
        let Some(p) = pivot else { continue };
        m.swap(rank, p);
        let pivot_row = m[rank].clone();
        for row in m.iter_mut().skip(rank + 1) {
            if row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone() / pivot_row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row).skip(col) {
                x.sub_product(&factor, y);
            }
            row[col] = S::zero();
        }
        rank += 1;
    }
    Ok(rank)
}

/// Finds coefficients `beta` with `sum_i beta_i * basis_i == target`, or
/// `None` when `target` is outside the span. Free variables are set to zero
/// when the basis vectors are dependent.
pub fn solve_coefficients<S: Scalar>(
    basis: &[Vec<S>],
    target: &[S],
    tol: &Tolerance,
) -> Result<Option<Vec<S>>, LinalgError> {
    let dim = target.len();
    for v in basis {
        if v.len() != dim {
            return Err(LinalgError::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
    }
    let unknowns = basis.len();
    // Augmented system: dim equations, one column per basis vector.
    let mut m: Vec<Vec<S>> = (0..dim)
        .map(|i| {
            let mut row: Vec<S> = basis.iter().map(|v| v[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let scale = m.iter().map(|r| max_magnitude(r)).fold(0.0, f64::max);
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for col in 0..unknowns {
        if r == dim {
            break;
        }
        let pivot = if S::is_exact() {
            (r..dim).find(|&i| !m[i][col].is_zero())
        } else {
            (r..dim)
                .max_by(|&a, &b| {
                    m[a][col]
                        .magnitude()
                        .partial_cmp(&m[b][col].magnitude())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .filter(|&i| !m[i][col].is_negligible(scale, tol))
        };
        let Some(p) = pivot else { continue };
        m.swap(r, p);
        let inv = S::one() / m[r][col].clone();
        for x in m[r].iter_mut() {
            *x = x.mul_ref(&inv);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                x.sub_product(&factor, y);
            }
        }
        pivot_cols.push(col);
        r += 1;
    }
    // Rows below the pivots must have a vanishing right-hand side.
    if m[r..]
        .iter()
        .any(|row| !row[unknowns].is_negligible(scale.max(1.0), tol))
    {
        return Ok(None);
    }
    let mut beta = vec![S::zero(); unknowns];
    for (row, &col) in pivot_cols.iter().enumerate() {
        beta[col] = m[row][unknowns].clone();
    }
    Ok(Some(beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn qv(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| q(x, 1)).collect()
    }

    #[test]
    fn insert_sequence_from_unit_vectors() {
        let mut t = IndependenceTester::new(2, Tolerance::default());
        assert!(t.try_insert(&qv(&[1, 0])).unwrap());
        assert!(t.try_insert(&qv(&[0, 1])).unwrap());
        assert!(!t.try_insert(&qv(&[2, 0])).unwrap());
        assert_eq!(t.len(), 2);
        assert!(t.is_full());
    }

    #[test]
    fn rejected_insert_leaves_state_unchanged() {
        let mut t = IndependenceTester::new(3, Tolerance::default());
        t.try_insert(&qv(&[1, 2, 3])).unwrap();
        let before = t.basis().to_vec();
        assert!(!t.try_insert(&[q(1, 2), q(1, 1), q(3, 2)]).unwrap());
        assert_eq!(t.basis(), &before[..]);
    }

    #[test]
    fn insert_rejects_wrong_length() {
        let mut t = IndependenceTester::<Rational>::new(2, Tolerance::default());
        assert_eq!(
            t.try_insert(&qv(&[1, 0, 0])),
            Err(LinalgError::DimensionMismatch {
                expected: 2,
                found: 3
            })
        );
    }

    #[test]
    fn float_tester_ignores_roundoff() {
        let mut t = IndependenceTester::new(2, Tolerance::default());
        assert!(t.try_insert(&[0.1, 0.3]).unwrap());
        assert!(!t.try_insert(&[0.1 * 3.0, 0.3 * 3.0 + 1e-15]).unwrap());
        assert!(t.try_insert(&[0.0, 1.0]).unwrap());
    }

    #[test]
    fn rank_examples() {
        let tol = Tolerance::default();
        assert_eq!(rank(&[qv(&[1, 0]), qv(&[0, 1])], &tol).unwrap(), 2);
        assert_eq!(rank(&[qv(&[1, 2]), qv(&[2, 4])], &tol).unwrap(), 1);
        assert_eq!(rank(&vec![qv(&[0, 0, 0]); 3], &tol).unwrap(), 0);
        assert_eq!(rank::<Rational>(&[], &tol).unwrap(), 0);
    }

    #[test]
    fn rank_rejects_ragged() {
        let err = rank(&[qv(&[1, 0]), qv(&[1])], &Tolerance::default()).unwrap_err();
        assert!(matches!(err, LinalgError::Ragged { row: 1, .. }));
    }

    #[test]
    fn solve_examples() {
        let tol = Tolerance::default();
        let beta = solve_coefficients(&[qv(&[1, 0]), qv(&[0, 1])], &qv(&[3, 4]), &tol).unwrap();
        assert_eq!(beta, Some(qv(&[3, 4])));
        let beta = solve_coefficients(&[qv(&[1, 1])], &qv(&[2, 2]), &tol).unwrap();
        assert_eq!(beta, Some(qv(&[2])));
        let beta = solve_coefficients(&[qv(&[1, 0])], &qv(&[0, 1]), &tol).unwrap();
        assert_eq!(beta, None);
    }

    #[test]
    fn solve_with_dependent_basis() {
        let tol = Tolerance::default();
        let basis = [qv(&[1, 1]), qv(&[2, 2]), qv(&[0, 1])];
        let target = qv(&[3, 5]);
        let beta = solve_coefficients(&basis, &target, &tol).unwrap().unwrap();
        for i in 0..2 {
            let mut acc = q(0, 1);
            for (b, v) in beta.iter().zip(&basis) {
                acc += b * &v[i];
            }
            assert_eq!(acc, target[i]);
        }
    }

    #[test]
    fn matrix_products() {
        let m = Matrix::from_rows(vec![qv(&[1, 2]), qv(&[3, 4])], 2).unwrap();
        assert_eq!(m.left_mul(&qv(&[1, 1])), qv(&[4, 6]));
        assert_eq!(m.right_mul(&qv(&[1, 1])), qv(&[3, 7]));
        assert_eq!(m.mul(&Matrix::identity(2)), m);
        assert_eq!(m.transpose()[(0, 1)], q(3, 1));
    }
}
