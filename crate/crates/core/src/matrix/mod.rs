//! Dense complex matrices, validated transition matrices and submatrix
//! selectors.

mod families;
mod io;

pub use families::{bronzan_rotation, dft_matrix, identity, qubit_rotation, random_unitary};
pub use io::{load_matrix, save_matrix, MatrixFormat};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense `rows x cols` complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 {
            return Err(Error::InvalidDimension(rows));
        }
        if cols == 0 {
            return Err(Error::InvalidDimension(cols));
        }
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Self::from_nalgebra(DMatrix::from_row_slice(rows, cols, &entries))
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        f: impl FnMut(usize, usize) -> Complex64,
    ) -> Result<Self> {
        if rows == 0 {
            return Err(Error::InvalidDimension(rows));
        }
        if cols == 0 {
            return Err(Error::InvalidDimension(cols));
        }
        Self::from_nalgebra(DMatrix::from_fn(rows, cols, f))
    }

    /// Wraps an nalgebra matrix, rejecting empty shapes and non-finite entries.
    pub fn from_nalgebra(inner: DMatrix<Complex64>) -> Result<Self> {
        if inner.nrows() == 0 || inner.ncols() == 0 {
            return Err(Error::InvalidDimension(0));
        }
        for c in 0..inner.ncols() {
            for r in 0..inner.nrows() {
                let z = inner[(r, c)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: r, col: c });
                }
            }
        }
        Ok(Self { inner })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::from_fn(rows, cols, |_, _| Complex64::new(0.0, 0.0))
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.inner[(row, col)]
    }

    pub fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                out.push(self.get(r, c));
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self {
            inner: self.inner.transpose(),
        }
    }

    pub fn conjugate(&self) -> Self {
        Self {
            inner: self.inner.map(|z| z.conj()),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            )));
        }
        Ok(Self {
            inner: &self.inner * &rhs.inner,
        })
    }

    /// Matrix-vector product `M x`.
    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.cols() {
            return Err(Error::Shape(format!(
                "vector of length {} does not match {} columns",
                x.len(),
                self.cols()
            )));
        }
        Ok((0..self.rows())
            .map(|r| (0..self.cols()).map(|c| self.get(r, c) * x[c]).sum())
            .collect())
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return f64::INFINITY;
        }
        self.inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |(M^dagger M - I)_jk|`, or infinity for non-square input.
    pub fn unitarity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let gram = self.inner.adjoint() * &self.inner;
        let n = self.rows();
        let mut worst: f64 = 0.0;
        for c in 0..n {
            for r in 0..n {
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((gram[(r, c)] - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        self.inner
            .clone()
            .singular_values()
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }

    /// Returns the matrix whose row `i` is row `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.rows())?;
        Self::from_fn(self.rows(), self.cols(), |r, c| self.get(perm[r], c))
    }

    /// Returns the matrix whose column `j` is column `perm[j]` of `self`.
    pub fn permute_cols(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.cols())?;
        Self::from_fn(self.rows(), self.cols(), |r, c| self.get(r, perm[c]))
    }

    /// Multiplies row `i` by `row_phases[i]` and column `j` by `col_phases[j]`.
    pub fn rephase(&self, row_phases: &[Complex64], col_phases: &[Complex64]) -> Result<Self> {
        if row_phases.len() != self.rows() || col_phases.len() != self.cols() {
            return Err(Error::Shape("phase vector lengths do not match".into()));
        }
        Self::from_fn(self.rows(), self.cols(), |r, c| {
            row_phases[r] * self.get(r, c) * col_phases[c]
        })
    }
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::Shape(format!(
            "permutation of length {} for dimension {n}",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n {
            return Err(Error::OutOfBounds { index: p, len: n });
        }
        if std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidArgument(format!(
                "index {p} repeated in permutation"
            )));
        }
    }
    Ok(())
}

/// A square matrix `U_jk = <a_j|b_k>` checked to be unitary within a tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    matrix: ComplexMatrix,
    unitarity_tolerance: f64,
}

impl TransitionMatrix {
    pub fn new(matrix: ComplexMatrix, unitarity_tolerance: f64) -> Result<Self> {
        if unitarity_tolerance.is_nan() || unitarity_tolerance < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "unitarity tolerance must be non-negative, got {unitarity_tolerance}"
            )));
        }
        if !matrix.is_square() {
            return Err(Error::Shape(format!(
                "transition matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let residual = matrix.unitarity_residual();
        if residual > unitarity_tolerance {
            return Err(Error::NotUnitary {
                residual,
                tolerance: unitarity_tolerance,
            });
        }
        Ok(Self {
            matrix,
            unitarity_tolerance,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn unitarity_tolerance(&self) -> f64 {
        self.unitarity_tolerance
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.matrix.get(row, col)
    }

    /// The transition matrix of the swapped pair, `U^T`, for the same tolerance.
    pub fn transpose(&self) -> Self {
        Self {
            matrix: self.matrix.transpose(),
            unitarity_tolerance: self.unitarity_tolerance,
        }
    }

    pub fn conjugate(&self) -> Self {
        Self {
            matrix: self.matrix.conjugate(),
            unitarity_tolerance: self.unitarity_tolerance,
        }
    }
}

/// Row and column index lists picking out a submatrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct SubmatrixSelector {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl SubmatrixSelector {
    /// Both lists must be nonempty and strictly increasing.
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        check_index_list(&rows, "row")?;
        check_index_list(&cols, "column")?;
        Ok(Self { rows, cols })
    }

    /// Selects every row and column of an `rows x cols` matrix.
    pub fn full(rows: usize, cols: usize) -> Result<Self> {
        Self::new((0..rows).collect(), (0..cols).collect())
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    /// The same index sets with the roles of rows and columns exchanged.
    pub fn transposed(&self) -> Self {
        Self {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
        }
    }

    pub(crate) fn check_bounds(&self, rows: usize, cols: usize) -> Result<()> {
        if let Some(&r) = self.rows.last() {
            if r >= rows {
                return Err(Error::OutOfBounds {
                    index: r,
                    len: rows,
                });
            }
        }
        if let Some(&c) = self.cols.last() {
            if c >= cols {
                return Err(Error::OutOfBounds {
                    index: c,
                    len: cols,
                });
            }
        }
        Ok(())
    }
}

fn check_index_list(idx: &[usize], what: &str) -> Result<()> {
    if idx.is_empty() {
        return Err(Error::InvalidArgument(format!("empty {what} selection")));
    }
    if idx.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!(
            "{what} indices must be strictly increasing: {idx:?}"
        )));
    }
    Ok(())
}
