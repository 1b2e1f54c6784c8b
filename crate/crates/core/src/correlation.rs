use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

use crate::scalar::Scalar;

/// Smallest eigenvalue accepted for a correlation matrix.
pub const PSD_TOLERANCE: f64 = -1e-8;

const SYMMETRY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorrelationError {
    #[error("correlation matrix is empty")]
    Empty,

    #[error("row {row} has {len} entries, expected {dim}")]
    NotSquare { row: usize, len: usize, dim: usize },

    #[error("entry ({row}, {col}) is not finite")]
    NotFinite { row: usize, col: usize },

    #[error("entry ({row}, {col}) = {value} differs from its transpose")]
    Asymmetric { row: usize, col: usize, value: f64 },

    #[error("diagonal entry {index} is {value}, expected 1")]
    Diagonal { index: usize, value: f64 },

    #[error("entry ({row}, {col}) = {value} is outside [-1, 1]")]
    OutOfRange { row: usize, col: usize, value: f64 },

    #[error("uniform correlation {value} is below the bound {bound} = -1/(d-1) for d = {dim}")]
    UniformBelowBound { value: f64, bound: f64, dim: usize },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue}")]
    NotPsd { min_eigenvalue: f64 },
}

/// A validated correlation matrix: symmetric, unit diagonal, entries in
/// `[-1, 1]` and smallest eigenvalue at least [`PSD_TOLERANCE`].
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix<T> {
    dim: usize,
    entries: Vec<T>,
}

impl<T: Scalar> CorrelationMatrix<T> {
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![T::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = T::one();
        }
        Self { dim, entries }
    }

    /// Ones on the diagonal and `value` everywhere else.
    ///
    /// Positive semidefinite exactly when `-1/(d-1) <= value <= 1`; the
    /// eigenvalues are `1 - value` and `1 + (d - 1) value`.
    pub fn uniform(dim: usize, value: T) -> Result<Self, CorrelationError> {
        if dim == 0 {
            return Err(CorrelationError::Empty);
        }
        if !value.is_finite() {
            return Err(CorrelationError::NotFinite { row: 0, col: 1 });
        }
        if value.abs() > T::one() {
            return Err(CorrelationError::OutOfRange {
                row: 0,
                col: 1,
                value: value.as_f64(),
            });
        }
        if dim > 1 {
            let bound = -(T::from_count(dim - 1)).recip();
            if value < bound {
                return Err(CorrelationError::UniformBelowBound {
                    value: value.as_f64(),
                    bound: bound.as_f64(),
                    dim,
                });
            }
        }
        let mut entries = vec![value; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = T::one();
        }
        Ok(Self { dim, entries })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self, CorrelationError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(CorrelationError::Empty);
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for (row, values) in rows.iter().enumerate() {
            if values.len() != dim {
                return Err(CorrelationError::NotSquare {
                    row,
                    len: values.len(),
                    dim,
                });
            }
            entries.extend_from_slice(values);
        }
        let matrix = Self { dim, entries };
        matrix.check_entries()?;
        let min_eigenvalue = matrix.smallest_eigenvalue();
        if !(min_eigenvalue >= PSD_TOLERANCE) {
            return Err(CorrelationError::NotPsd { min_eigenvalue });
        }
        Ok(matrix)
    }

    fn check_entries(&self) -> Result<(), CorrelationError> {
        let d = self.dim;
        for row in 0..d {
            for col in 0..d {
                let value = self.get(row, col);
                if !value.is_finite() {
                    return Err(CorrelationError::NotFinite { row, col });
                }
                if row == col {
                    if (value - T::one()).abs().as_f64() > SYMMETRY_TOLERANCE {
                        return Err(CorrelationError::Diagonal {
                            index: row,
                            value: value.as_f64(),
                        });
                    }
                    continue;
                }
                if value.abs() > T::one() {
                    return Err(CorrelationError::OutOfRange {
                        row,
                        col,
                        value: value.as_f64(),
                    });
                }
                if (value - self.get(col, row)).abs().as_f64() > SYMMETRY_TOLERANCE {
                    return Err(CorrelationError::Asymmetric {
                        row,
                        col,
                        value: value.as_f64(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Smallest eigenvalue, computed in double precision.
    pub fn smallest_eigenvalue(&self) -> f64 {
        let d = self.dim;
        let m = DMatrix::from_fn(d, d, |i, j| self.get(i, j).as_f64());
        SymmetricEigen::new(m)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.entries[row * self.dim + col]
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.entries[row * self.dim..(row + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.entries.chunks(self.dim).map(<[T]>::to_vec).collect()
    }

    /// Same matrix with assets reordered: entry `(i, j)` of the result is
    /// entry `(order[i], order[j])` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let d = self.dim;
        assert_eq!(order.len(), d, "permutation length");
        let mut entries = Vec::with_capacity(d * d);
        for &i in order {
            for &j in order {
                entries.push(self.get(i, j));
            }
        }
        Self { dim: d, entries }
    }
}
