use super::KForm;
use crate::error::{Error, Result};
use crate::linalg::Dense;
use crate::multi_index::basis;
use crate::scalar::Scalar;

/// A linear map `T: ℝⁿ → ℝⁿ`; entry `(i, j)` is the `e_i` component of `T e_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap<S = f64> {
    matrix: Dense<S>,
}

impl<S: Scalar> LinearMap<S> {
    pub fn new(matrix: Dense<S>) -> Result<Self> {
        if matrix.rows != matrix.cols {
            return Err(Error::InvalidInput(format!(
                "linear map must be square, got {}×{}",
                matrix.rows, matrix.cols
            )));
        }
        if matrix.data.iter().any(|v| !v.to_f64().is_finite()) {
            return Err(Error::InvalidInput("linear map has non-finite entries".into()));
        }
        Ok(Self { matrix })
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Result<Self> {
        Self::new(Dense::from_rows(rows))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: Dense::identity(n),
        }
    }

    pub fn n(&self) -> usize {
        self.matrix.rows
    }

    pub fn matrix(&self) -> &Dense<S> {
        &self.matrix
    }

    pub fn transpose(&self) -> Self {
        Self {
            matrix: self.matrix.transpose(),
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            matrix: self.matrix.matmul(&other.matrix),
        }
    }

    /// Pullback on 1-forms: `T*e^i = Σ_j T_ij e^j`.
    pub fn pullback_covector(&self, i: usize) -> KForm<S> {
        let n = self.n();
        let coeffs = (0..n).map(|j| self.matrix.get(i - 1, j).clone()).collect();
        KForm::from_coeffs(n, 1, coeffs).expect("length n")
    }

    /// Matrix of the pullback `T*: Λᵏ → Λᵏ` in the lexicographic basis.
    /// Entry `(J, I)` is the minor `det T[I, J]` (rows `I`, columns `J`),
    /// so that `T*(ξ)_J = Σ_I det T[I, J] ξ_I`.
    pub fn pullback(&self, k: usize) -> Result<FormOperator<S>> {
        let n = self.n();
        if k > n {
            return Err(Error::DegreeOverflow { degree: k, n });
        }
        let b = basis(n, k);
        let dim = b.len();
        let mut m = Dense::zeros(dim, dim);
        for (ci, rows) in b.iter().enumerate() {
            for (ri, cols) in b.iter().enumerate() {
                let mut minor = Dense::zeros(k, k);
                for (a, &r) in rows.iter().enumerate() {
                    for (c, &col) in cols.iter().enumerate() {
                        minor.set(a, c, self.matrix.get(r - 1, col - 1).clone());
                    }
                }
                m.set(ri, ci, minor.determinant());
            }
        }
        Ok(FormOperator { n, k, matrix: m })
    }
}

/// A linear operator `Λᵏ → Λᵏ` in the lexicographic basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FormOperator<S = f64> {
    pub n: usize,
    pub k: usize,
    pub matrix: Dense<S>,
}

impl<S: Scalar> FormOperator<S> {
    pub fn apply(&self, x: &KForm<S>) -> Result<KForm<S>> {
        if x.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.n(),
            });
        }
        if x.degree() != self.k {
            return Err(Error::DegreeMismatch {
                expected: self.k,
                found: x.degree(),
            });
        }
        KForm::from_coeffs(self.n, self.k, self.matrix.mul_vec(x.coeffs()))
    }
}
