//! Small dense linear algebra: exact/float Gaussian elimination over any
//! [`Scalar`] and `f64` spectral helpers on top of nalgebra.

use crate::scalar::Scalar;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Row-major dense matrix over a scalar field.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense<S> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<S>,
}

impl<S: Scalar> Dense<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m.data[i * size + i] = S::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let data = rows.iter().flat_map(|row| row.iter().cloned()).collect();
        Self { rows: r, cols: c, data }
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(S::zero(), |acc, j| acc + self.get(i, j).clone() * v[j].clone()))
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j).clone() + a.clone() * other.get(l, j).clone();
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_f64())
    }

    /// Determinant by Gaussian elimination with largest-magnitude pivoting.
    pub fn determinant(&self) -> S {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = S::one();
        for col in 0..n {
            let pivot = (col..n)
                .filter(|&r| !a.get(r, col).is_zero())
                .max_by(|&x, &y| a.get(x, col).magnitude().total_cmp(&a.get(y, col).magnitude()));
            let Some(p) = pivot else {
                return S::zero();
            };
            if p != col {
                a.swap_rows(p, col);
                det = -det;
            }
            let pv = a.get(col, col).clone();
            det = det * pv.clone();
            for r in col + 1..n {
                let factor = a.get(r, col).clone() / pv.clone();
                if factor.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = a.get(r, c).clone() - factor.clone() * a.get(col, c).clone();
                    a.set(r, c, v);
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Reduced row echelon form. Entries with magnitude `<= zero_tol` count as
    /// zero (use `0.0` for exact scalars). Returns the pivot columns.
    pub fn rref(&mut self, zero_tol: f64) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let best = (row..self.rows)
                .max_by(|&x, &y| self.get(x, col).magnitude().total_cmp(&self.get(y, col).magnitude()))
                .unwrap();
            let mag = self.get(best, col).magnitude();
            if self.get(best, col).is_zero() || mag <= zero_tol {
                continue;
            }
            self.swap_rows(best, row);
            let pv = self.get(row, col).clone();
            for c in 0..self.cols {
                let v = self.get(row, c).clone() / pv.clone();
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let factor = self.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for c in 0..self.cols {
                    let v = self.get(r, c).clone() - factor.clone() * self.get(row, c).clone();
                    self.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    /// Basis of the right null space, one vector per free column.
    pub fn null_space(&self, zero_tol: f64) -> Vec<Vec<S>> {
        let mut a = self.clone();
        let pivots = a.rref(zero_tol);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![S::zero(); self.cols];
                v[f] = S::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -a.get(r, f).clone();
                }
                v
            })
            .collect()
    }

    pub fn rank(&self, zero_tol: f64) -> usize {
        let mut a = self.clone();
        a.rref(zero_tol).len()
    }

    /// Solve `A x = b` for square nonsingular `A`.
    pub fn solve(&self, b: &[S]) -> Option<Vec<S>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Self::zeros(n, n + 1);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n, b[i].clone());
        }
        let pivots = aug.rref(0.0);
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        Some((0..n).map(|i| aug.get(i, n).clone()).collect())
    }
}

/// Smallest eigenvalue and a unit eigenvector of a symmetric matrix.
pub fn min_eigenpair(m: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let (idx, val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, v)| (i, *v))
        .expect("non-empty matrix");
    (val, eig.eigenvectors.column(idx).into_owned())
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    SymmetricEigen::new(m.clone()).eigenvalues.min()
}

/// Orthonormal basis (as columns) of the column space of `a`, with the
/// relative singular value threshold `rel_tol`.
pub fn range_basis(a: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    // Eigen-decomposition of A Aᵀ is cheap here (at most 20×20).
    let gram = a * a.transpose();
    let eig = SymmetricEigen::new(gram);
    let max = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(*v));
    if max <= 0.0 {
        return DMatrix::zeros(a.nrows(), 0);
    }
    let cols: Vec<DVector<f64>> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, v)| v.sqrt() > rel_tol * max.sqrt())
        .map(|(i, _)| eig.eigenvectors.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        return DMatrix::zeros(a.nrows(), 0);
    }
    DMatrix::from_columns(&cols)
}

/// Singular values, descending.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Numeric rank with threshold `rel_tol · σ_max`.
pub fn numeric_rank(a: &DMatrix<f64>, rel_tol: f64) -> usize {
    let s = singular_values(a);
    let Some(&max) = s.first() else { return 0 };
    if max == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > rel_tol * max).count()
}
