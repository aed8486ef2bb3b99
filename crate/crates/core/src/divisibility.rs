//! 1-divisibility (`ξ = a ∧ b` with `b ∈ Λ¹`) and the rank of a form.
//!
//! A nonzero `ξ ∈ Λᵏ` is 1-divisible exactly when the linear map
//! `v ↦ v ∧ ξ` on `Λ¹` has a nontrivial kernel.

use crate::algebra::{left_wedge_matrix, right_wedge_matrix, KForm};
use crate::error::{Error, Result};
use crate::linalg::{numeric_rank, singular_values, Dense};
use crate::scalar::{Exact, Scalar};
use nalgebra::DMatrix;
use num_traits::Zero;

/// Relative singular value threshold for numeric kernels and ranks.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DivisibilityResult<S = f64> {
    pub divisible: bool,
    /// `a ∈ Λ^{k−1}` with `a ∧ b = ξ`.
    pub factor_a: Option<KForm<S>>,
    /// `b ∈ Λ¹` (unit length in float mode).
    pub factor_b: Option<KForm<S>>,
    /// `dim { v ∈ Λ¹ : v ∧ ξ = 0 }`.
    pub kernel_dim: usize,
}

fn check_degree<S: Scalar>(x: &KForm<S>) -> Result<()> {
    if x.degree() == 0 {
        return Err(Error::Precondition("a form of degree k ≥ 1".into()));
    }
    Ok(())
}

fn zero_result<S: Scalar>(x: &KForm<S>) -> Result<DivisibilityResult<S>> {
    let n = x.n();
    Ok(DivisibilityResult {
        divisible: true,
        factor_a: Some(KForm::zero(n, x.degree() - 1)?),
        factor_b: Some(KForm::basis(n, &[1])?),
        kernel_dim: n,
    })
}

/// Decide 1-divisibility of a float form and recover a factorization.
pub fn one_divisible(x: &KForm) -> Result<DivisibilityResult> {
    check_degree(x)?;
    let (n, k) = (x.n(), x.degree());
    if x.is_zero() {
        return zero_result(x);
    }
    if k == n {
        // Every top-degree form is c e^{1…n−1} ∧ e^n.
        let b = KForm::basis(n, &[n])?;
        return finish_float(x, b, n);
    }
    let a = left_wedge_matrix(x, 1)?.to_dmatrix(); // v ↦ ξ ∧ v, same kernel as v ↦ v ∧ ξ
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let s_max = svd.singular_values.max();
    // Singular values come unsorted from nalgebra; pair them with rows of Vᵀ.
    // Columns beyond the row count (wide matrices) are always in the kernel.
    let mut pairs: Vec<(f64, usize)> = (0..n)
        .map(|i| {
            (
                if i < svd.singular_values.len() {
                    svd.singular_values[i]
                } else {
                    0.0
                },
                i,
            )
        })
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let kernel: Vec<usize> = pairs
        .iter()
        .filter(|(s, _)| *s <= RANK_TOL * s_max)
        .map(|&(_, i)| i)
        .collect();
    let kernel_dim = kernel.len();
    if kernel_dim == 0 {
        return Ok(DivisibilityResult {
            divisible: false,
            factor_a: None,
            factor_b: None,
            kernel_dim,
        });
    }
    // The smallest singular value sits furthest from the threshold.
    let row = kernel[0];
    let coeffs: Vec<f64> = if row < v_t.nrows() {
        v_t.row(row).iter().copied().collect()
    } else {
        full_kernel_vector(&a)
    };
    let b = KForm::from_coeffs(n, 1, coeffs)?;
    let b = b.scale(&(1.0 / b.norm()));
    finish_float(x, b, kernel_dim)
}

fn full_kernel_vector(a: &DMatrix<f64>) -> Vec<f64> {
    let full = a.transpose() * a;
    let (_, v) = crate::linalg::min_eigenpair(&full);
    v.iter().copied().collect()
}

fn finish_float(x: &KForm, b: KForm, kernel_dim: usize) -> Result<DivisibilityResult> {
    let k = x.degree();
    let w = right_wedge_matrix(&b, k - 1)?.to_dmatrix();
    let rhs = nalgebra::DVector::from_column_slice(x.coeffs());
    let sol = w
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::Numerical(e.to_string()))?;
    let a = KForm::from_coeffs(x.n(), k - 1, sol.iter().copied().collect())?;
    let residual = (a.wedge(&b)? - x).norm();
    if residual > 1e-8 * x.norm().max(1.0) {
        return Err(Error::Numerical(format!("factor reconstruction residual {residual:e}")));
    }
    Ok(DivisibilityResult {
        divisible: true,
        factor_a: Some(a),
        factor_b: Some(b),
        kernel_dim,
    })
}

/// Exact-arithmetic 1-divisibility. The factor `b` is not normalized.
pub fn one_divisible_exact(x: &KForm<Exact>) -> Result<DivisibilityResult<Exact>> {
    check_degree(x)?;
    let (n, k) = (x.n(), x.degree());
    if x.is_zero() {
        return zero_result(x);
    }
    let kernel = if k == n {
        (0..n)
            .rev()
            .map(|i| {
                let mut v = vec![Exact::zero(); n];
                v[i] = <Exact as Scalar>::from_i64(1);
                v
            })
            .collect()
    } else {
        left_wedge_matrix(x, 1)?.null_space(0.0)
    };
    let kernel_dim = kernel.len();
    let Some(v) = kernel.into_iter().next() else {
        return Ok(DivisibilityResult {
            divisible: false,
            factor_a: None,
            factor_b: None,
            kernel_dim: 0,
        });
    };
    let b = KForm::from_coeffs(n, 1, v)?;
    let w = right_wedge_matrix(&b, k - 1)?;
    let mut aug = Dense::zeros(w.rows, w.cols + 1);
    for i in 0..w.rows {
        for j in 0..w.cols {
            aug.set(i, j, w.get(i, j).clone());
        }
        aug.set(i, w.cols, x.coeffs()[i].clone());
    }
    let pivots = aug.rref(0.0);
    if pivots.contains(&w.cols) {
        return Err(Error::Numerical("inconsistent exact factorization".into()));
    }
    let mut sol = vec![Exact::zero(); w.cols];
    for (r, &p) in pivots.iter().enumerate() {
        sol[p] = aug.get(r, w.cols).clone();
    }
    let a = KForm::from_coeffs(n, k - 1, sol)?;
    debug_assert_eq!(&a.wedge(&b)?, x);
    Ok(DivisibilityResult {
        divisible: true,
        factor_a: Some(a),
        factor_b: Some(b),
        kernel_dim,
    })
}

/// Matrix whose column `i` holds the coefficients of `e^i ⌟ ξ`.
fn interior_matrix<S: Scalar>(x: &KForm<S>) -> Result<Dense<S>> {
    let n = x.n();
    let rows = crate::multi_index::binomial(n, x.degree() - 1);
    let mut m = Dense::zeros(rows, n);
    for i in 0..n {
        let col = KForm::basis(n, &[i + 1])?.interior_product(x)?;
        for (r, v) in col.coeffs().iter().enumerate() {
            m.set(r, i, v.clone());
        }
    }
    Ok(m)
}

/// Dimension of the smallest subspace `F ⊂ ℝⁿ` with `ξ ∈ Λᵏ(F)`, computed as
/// the rank of `b ↦ b ⌟ ξ`.
pub fn form_rank(x: &KForm) -> Result<usize> {
    if x.degree() == 0 || x.is_zero() {
        return Ok(0);
    }
    Ok(numeric_rank(&interior_matrix(x)?.to_dmatrix(), RANK_TOL))
}

pub fn form_rank_exact(x: &KForm<Exact>) -> Result<usize> {
    if x.degree() == 0 || x.is_zero() {
        return Ok(0);
    }
    Ok(interior_matrix(x)?.rank(0.0))
}

/// Singular values of `v ↦ v ∧ ξ`, descending; exposed for diagnostics.
pub fn wedge_map_singular_values(x: &KForm) -> Result<Vec<f64>> {
    if x.degree() >= x.n() {
        return Ok(vec![0.0; x.n()]);
    }
    Ok(singular_values(&left_wedge_matrix(x, 1)?.to_dmatrix()))
}
