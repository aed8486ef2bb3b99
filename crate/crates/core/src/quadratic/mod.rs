//! Quadratic forms `f(ξ) = ⟨Mξ; ξ⟩` on `Λᵏ(ℝⁿ)` and their convexity notions.
//!
//! * convexity: `M ⪰ 0`;
//! * ext. one convexity: `f(a ∧ b) ≥ 0` for all `a ∈ Λ^{k−1}`, `b ∈ Λ¹`,
//!   decided through the γ-infimum over unit decomposable forms;
//! * ext. polyconvexity: existence of `β ∈ Λ^{2k}` with `f(ξ) ≥ ⟨β; ξ ∧ ξ⟩`.

mod certificate;
mod gamma;
mod marcellini;

pub use certificate::{
    polyconvexity_certificate, verify_certificate, CertificateOptions, CertificateResult, CertificateStatus,
};
pub use gamma::{
    gamma_grid_search, gamma_infimum, gamma_supremum, is_ext_one_convex, proposition_c_constant, GammaOptions,
    GammaResult, OneConvexity,
};
pub use marcellini::marcellini_lambda;

use crate::algebra::{KForm, LinearMap};
use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, Dense};
use crate::multi_index::{basis, binomial, wedge_table};
use crate::scalar::Scalar;
use nalgebra::DMatrix;

/// Default eigenvalue feasibility tolerance.
pub const EIG_TOL: f64 = 1e-8;

/// A symmetric operator `M` on `Λᵏ(ℝⁿ)` defining `f(ξ) = ⟨Mξ; ξ⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm<S = f64> {
    n: usize,
    k: usize,
    matrix: Dense<S>,
}

impl<S: Scalar> QuadraticForm<S> {
    /// Builds the form, replacing `M` by its symmetric part.
    pub fn new(n: usize, k: usize, matrix: Dense<S>) -> Result<Self> {
        if k > n {
            return Err(Error::DegreeOverflow { degree: k, n });
        }
        let dim = binomial(n, k);
        if matrix.rows != dim || matrix.cols != dim {
            return Err(Error::InvalidInput(format!(
                "matrix must be {dim}×{dim} for n = {n}, k = {k}, got {}×{}",
                matrix.rows, matrix.cols
            )));
        }
        let half = S::one() / S::from_i64(2);
        let mut sym = matrix.clone();
        for i in 0..dim {
            for j in 0..dim {
                let v = (matrix.get(i, j).clone() + matrix.get(j, i).clone()) * half.clone();
                sym.set(i, j, v);
            }
        }
        Ok(Self { n, k, matrix: sym })
    }

    pub fn identity(n: usize, k: usize) -> Self {
        Self {
            n,
            k,
            matrix: Dense::identity(binomial(n, k)),
        }
    }

    pub fn zero(n: usize, k: usize) -> Self {
        let dim = binomial(n, k);
        Self {
            n,
            k,
            matrix: Dense::zeros(dim, dim),
        }
    }

    /// `f(ξ) = Σ_r ⟨ℓ_r; ξ⟩²`.
    pub fn sum_of_squares(n: usize, k: usize, functionals: &[KForm<S>]) -> Result<Self> {
        let dim = binomial(n, k);
        let mut m = Dense::<S>::zeros(dim, dim);
        for l in functionals {
            if l.n() != n || l.degree() != k {
                return Err(Error::DegreeMismatch {
                    expected: k,
                    found: l.degree(),
                });
            }
            let c = l.coeffs();
            for i in 0..dim {
                for j in 0..dim {
                    let v = m.get(i, j).clone() + c[i].clone() * c[j].clone();
                    m.set(i, j, v);
                }
            }
        }
        Self::new(n, k, m)
    }

    /// The form `ξ ↦ ⟨β; ξ ∧ ξ⟩` for `β ∈ Λ^{2k}`; its matrix is
    /// `S(β)_{IJ} = ⟨β; e^I ∧ e^J⟩`.
    pub fn wedge_square(k: usize, beta: &KForm<S>) -> Result<Self> {
        let n = beta.n();
        if beta.degree() != 2 * k {
            return Err(Error::DegreeMismatch {
                expected: 2 * k,
                found: beta.degree(),
            });
        }
        let dim = binomial(n, k);
        let mut m = Dense::<S>::zeros(dim, dim);
        for &(a, b, o, neg) in &wedge_table(n, k, k).entries {
            let v = beta.coeffs()[o].clone();
            let v = if neg { -v } else { v };
            let cur = m.get(a, b).clone();
            m.set(a, b, cur + v);
        }
        Self::new(n, k, m)
    }

    /// `g(ξ) = ⟨e^{1234}; ξ ∧ ξ⟩ = 2(ξ₁₂ξ₃₄ − ξ₁₃ξ₂₄ + ξ₁₄ξ₂₃)` on `Λ²(ℝ⁴)`.
    pub fn pfaffian() -> Self {
        Self::wedge_square(2, &KForm::volume(4)).expect("degree 4 in n = 4")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn matrix(&self) -> &Dense<S> {
        &self.matrix
    }

    pub fn eval(&self, x: &KForm<S>) -> Result<S> {
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
        let mx = self.matrix.mul_vec(x.coeffs());
        Ok(mx
            .iter()
            .zip(x.coeffs())
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
    }

    /// `f + c·g` for forms on the same space.
    pub fn add_scaled(&self, c: &S, other: &Self) -> Result<Self> {
        if other.n != self.n || other.k != self.k {
            return Err(Error::InvalidInput("quadratic forms on different spaces".into()));
        }
        let mut m = self.matrix.clone();
        for (x, y) in m.data.iter_mut().zip(&other.matrix.data) {
            *x = x.clone() + c.clone() * y.clone();
        }
        Ok(Self {
            matrix: m,
            ..self.clone()
        })
    }

    /// `ξ ↦ f(T*ξ)`, whose matrix is `Pᵀ M P` with `P` the pullback matrix.
    pub fn compose_pullback(&self, t: &LinearMap<S>) -> Result<Self> {
        let p = t.pullback(self.k)?.matrix;
        let m = p.transpose().matmul(&self.matrix).matmul(&p);
        Self::new(self.n, self.k, m)
    }
}

impl QuadraticForm<f64> {
    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        self.matrix.to_dmatrix()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.to_dmatrix())
    }

    pub fn is_convex(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// `f(ξ) = ⟨T*ξ; ξ⟩` for a linear map `T`.
    pub fn from_pullback(t: &LinearMap<f64>, k: usize) -> Result<Self> {
        Self::new(t.n(), k, t.pullback(k)?.matrix)
    }

    /// Random symmetric matrix with standard normal entries.
    pub fn random<R: rand::Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Self> {
        let dim = binomial(n, k);
        let data = (0..dim * dim).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
        Self::new(
            n,
            k,
            Dense {
                rows: dim,
                cols: dim,
                data,
            },
        )
    }

    /// `f − c|ξ|²`.
    pub fn shift(&self, c: f64) -> Self {
        self.add_scaled(&-c, &Self::identity(self.n, self.k))
            .expect("same space")
    }

    /// Gradient `2Mξ`, used when a quadratic form drives a field optimizer.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.mul_vec(x).into_iter().map(|v| 2.0 * v).collect()
    }

    pub fn eval_slice(&self, x: &[f64]) -> f64 {
        self.matrix.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

/// Labels `e^I` of the basis of `Λᵏ(ℝⁿ)`, used in reports.
pub fn basis_labels(n: usize, k: usize) -> Vec<String> {
    basis(n, k)
        .iter()
        .map(|idx| idx.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","))
        .collect()
}
