//! Dense exterior algebra over `ℝⁿ`.
//!
//! Forms are coefficient vectors over the lexicographically ordered basis
//! `{e^I}`. Every operation is generic over [`Scalar`](crate::scalar::Scalar),
//! so the same code runs in `f64` and in exact rational arithmetic.

mod form;
mod linear_map;
mod transform;

pub use form::KForm;
pub use linear_map::{FormOperator, LinearMap};
pub use transform::hodge_transform;

use crate::error::Result;
use crate::linalg::Dense;
use crate::multi_index::{basis, binomial};
use crate::scalar::Scalar;

/// Matrix of `a ↦ a ∧ b` from `Λ^{p}` to `Λ^{p+q}` for a fixed right factor
/// `b` of degree `q`, where `p` is given.
pub fn right_wedge_matrix<S: Scalar>(b: &KForm<S>, p: usize) -> Result<Dense<S>> {
    let n = b.n();
    let cols = binomial(n, p);
    let mut m = Dense::zeros(binomial(n, p + b.degree()), cols);
    for j in 0..cols {
        let mut e = KForm::zero(n, p)?;
        e.coeffs_mut()[j] = S::one();
        let img = e.wedge(b)?;
        for (i, v) in img.coeffs().iter().enumerate() {
            m.set(i, j, v.clone());
        }
    }
    Ok(m)
}

/// Matrix of `b ↦ a ∧ b` from `Λ^{q}` to `Λ^{p+q}` for a fixed left factor `a`.
pub fn left_wedge_matrix<S: Scalar>(a: &KForm<S>, q: usize) -> Result<Dense<S>> {
    let n = a.n();
    let cols = binomial(n, q);
    let mut m = Dense::zeros(binomial(n, a.degree() + q), cols);
    for j in 0..cols {
        let mut e = KForm::zero(n, q)?;
        e.coeffs_mut()[j] = S::one();
        let img = a.wedge(&e)?;
        for (i, v) in img.coeffs().iter().enumerate() {
            m.set(i, j, v.clone());
        }
    }
    Ok(m)
}

/// Basis element `e^I` by lexicographic position.
pub fn basis_form<S: Scalar>(n: usize, k: usize, rank: usize) -> KForm<S> {
    KForm::basis(n, &basis(n, k)[rank]).expect("rank within basis")
}
