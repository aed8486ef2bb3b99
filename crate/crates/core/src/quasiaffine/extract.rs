use super::{max_power, PolyaffineRep};
use crate::algebra::KForm;
use crate::error::{Error, Result};
use crate::linalg::Dense;
use crate::multi_index::basis;
use crate::scalar::Scalar;

/// Residual tolerance (relative) accepted by [`extract_representation`].
pub const RECONSTRUCTION_TOL: f64 = 1e-8;

/// Homogeneous parts `f_0(ξ), …, f_m(ξ)` from `f(tξ)` at `t = 1, …, m+1`.
fn homogeneous_parts<S: Scalar, F: Fn(&KForm<S>) -> S>(f: &F, inv_nodes: &Dense<S>, xi: &KForm<S>, m: usize) -> Vec<S> {
    let values: Vec<S> = (1..=m + 1).map(|t| f(&xi.scale(&S::from_i64(t as i64)))).collect();
    inv_nodes.mul_vec(&values)
}

fn inverse_vandermonde<S: Scalar>(m: usize) -> Result<Dense<S>> {
    let size = m + 1;
    let mut v = Dense::zeros(size, size);
    for i in 0..size {
        let t = S::from_i64(i as i64 + 1);
        let mut p = S::one();
        for s in 0..size {
            v.set(i, s, p.clone());
            p = p * t.clone();
        }
    }
    let mut inv = Dense::zeros(size, size);
    for col in 0..size {
        let mut rhs = vec![S::zero(); size];
        rhs[col] = S::one();
        let x = v
            .solve(&rhs)
            .ok_or_else(|| Error::Numerical("singular Vandermonde system".into()))?;
        for (row, val) in x.into_iter().enumerate() {
            inv.set(row, col, val);
        }
    }
    Ok(inv)
}

/// Recovers `c_0, …, c_{⌊n/k⌋}` from an ext. one affine black box.
///
/// For each `J` of length `sk`, split `J` into its consecutive `k`-blocks
/// `I¹, …, I^s` and put `θ = Σ_m e^{I^m}`. Then `θ^s = κ e^J` with
/// `κ = s!` for even `k` (or `s = 1`) and `κ = 0` for odd `k`, `s ≥ 2`, so
/// `c_s[J] = f_s(θ) / κ`, where the degree-`s` part `f_s` is isolated by a
/// Vandermonde solve. When `κ = 0` the coefficient is irrelevant and set to 0.
///
/// The result is checked against `f` at deterministic probe points; a relative
/// residual above [`RECONSTRUCTION_TOL`] means `f` was not ext. one affine.
pub fn extract_representation<S, F>(f: F, n: usize, k: usize) -> Result<PolyaffineRep<S>>
where
    S: Scalar,
    F: Fn(&KForm<S>) -> S,
{
    if k == 0 || k > n {
        return Err(Error::Precondition("1 ≤ k ≤ n".into()));
    }
    let m = max_power(n, k);
    let inv = inverse_vandermonde::<S>(m)?;
    let mut c = Vec::with_capacity(m + 1);
    c.push(KForm::scalar(n, f(&KForm::zero(n, k)?)));
    for s in 1..=m {
        let mut cs = KForm::zero(n, s * k)?;
        for (rank, j) in basis(n, s * k).iter().enumerate() {
            let mut theta = KForm::<S>::zero(n, k)?;
            for block in j.chunks(k) {
                theta += &KForm::basis(n, block)?;
            }
            let kappa = theta.wedge_power(s)?.coeffs()[rank].clone();
            if kappa.is_zero() {
                continue;
            }
            let part = homogeneous_parts(&f, &inv, &theta, m)[s].clone();
            cs.coeffs_mut()[rank] = part / kappa;
        }
        c.push(cs);
    }
    let rep = PolyaffineRep::new(n, k, c)?;
    check_reconstruction(&f, &rep)?;
    Ok(rep)
}

fn check_reconstruction<S: Scalar, F: Fn(&KForm<S>) -> S>(f: &F, rep: &PolyaffineRep<S>) -> Result<()> {
    let (n, k) = (rep.n(), rep.degree());
    let dim = crate::multi_index::binomial(n, k);
    for probe in 0..6i64 {
        let coeffs = (0..dim as i64)
            .map(|i| S::from_ratio((i * 7 + probe * 3) % 11 - 5, 3 + probe))
            .collect();
        let x = KForm::from_coeffs(n, k, coeffs)?;
        let (want, got) = (f(&x), rep.eval(&x)?);
        let scale = want.to_f64().abs().max(1.0);
        let residual = (want - got).to_f64().abs() / scale;
        if residual.is_nan() || residual > RECONSTRUCTION_TOL {
            return Err(Error::InvalidInput(format!(
                "function is not ext. one affine: reconstruction residual {residual:.3e}"
            )));
        }
    }
    Ok(())
}
