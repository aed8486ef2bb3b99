//! Ext. quasiaffine functions `f(ξ) = Σ_s ⟨c_s; ξ^s⟩` (equivalently ext.
//! polyaffine, equivalently ext. one affine): representation, evaluation,
//! extraction from a black box, and Jensen-type witnesses against
//! ext. polyconvexity.

mod extract;
mod jensen;
mod null_lagrangian;

pub use extract::extract_representation;
pub use jensen::{jensen_violation, JensenVerdict, JensenWitness, MOMENT_TOL};
pub use null_lagrangian::{null_lagrangian_check, power_slice, NullLagrangianReport};

use crate::algebra::KForm;
use crate::error::{Error, Result};
use crate::rng::stream;
use crate::scalar::Scalar;
use rand::Rng;
use serde::Serialize;

/// Coefficients `(c_0, …, c_{⌊n/k⌋})` with `c_s ∈ Λ^{sk}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyaffineRep<S = f64> {
    n: usize,
    k: usize,
    c: Vec<KForm<S>>,
}

/// Largest power `s` with `ξ^s` possibly nonzero, `⌊n/k⌋`.
pub fn max_power(n: usize, k: usize) -> usize {
    n / k
}

impl<S: Scalar> PolyaffineRep<S> {
    pub fn new(n: usize, k: usize, c: Vec<KForm<S>>) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::Precondition("1 ≤ k ≤ n".into()));
        }
        let m = max_power(n, k);
        if c.len() != m + 1 {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficients for n = {n}, k = {k}, got {}",
                m + 1,
                c.len()
            )));
        }
        for (s, cs) in c.iter().enumerate() {
            if cs.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: cs.n(),
                });
            }
            if cs.degree() != s * k {
                return Err(Error::DegreeMismatch {
                    expected: s * k,
                    found: cs.degree(),
                });
            }
        }
        Ok(Self { n, k, c })
    }

    pub fn zero(n: usize, k: usize) -> Result<Self> {
        let c = (0..=max_power(n, k))
            .map(|s| KForm::zero(n, s * k))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, k, c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn coefficients(&self) -> &[KForm<S>] {
        &self.c
    }

    pub fn coefficient_mut(&mut self, s: usize) -> &mut KForm<S> {
        &mut self.c[s]
    }

    /// `c_0 + Σ_{s≥1} ⟨c_s; ξ^s⟩`.
    pub fn eval(&self, x: &KForm<S>) -> Result<S> {
        if x.n() != self.n || x.degree() != self.k {
            return Err(Error::DegreeMismatch {
                expected: self.k,
                found: x.degree(),
            });
        }
        let mut acc = self.c[0].coeffs()[0].clone();
        let mut power = KForm::scalar(self.n, S::one());
        for cs in &self.c[1..] {
            power = power.wedge(x)?;
            acc = acc + cs.inner(&power)?;
        }
        Ok(acc)
    }

    /// Drops the terms that vanish identically (`c_s`, `s ≥ 2`, when `k` is odd).
    pub fn canonical(&self) -> Self {
        let mut out = self.clone();
        if self.k % 2 == 1 {
            for cs in out.c.iter_mut().skip(2) {
                *cs = KForm::zero(self.n, cs.degree()).expect("valid degree");
            }
        }
        out
    }
}

impl PolyaffineRep<f64> {
    /// Random coefficients; terms that vanish identically are left at zero.
    pub fn random<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Self> {
        let c = (0..=max_power(n, k))
            .map(|s| KForm::random(n, s * k, rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(n, k, c)?.canonical())
    }

    pub fn max_coefficient_difference(&self, other: &Self) -> f64 {
        self.c
            .iter()
            .zip(&other.c)
            .map(|(a, b)| (a - b).max_abs())
            .fold(0.0, f64::max)
    }

    /// The represented function as a closure (panics on degree mismatch).
    pub fn as_fn(&self) -> impl Fn(&KForm) -> f64 + Sync + '_ {
        move |x: &KForm| self.eval(x).expect("argument of the representation's degree")
    }

    /// Gradient of `ξ ↦ Σ_s ⟨c_s; ξ^s⟩` by the Leibniz rule:
    /// `∂_I ⟨c; ξ^s⟩ = s ⟨c; e^I ∧ ξ^{s−1}⟩` (k even or s = 1).
    pub fn gradient(&self, x: &KForm) -> Result<KForm> {
        let mut grad = self.c[1].clone();
        for (s, cs) in self.c.iter().enumerate().skip(2) {
            let p = x.wedge_power(s - 1)?;
            for i in 0..grad.dim() {
                let e = crate::algebra::basis_form::<f64>(self.n, self.k, i);
                grad.coeffs_mut()[i] += s as f64 * cs.inner(&e.wedge(&p)?)?;
            }
        }
        Ok(grad)
    }
}

/// Result of sampling the ext. one affinity defect of a function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OneAffineReport {
    pub samples: usize,
    /// Largest `|g(t) − g(0) − t(g(1) − g(0))| / max(1, |g(0)|, |g(1)|, |g(t)|)`
    /// over samples `g(t) = f(ξ + t α ∧ β)`.
    pub max_residual: f64,
    pub passes: bool,
}

/// Samples random lines `t ↦ f(ξ + t α ∧ β)` and measures their deviation
/// from affinity.
pub fn verify_ext_one_affine<F>(
    f: F,
    n: usize,
    k: usize,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<OneAffineReport>
where
    F: Fn(&KForm) -> f64,
{
    if k == 0 || k > n {
        return Err(Error::Precondition("1 ≤ k ≤ n".into()));
    }
    let mut rng = stream(seed, 0);
    let mut max_residual: f64 = 0.0;
    for _ in 0..samples {
        let xi = KForm::random(n, k, &mut rng)?;
        let a = KForm::random(n, k - 1, &mut rng)?;
        let b = KForm::random(n, 1, &mut rng)?;
        let t: f64 = rng.gen_range(-2.0..2.0);
        let dir = a.wedge(&b)?;
        let g0 = f(&xi);
        let g1 = f(&(&xi + &dir));
        let gt = f(&(&xi + &dir.scale(&t)));
        let scale = 1f64.max(g0.abs()).max(g1.abs()).max(gt.abs());
        let r = (gt - g0 - t * (g1 - g0)).abs() / scale;
        max_residual = max_residual.max(if r.is_nan() { f64::INFINITY } else { r });
    }
    Ok(OneAffineReport {
        samples,
        max_residual,
        passes: max_residual <= tol,
    })
}

/// Defect of `f(ξ + Σ t_i α_i ∧ a) = f(ξ) + Σ t_i [f(ξ + α_i ∧ a) − f(ξ)]`.
pub fn one_affine_sum_defect<F>(f: F, xi: &KForm, alphas: &[KForm], a: &KForm, ts: &[f64]) -> Result<f64>
where
    F: Fn(&KForm) -> f64,
{
    let f0 = f(xi);
    let mut arg = xi.clone();
    let mut rhs = f0;
    for (alpha, t) in alphas.iter().zip(ts) {
        let d = alpha.wedge(a)?;
        arg += &d.scale(t);
        rhs += t * (f(&(xi + &d)) - f0);
    }
    Ok((f(&arg) - rhs).abs())
}

/// Defect of the two-pair identity
/// `[f(ξ+α∧a+β∧b) − f(ξ)] + [f(ξ+β∧a+α∧b) − f(ξ)]
///  = Σ_{u∈{α,β}, v∈{a,b}} [f(ξ + u∧v) − f(ξ)]`.
pub fn two_pair_defect<F>(f: F, xi: &KForm, alpha: &KForm, beta: &KForm, a: &KForm, b: &KForm) -> Result<f64>
where
    F: Fn(&KForm) -> f64,
{
    let f0 = f(xi);
    let (aa, ba, ab, bb) = (alpha.wedge(a)?, beta.wedge(a)?, alpha.wedge(b)?, beta.wedge(b)?);
    let lhs = (f(&(xi + &aa + &bb)) - f0) + (f(&(xi + &ba + &ab)) - f0);
    let rhs = [aa, ba, ab, bb].iter().map(|d| f(&(xi + d)) - f0).sum::<f64>();
    Ok((lhs - rhs).abs())
}
