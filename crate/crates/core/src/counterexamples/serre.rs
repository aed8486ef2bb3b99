use crate::algebra::KForm;
use crate::error::{Error, Result};
use crate::quadratic::QuadraticForm;
use crate::quasiaffine::JensenWitness;
use crate::scalar::Scalar;
use serde::Serialize;

fn e2<S: Scalar>(i: usize, j: usize) -> KForm<S> {
    KForm::basis(6, &[i, j]).expect("valid 2-index in n = 6")
}

fn lin<S: Scalar>(terms: &[(i64, usize, usize)]) -> KForm<S> {
    let mut f = KForm::zero(6, 2).expect("degree 2 in n = 6");
    for &(c, i, j) in terms {
        f += &e2::<S>(i, j).scale(&S::from_i64(c));
    }
    f
}

/// `g = ξ₁₂² + ξ₁₃² + ξ₂₃² + ξ₄₅² + ξ₄₆² + ξ₅₆² + h` with
/// `h = (ξ₁₄ − ξ₃₅ − ξ₂₆)² + (ξ₁₅ − ξ₃₄ + ξ₁₆)² + (ξ₂₄ − ξ₃₄ − ξ₁₆)² + ξ₂₅² + ξ₃₆²`,
/// where `ξ_ij` is the coefficient of `e^i ∧ e^j`.
pub fn build_serre_form<S: Scalar>() -> QuadraticForm<S> {
    let functionals: Vec<KForm<S>> = vec![
        lin(&[(1, 1, 2)]),
        lin(&[(1, 1, 3)]),
        lin(&[(1, 2, 3)]),
        lin(&[(1, 4, 5)]),
        lin(&[(1, 4, 6)]),
        lin(&[(1, 5, 6)]),
        lin(&[(1, 1, 4), (-1, 3, 5), (-1, 2, 6)]),
        lin(&[(1, 1, 5), (-1, 3, 4), (1, 1, 6)]),
        lin(&[(1, 2, 4), (-1, 3, 4), (-1, 1, 6)]),
        lin(&[(1, 2, 5)]),
        lin(&[(1, 3, 6)]),
    ];
    QuadraticForm::sum_of_squares(6, 2, &functionals).expect("functionals live on Λ²(ℝ⁶)")
}

/// `ξ(a,b,c,d) = (b+d) e¹⁴ + (c−a) e¹⁵ + a e¹⁶ + (c+a) e²⁴ + b e²⁶ + c e³⁴ + d e³⁵`,
/// a family on which `g` vanishes.
pub fn serre_xi_family<S: Scalar>(a: S, b: S, c: S, d: S) -> KForm<S> {
    let terms = [
        ((1, 4), b.clone() + d.clone()),
        ((1, 5), c.clone() - a.clone()),
        ((1, 6), a.clone()),
        ((2, 4), c.clone() + a),
        ((2, 6), b),
        ((3, 4), c),
        ((3, 5), d),
    ];
    let mut xi = KForm::zero(6, 2).expect("degree 2 in n = 6");
    for ((i, j), v) in terms {
        xi.set_coeff(&[i, j], v).expect("valid index");
    }
    xi
}

/// The nine nonzero coefficients of `½ ξ ∧ ξ` for `ξ = ξ(a,b,c,d)`, as
/// `(index, value)` pairs.
pub fn serre_half_square_expansion<S: Scalar>(a: S, b: S, c: S, d: S) -> Vec<([usize; 4], S)> {
    let (a2, b2, c2, d2) = (
        a.clone() * a.clone(),
        b.clone() * b.clone(),
        c.clone() * c.clone(),
        d.clone() * d.clone(),
    );
    let (ab, ac, ad) = (a.clone() * b.clone(), a.clone() * c.clone(), a.clone() * d.clone());
    let (bc, bd, cd) = (b.clone() * c.clone(), b * d.clone(), c * d);
    vec![
        ([1, 2, 4, 5], c2.clone() - a2.clone()),
        ([1, 2, 4, 6], ac.clone() + a2 - b2 - bd.clone()),
        ([1, 2, 5, 6], ab - bc.clone()),
        ([1, 3, 4, 5], c2 - ac.clone() - bd.clone() - d2),
        ([1, 3, 4, 6], ac),
        ([1, 3, 5, 6], ad.clone()),
        ([2, 3, 4, 5], -cd - ad),
        ([2, 3, 4, 6], bc),
        ([2, 3, 5, 6], bd),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SerreCase {
    /// `α₁₂₄₆ > 0`: `b = 1`.
    Alpha1246Positive,
    /// `α₁₃₄₅ > 0`: `d = 1`.
    Alpha1345Positive,
    /// `α₁₂₄₅ + α₁₃₄₅ < 0`: `c = 1`.
    SumNegative,
    /// Remaining case, `α₁₂₄₆ − α₁₂₄₅ ≤ 0`: `a = 1`.
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SerreViolation {
    pub case: SerreCase,
    /// `(a, b, c, d)`.
    pub params: [f64; 4],
    /// `f(ξ) + ½⟨α; ξ ∧ ξ⟩` with `f = g − γ|ξ|²`, evaluated directly.
    pub value: f64,
}

/// Given `α ∈ Λ⁴(ℝ⁶)`, finds `ξ` in the family with `f(ξ) + ½⟨α; ξ∧ξ⟩ < 0`,
/// which rules out every candidate `α` for a polyconvexity certificate.
pub fn serre_violation(alpha: &KForm, gamma: f64) -> Result<SerreViolation> {
    if alpha.n() != 6 || alpha.degree() != 4 {
        return Err(Error::InvalidInput("α must be a 4-form on ℝ⁶".into()));
    }
    if !(gamma > 0.0) {
        return Err(Error::Precondition("γ > 0".into()));
    }
    let c = |idx: &[usize]| alpha.coeff(idx).expect("valid index");
    let (a1246, a1345, a1245) = (c(&[1, 2, 4, 6]), c(&[1, 3, 4, 5]), c(&[1, 2, 4, 5]));
    let (case, params) = if a1246 > 0.0 {
        (SerreCase::Alpha1246Positive, [0.0, 1.0, 0.0, 0.0])
    } else if a1345 > 0.0 {
        (SerreCase::Alpha1345Positive, [0.0, 0.0, 0.0, 1.0])
    } else if a1245 + a1345 < 0.0 {
        (SerreCase::SumNegative, [0.0, 0.0, 1.0, 0.0])
    } else {
        (SerreCase::Fallback, [1.0, 0.0, 0.0, 0.0])
    };
    let [a, b, cc, d] = params;
    let xi = serre_xi_family(a, b, cc, d);
    let f = build_serre_form::<f64>().shift(gamma);
    let value = f.eval(&xi)? + 0.5 * alpha.inner(&xi.wedge(&xi)?)?;
    Ok(SerreViolation { case, params, value })
}

/// Eight points `±ξ(e_i)`, `e_i` the unit vectors of `(a,b,c,d)`-space, with
/// equal weights. Their first and third moments vanish by symmetry and the
/// second moment `Σ t ξ∧ξ` vanishes because every coefficient of the
/// expansion is trace-free in `(a,b,c,d)`. The barycenter is `0`, so any
/// `f = g − γ|ξ|²` with `γ > 0` violates Jensen: `f(0) = 0 > −γ·mean|ξ|²`.
pub fn serre_jensen_witness() -> Result<JensenWitness> {
    let points: Vec<KForm> = (0..4)
        .map(|i| {
            let mut p = [0.0; 4];
            p[i] = 1.0;
            serre_xi_family(p[0], p[1], p[2], p[3])
        })
        .collect();
    JensenWitness::symmetric(&points)
}
