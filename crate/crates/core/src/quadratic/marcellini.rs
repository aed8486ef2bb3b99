use super::{QuadraticForm, EIG_TOL};
use crate::error::{Error, Result};

/// For `n = 4`, `k = 2`: find `λ` maximizing `λ_min(M − λG)` where `G` is
/// the Pfaffian form. A `λ` with `λ_min ≥ −tol` shows `f − λG ⪰ 0`, i.e.
/// `f` is ext. polyconvex with certificate `β = λ e^{1234}`.
///
/// The objective is concave in `λ`; a symmetric bracket is doubled until the
/// maximizer is interior, then narrowed by golden-section search.
pub fn marcellini_lambda(q: &QuadraticForm) -> Result<Option<f64>> {
    if q.n() != 4 || q.degree() != 2 {
        return Err(Error::Precondition("n = 4 and k = 2".into()));
    }
    let g = QuadraticForm::pfaffian();
    let phi = |lam: f64| q.add_scaled(&-lam, &g).expect("same space").min_eigenvalue();
    let mut radius = 1.0;
    while radius < 1e8 {
        let inside = phi(0.0).max(phi(radius / 2.0)).max(phi(-radius / 2.0));
        if phi(radius) < inside && phi(-radius) < inside {
            break;
        }
        radius *= 2.0;
    }
    let (mut lo, mut hi) = (-radius, radius);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (phi(x1), phi(x2));
    while hi - lo > 1e-13 * radius.max(1.0) {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = phi(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = phi(x1);
        }
    }
    let lam = 0.5 * (lo + hi);
    Ok((phi(lam) >= -EIG_TOL).then_some(lam))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pfaffian_itself() {
        let lam = marcellini_lambda(&QuadraticForm::pfaffian()).unwrap().unwrap();
        assert!((lam - 1.0).abs() < 1e-8);
    }

    #[test]
    fn identity_admits_zero() {
        let lam = marcellini_lambda(&QuadraticForm::identity(4, 2)).unwrap().unwrap();
        assert!(lam.abs() <= 1.0 + 1e-9); // λ_min(I − λG) = 1 − |λ|
    }

    #[test]
    fn negative_form_has_no_lambda() {
        let q = QuadraticForm::identity(4, 2).shift(2.0);
        assert_eq!(marcellini_lambda(&q).unwrap(), None);
        assert!(marcellini_lambda(&QuadraticForm::identity(5, 2)).is_err());
    }
}
