use super::{QuadraticForm, EIG_TOL};
use crate::algebra::KForm;
use crate::error::Result;
use crate::linalg::min_eigenpair;
use crate::multi_index::binomial;
use nalgebra::{Cholesky, DMatrix, DVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateStatus {
    Polyconvex,
    /// Inconclusive: no `β` was found, which does not prove non-polyconvexity.
    NotCertified,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateResult {
    pub status: CertificateStatus,
    /// Best `β ∈ Λ^{2k}` found; `None` when `2k > n`.
    pub beta: Option<KForm>,
    /// `λ_min(M − S(β))` at the returned `β`.
    pub achieved_min_eig: f64,
    pub iterations: usize,
    /// `k` odd or `2k > n`: `ξ ∧ ξ ≡ 0`, so the verdict is plain convexity.
    pub fast_path: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateOptions {
    pub max_iter: usize,
    pub tol: f64,
    /// Initial step of the `step0 / √iter` schedule.
    pub step0: f64,
    /// Run a log-barrier Newton phase when the ascent stalls short of `−tol`.
    pub polish: bool,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            tol: EIG_TOL,
            step0: 1.0,
            polish: true,
        }
    }
}

/// `λ_min(M − S(β))`, the quantity a certificate `β` must keep `≥ −tol`.
pub fn verify_certificate(q: &QuadraticForm, beta: &KForm) -> Result<f64> {
    let s = QuadraticForm::wedge_square(q.degree(), beta)?;
    Ok(q.add_scaled(&-1.0, &s)?.min_eigenvalue())
}

/// Matrices `S(e^J)` for every basis element of `Λ^{2k}`.
fn wedge_square_basis(n: usize, k: usize) -> Vec<DMatrix<f64>> {
    (0..binomial(n, 2 * k))
        .map(|j| {
            let beta = crate::algebra::basis_form::<f64>(n, 2 * k, j);
            QuadraticForm::wedge_square(k, &beta).expect("degree 2k").to_dmatrix()
        })
        .collect()
}

fn assemble(m: &DMatrix<f64>, basis: &[DMatrix<f64>], beta: &[f64]) -> DMatrix<f64> {
    let mut z = m.clone();
    for (s, b) in basis.iter().zip(beta) {
        if *b != 0.0 {
            z -= s * *b;
        }
    }
    z
}

/// Searches `β ∈ Λ^{2k}` maximizing the concave function
/// `φ(β) = λ_min(M − S(β))` by supergradient ascent with `step0/√iter` steps
/// and best-iterate tracking, optionally followed by a log-barrier Newton
/// phase. `Polyconvex` iff the best `φ ≥ −tol`.
pub fn polyconvexity_certificate(q: &QuadraticForm, opts: &CertificateOptions) -> Result<CertificateResult> {
    let (n, k) = (q.n(), q.degree());
    let m = q.to_dmatrix();
    if k % 2 == 1 || 2 * k > n {
        let lam = q.min_eigenvalue();
        return Ok(CertificateResult {
            status: status(lam, opts.tol),
            beta: (2 * k <= n).then(|| KForm::zero(n, 2 * k).expect("2k ≤ n")),
            achieved_min_eig: lam,
            iterations: 0,
            fast_path: true,
        });
    }
    let basis = wedge_square_basis(n, k);
    let p = basis.len();
    let mut beta = vec![0.0; p];
    let mut best = (f64::NEG_INFINITY, beta.clone());
    let mut iterations = 0;
    for it in 1..=opts.max_iter {
        iterations = it;
        let (lam, v) = min_eigenpair(&assemble(&m, &basis, &beta));
        if lam > best.0 {
            best = (lam, beta.clone());
        }
        if lam >= -opts.tol {
            break;
        }
        // ∂/∂β_J vᵀ(M − S(β))v = −vᵀ S(e^J) v
        let g: Vec<f64> = basis.iter().map(|s| -(v.transpose() * s * &v)[(0, 0)]).collect();
        let gn = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if gn < 1e-14 {
            break; // zero supergradient: β is optimal
        }
        let step = opts.step0 / (it as f64).sqrt();
        for (b, gi) in beta.iter_mut().zip(&g) {
            *b += step * gi / gn;
        }
    }
    if best.0 < -opts.tol && opts.polish {
        if let Some((lam, b)) = barrier_polish(&m, &basis, &best.1) {
            if lam > best.0 {
                best = (lam, b);
            }
        }
    }
    let beta = KForm::from_coeffs(n, 2 * k, best.1)?;
    let achieved = verify_certificate(q, &beta)?;
    Ok(CertificateResult {
        status: status(achieved, opts.tol),
        beta: Some(beta),
        achieved_min_eig: achieved,
        iterations,
        fast_path: false,
    })
}

fn status(lam: f64, tol: f64) -> CertificateStatus {
    if lam >= -tol {
        CertificateStatus::Polyconvex
    } else {
        CertificateStatus::NotCertified
    }
}

/// Maximizes `t + μ log det(M − S(β) − tI)` over `(β, t)` by damped Newton
/// steps along a decreasing `μ` path. Returns `(λ_min(M − S(β)), β)`.
fn barrier_polish(m: &DMatrix<f64>, basis: &[DMatrix<f64>], start: &[f64]) -> Option<(f64, Vec<f64>)> {
    let dim = m.nrows();
    let p = basis.len();
    let mut x: Vec<f64> = start.to_vec();
    let lam0 = min_eigenpair(&assemble(m, basis, &x)).0;
    x.push(lam0 - 1.0);
    let slack = |x: &[f64]| {
        let mut z = assemble(m, basis, &x[..p]);
        for i in 0..dim {
            z[(i, i)] -= x[p];
        }
        z
    };
    let objective = |x: &[f64], mu: f64| -> Option<f64> {
        let chol = Cholesky::new(slack(x))?;
        let logdet: f64 = chol.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
        Some(x[p] + mu * logdet)
    };
    let mut mu = 1.0;
    while mu * dim as f64 > 1e-13 {
        for _ in 0..60 {
            let z = slack(&x);
            let zinv = Cholesky::new(z)?.inverse();
            // dZ/dβ_J = −S_J, dZ/dt = −I
            let mut dirs: Vec<DMatrix<f64>> = basis.iter().map(|s| -(&zinv * s)).collect();
            dirs.push(-zinv.clone());
            let mut grad = DVector::zeros(p + 1);
            let mut hess = DMatrix::zeros(p + 1, p + 1);
            for a in 0..=p {
                grad[a] = mu * dirs[a].trace();
                for b in a..=p {
                    let h = -mu * (&dirs[a] * &dirs[b]).trace();
                    hess[(a, b)] = h;
                    hess[(b, a)] = h;
                }
            }
            grad[p] += 1.0;
            let neg_h = -hess;
            let step = Cholesky::new(neg_h.clone())
                .map(|c| c.solve(&grad))
                .or_else(|| neg_h.lu().solve(&grad))?;
            let decrement = grad.dot(&step);
            if !decrement.is_finite() || decrement < 1e-14 {
                break;
            }
            let f0 = objective(&x, mu)?;
            let mut alpha = 1.0;
            let mut moved = false;
            while alpha > 1e-12 {
                let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, d)| a + alpha * d).collect();
                if let Some(f1) = objective(&trial, mu) {
                    if f1 >= f0 + 0.25 * alpha * decrement {
                        x = trial;
                        moved = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !moved {
                break;
            }
        }
        mu *= 0.2;
    }
    let beta = x[..p].to_vec();
    let lam = min_eigenpair(&assemble(m, basis, &beta)).0;
    Some((lam, beta))
}

impl CertificateResult {
    pub fn is_polyconvex(&self) -> bool {
        self.status == CertificateStatus::Polyconvex
    }
}
