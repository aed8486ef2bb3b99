use crate::algebra::KForm;
use crate::divisibility::one_divisible;
use crate::error::{Error, Result};
use crate::fields::{lbfgs, GridField, GridSpec, Integrand, LbfgsOptions};
use crate::linalg::Dense;
use crate::multi_index::{binomial, wedge_table};
use crate::rng::stream;
use crate::scalar::Scalar;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;

/// The three `(k−1)`-forms `α, β, γ` on `ℝ^{k+3}` and the plane
/// `L = span{e¹∧α, e²∧β, (e¹+e²)∧γ}` on which every 1-divisible element
/// `x e¹∧α + y e²∧β + z (e¹+e²)∧γ` has `xy = xz = yz = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SverakConstruction<S = f64> {
    pub k: usize,
    pub n: usize,
    pub alpha: KForm<S>,
    pub beta: KForm<S>,
    pub gamma: KForm<S>,
    /// `v₁ = e¹∧α`, `v₂ = e²∧β`, `v₃ = (e¹+e²)∧γ`.
    pub l_basis: [KForm<S>; 3],
    /// Dual vectors `u_i ∈ L` with `⟨u_i; v_j⟩ = δ_ij`, so the coordinate
    /// `x` of `ξ` is `⟨ξ; u₁⟩` in the unnormalized spanning set.
    pub dual: [KForm<S>; 3],
    /// Orthogonal projection onto `L`.
    pub projection: Dense<S>,
}

/// `ê^i ∧ ê^j = e³ ∧ ⋯ ∧ e^{k+3}` with the factors `e^i`, `e^j` removed.
fn hat<S: Scalar>(n: usize, i: usize, j: usize) -> KForm<S> {
    let idx: Vec<usize> = (3..=n).filter(|&m| m != i && m != j).collect();
    KForm::basis(n, &idx).expect("increasing indices in 3..=n")
}

fn hat_sum<S: Scalar>(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> KForm<S> {
    let mut acc = KForm::zero(n, n - 4).expect("degree k − 1");
    for (i, j) in pairs {
        acc += &hat(n, i, j);
    }
    acc
}

/// Builds `α, β, γ` by the parity branches `k = 2l`, `k = 3`, `k = 2l+1 ≥ 5`.
pub fn build_sverak<S: Scalar>(k: usize) -> Result<SverakConstruction<S>> {
    if k < 2 {
        return Err(Error::Precondition("k ≥ 2".into()));
    }
    let n = k + 3;
    let l = k / 2;
    let (alpha, beta, gamma) = if k % 2 == 0 {
        (
            hat_sum(n, (2..=l + 1).map(|i| (2 * i, 2 * i + 1))),
            hat(n, 3, 2 * l + 3),
            hat_sum(n, (2..=l + 1).map(|i| (2 * i - 1, 2 * i))),
        )
    } else {
        let beta = if k == 3 {
            hat_sum(n, [(3, 5), (4, 6)])
        } else {
            hat_sum(n, (2..=l).map(|i| (2 * i - 1, 2 * i)))
        };
        (
            hat_sum(n, (2..=l + 2).map(|i| (2 * i - 1, 2 * i))),
            beta,
            hat_sum(n, [(2 * l + 1, 2 * l + 4), (2 * l + 2, 2 * l + 3)]),
        )
    };
    let e1 = KForm::<S>::basis(n, &[1])?;
    let e2 = KForm::<S>::basis(n, &[2])?;
    let l_basis = [e1.wedge(&alpha)?, e2.wedge(&beta)?, (&e1 + &e2).wedge(&gamma)?];
    let mut gram = Dense::<S>::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            gram.set(i, j, l_basis[i].inner(&l_basis[j])?);
        }
    }
    let mut dual_vec = Vec::with_capacity(3);
    for i in 0..3 {
        let mut rhs = vec![S::zero(); 3];
        rhs[i] = S::one();
        let row = gram
            .solve(&rhs)
            .ok_or_else(|| Error::Numerical("α, β, γ do not span a 3-dimensional L".into()))?;
        let mut u = KForm::zero(n, k)?;
        for (j, c) in row.iter().enumerate() {
            u += &l_basis[j].scale(c);
        }
        dual_vec.push(u);
    }
    let dual: [KForm<S>; 3] = dual_vec.try_into().expect("three dual vectors");
    let dim = binomial(n, k);
    let mut projection = Dense::<S>::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            let mut v = S::zero();
            for i in 0..3 {
                v = v + l_basis[i].coeffs()[r].clone() * dual[i].coeffs()[c].clone();
            }
            projection.set(r, c, v);
        }
    }
    Ok(SverakConstruction {
        k,
        n,
        alpha,
        beta,
        gamma,
        l_basis,
        dual,
        projection,
    })
}

impl<S: Scalar> SverakConstruction<S> {
    /// Coordinates `(x, y, z)` of `P ξ` in the spanning set.
    pub fn coords(&self, xi: &KForm<S>) -> Result<[S; 3]> {
        Ok([
            self.dual[0].inner(xi)?,
            self.dual[1].inner(xi)?,
            self.dual[2].inner(xi)?,
        ])
    }

    pub fn from_coords(&self, c: &[S; 3]) -> KForm<S> {
        let mut out = self.l_basis[0].scale(&c[0]);
        out += &self.l_basis[1].scale(&c[1]);
        out += &self.l_basis[2].scale(&c[2]);
        out
    }

    pub fn project(&self, xi: &KForm<S>) -> Result<KForm<S>> {
        Ok(self.from_coords(&self.coords(xi)?))
    }

    /// Rank of `{α, β, γ}`.
    pub fn independence_rank(&self) -> usize {
        let rows = [&self.alpha, &self.beta, &self.gamma].map(|f| f.coeffs().to_vec());
        Dense::from_rows(&rows).rank(1e-12)
    }

    pub fn basis_is_orthogonal(&self) -> bool {
        (0..3).all(|i| {
            (0..3).all(|j| {
                i == j
                    || self.l_basis[i]
                        .inner(&self.l_basis[j])
                        .map(|v| v.is_zero())
                        .unwrap_or(false)
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LClaimReport {
    pub k: usize,
    pub trials: usize,
    /// Random triples with at least two nonzero entries that were 1-divisible.
    pub divisible_mixed_triples: usize,
    /// Divisibility of `(1,0,0)`, `(0,1,0)`, `(0,0,1)`; recorded, not asserted.
    pub axis_divisible: [bool; 3],
    pub holds: bool,
}

/// Samples triples `(x, y, z)` with at least two nonzero entries and checks
/// that `x v₁ + y v₂ + z v₃` is never 1-divisible.
pub fn check_l_claim(c: &SverakConstruction, trials: usize, seed: u64) -> Result<LClaimReport> {
    let mut rng = stream(seed, 0);
    let mut bad = 0;
    for _ in 0..trials {
        let zero_slot = rng.gen_range(0..4);
        let mut t = [0.0; 3];
        for (i, v) in t.iter_mut().enumerate() {
            if i != zero_slot {
                let x: f64 = rng.sample(StandardNormal);
                *v = x.signum() * (0.1 + x.abs());
            }
        }
        if one_divisible(&c.from_coords(&t))?.divisible {
            bad += 1;
        }
    }
    let mut axis_divisible = [false; 3];
    for (i, slot) in axis_divisible.iter_mut().enumerate() {
        let mut t = [0.0; 3];
        t[i] = 1.0;
        *slot = one_divisible(&c.from_coords(&t))?.divisible;
    }
    Ok(LClaimReport {
        k: c.k,
        trials,
        divisible_mixed_triples: bad,
        axis_divisible,
        holds: bad == 0,
    })
}

/// `f_ε(ξ) = g(Pξ) + ε|ξ|² + ε|ξ|⁴ + γ_pen |ξ − Pξ|²` with `g = −xyz`.
#[derive(Debug, Clone)]
pub struct SverakEnergy {
    pub construction: SverakConstruction,
    pub eps: f64,
    pub gamma_pen: f64,
}

impl SverakEnergy {
    pub fn new(construction: SverakConstruction, eps: f64, gamma_pen: f64) -> Result<Self> {
        if !(eps >= 0.0) || !(gamma_pen >= 0.0) {
            return Err(Error::Precondition("ε ≥ 0 and γ_pen ≥ 0".into()));
        }
        Ok(Self {
            construction,
            eps,
            gamma_pen,
        })
    }

    fn coords_slice(&self, x: &[f64]) -> [f64; 3] {
        let d = &self.construction.dual;
        let dot = |u: &KForm| u.coeffs().iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        [dot(&d[0]), dot(&d[1]), dot(&d[2])]
    }

    fn off_plane_sq(&self, x: &[f64], c: &[f64; 3]) -> f64 {
        let v = &self.construction.l_basis;
        x.iter()
            .enumerate()
            .map(|(r, xr)| {
                let p = c[0] * v[0].coeffs()[r] + c[1] * v[1].coeffs()[r] + c[2] * v[2].coeffs()[r];
                (xr - p).powi(2)
            })
            .sum()
    }

    /// `g(Pξ) = −xyz`.
    pub fn g(&self, xi: &KForm) -> f64 {
        let c = self.coords_slice(xi.coeffs());
        -c[0] * c[1] * c[2]
    }

    pub fn eval(&self, xi: &KForm) -> f64 {
        self.value(xi.coeffs())
    }

    /// `d²/dt² f_ε(ξ + tη)` at `t = 0`:
    /// `L_g(Pξ, Pη) + 2ε|η|² + 4ε|ξ|²|η|² + 8ε⟨ξ;η⟩² + 2γ_pen|η − Pη|²`.
    pub fn second_derivative(&self, xi: &KForm, eta: &KForm) -> f64 {
        let (x, e) = (xi.coeffs(), eta.coeffs());
        let p = self.coords_slice(x);
        let q = self.coords_slice(e);
        let lg = -2.0 * (p[0] * q[1] * q[2] + p[1] * q[0] * q[2] + p[2] * q[0] * q[1]);
        let (xx, ee) = (xi.norm_squared(), eta.norm_squared());
        let xe: f64 = x.iter().zip(e).map(|(a, b)| a * b).sum();
        lg + 2.0 * self.eps * ee
            + 4.0 * self.eps * xx * ee
            + 8.0 * self.eps * xe * xe
            + 2.0 * self.gamma_pen * self.off_plane_sq(e, &q)
    }
}

impl Integrand for SverakEnergy {
    fn n(&self) -> usize {
        self.construction.n
    }

    fn degree(&self) -> usize {
        self.construction.k
    }

    fn value(&self, x: &[f64]) -> f64 {
        let c = self.coords_slice(x);
        let s: f64 = x.iter().map(|v| v * v).sum();
        -c[0] * c[1] * c[2] + self.eps * (s + s * s) + self.gamma_pen * self.off_plane_sq(x, &c)
    }

    fn value_and_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let c = self.coords_slice(x);
        let s: f64 = x.iter().map(|v| v * v).sum();
        let (v, u) = (&self.construction.l_basis, &self.construction.dual);
        let w = [-c[1] * c[2], -c[0] * c[2], -c[0] * c[1]];
        let mut off = 0.0;
        for (r, g) in grad.iter_mut().enumerate() {
            let p = c[0] * v[0].coeffs()[r] + c[1] * v[1].coeffs()[r] + c[2] * v[2].coeffs()[r];
            let resid = x[r] - p;
            off += resid * resid;
            // P is symmetric, so ∇|ξ − Pξ|² = 2(ξ − Pξ).
            *g = w[0] * u[0].coeffs()[r]
                + w[1] * u[1].coeffs()[r]
                + w[2] * u[2].coeffs()[r]
                + self.eps * (2.0 + 4.0 * s) * x[r]
                + 2.0 * self.gamma_pen * resid;
        }
        -c[0] * c[1] * c[2] + self.eps * (s + s * s) + self.gamma_pen * off
    }
}

/// Grid mean over `(0, 2π)²` of `f_ε(dω)` for
/// `ω = sin x₁ α + sin x₂ β + sin(x₁+x₂) γ`, whose differential
/// `dω = cos x₁ v₁ + cos x₂ v₂ + cos(x₁+x₂) v₃` lies in `L`. The periodic
/// trapezoidal rule with `quad_points²` nodes is exact for the trigonometric
/// polynomial `g(dω)`.
pub fn sverak_integral(c: &SverakConstruction, eps: f64, gamma_pen: f64, quad_points: usize) -> Result<f64> {
    if quad_points == 0 {
        return Err(Error::Precondition("at least one quadrature point".into()));
    }
    let f = SverakEnergy::new(c.clone(), eps, gamma_pen)?;
    let q = quad_points as f64;
    let rows: Vec<f64> = (0..quad_points)
        .into_par_iter()
        .map(|i| {
            let x1 = TAU * i as f64 / q;
            (0..quad_points)
                .map(|j| {
                    let x2 = TAU * j as f64 / q;
                    f.eval(&c.from_coords(&[x1.cos(), x2.cos(), (x1 + x2).cos()]))
                })
                .sum::<f64>()
        })
        .collect();
    Ok(rows.iter().sum::<f64>() / (q * q))
}

/// The field `ω = (2π)⁻¹ [sin(2πx₁) α + sin(2πx₂) β + sin(2π(x₁+x₂)) γ]` on a
/// torus `[0,1)^{k+3}`, a certified starting point for envelope estimates.
pub fn sverak_warm_start(c: &SverakConstruction, spec: GridSpec) -> Result<GridField> {
    if spec.n != c.n {
        return Err(Error::DimensionMismatch {
            expected: c.n,
            found: spec.n,
        });
    }
    GridField::from_fn(spec, c.k - 1, |x| {
        let (s1, s2, s3) = ((TAU * x[0]).sin(), (TAU * x[1]).sin(), (TAU * (x[0] + x[1])).sin());
        c.alpha
            .coeffs()
            .iter()
            .zip(c.beta.coeffs())
            .zip(c.gamma.coeffs())
            .map(|((a, b), g)| (s1 * a + s2 * b + s3 * g) / TAU)
            .collect()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginReport {
    /// Smallest `min_ξ L_{f_ε}(ξ, η)` found over unit decomposable `η`.
    pub min_margin: f64,
    #[serde(skip)]
    pub worst_eta: KForm,
    /// The minimizing `ξ` for `worst_eta`.
    #[serde(skip)]
    pub worst_xi: KForm,
    pub restarts: usize,
}

/// `min_ξ L_{f_ε}(ξ, η)` for a unit `η`, in closed form: with
/// `ℓ = ∇_ξ L_g(Pξ, Pη) = −2(bc u₁ + ac u₂ + ab u₃)`, `(a,b,c)` the
/// coordinates of `Pη`, the minimum over all `ξ` is
/// `2ε + 2γ_pen|η − Pη|² − (|ℓ|² − ⅔⟨ℓ;η⟩²) / (16ε)`.
fn margin_and_xi(f: &SverakEnergy, eta: &[f64]) -> (f64, Vec<f64>) {
    let q = f.coords_slice(eta);
    let u = &f.construction.dual;
    let w = [-2.0 * q[1] * q[2], -2.0 * q[0] * q[2], -2.0 * q[0] * q[1]];
    let ell: Vec<f64> = (0..eta.len())
        .map(|r| w[0] * u[0].coeffs()[r] + w[1] * u[1].coeffs()[r] + w[2] * u[2].coeffs()[r])
        .collect();
    let ll: f64 = ell.iter().map(|v| v * v).sum();
    let le: f64 = ell.iter().zip(eta).map(|(a, b)| a * b).sum();
    let eps = f.eps;
    let margin = 2.0 * eps + 2.0 * f.gamma_pen * f.off_plane_sq(eta, &q) - (ll - 2.0 / 3.0 * le * le) / (16.0 * eps);
    let xi = ell
        .iter()
        .zip(eta)
        .map(|(l, e)| -(l - 2.0 / 3.0 * le * e) / (8.0 * eps))
        .collect();
    (margin, xi)
}

/// Adversarial multistart search for the smallest second derivative of
/// `f_ε` along unit 1-divisible directions, minimized over every `ξ`.
pub fn one_convexity_margin(
    c: &SverakConstruction,
    eps: f64,
    gamma_pen: f64,
    restarts: usize,
    seed: u64,
) -> Result<MarginReport> {
    if !(eps > 0.0) {
        return Err(Error::Precondition("ε > 0".into()));
    }
    let f = SverakEnergy::new(c.clone(), eps, gamma_pen)?;
    let (n, k) = (c.n, c.k);
    let da = binomial(n, k - 1);
    let table = wedge_table(n, k - 1, 1);
    let unit_eta = |p: &[f64]| -> Option<Vec<f64>> {
        let mut eta = vec![0.0; binomial(n, k)];
        table.accumulate(&p[..da], &p[da..], &mut eta);
        let norm = eta.iter().map(|v| v * v).sum::<f64>().sqrt();
        (norm > 1e-12).then(|| eta.into_iter().map(|v| v / norm).collect())
    };
    let objective = |p: &[f64]| unit_eta(p).map(|e| margin_and_xi(&f, &e).0).unwrap_or(f64::INFINITY);
    let starts = [(&c.alpha, 0usize), (&c.beta, 1), (&c.gamma, 2)];
    let runs: Vec<Result<(f64, Vec<f64>)>> = (0..restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(seed, r as u64);
            let mut p: Vec<f64> = (0..da + n).map(|_| rng.sample(StandardNormal)).collect();
            if r % 2 == 1 {
                // Start near one of the decomposable axes of L.
                let (base, axis) = starts[(r / 2) % 3];
                let scale = 10f64.powf(rng.gen_range(-3.0..0.0));
                p.iter_mut().for_each(|v| *v *= scale);
                for (pi, b) in p[..da].iter_mut().zip(base.coeffs()) {
                    *pi += b;
                }
                p[da] += if axis != 1 { 1.0 } else { 0.0 };
                p[da + 1] += if axis != 0 { 1.0 } else { 0.0 };
            }
            let fg = |x: &[f64]| {
                let v = objective(x);
                let mut g = vec![0.0; x.len()];
                let mut y = x.to_vec();
                for i in 0..x.len() {
                    let h = 1e-7 * (1.0 + x[i].abs());
                    y[i] = x[i] + h;
                    let up = objective(&y);
                    y[i] = x[i] - h;
                    let down = objective(&y);
                    y[i] = x[i];
                    g[i] = (up - down) / (2.0 * h);
                }
                Ok((v, g))
            };
            let opts = LbfgsOptions {
                max_iter: 400,
                grad_tol: 1e-9,
                ..Default::default()
            };
            let out = lbfgs(p, fg, None, &opts)?;
            Ok((objective(&out.x), out.x))
        })
        .collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for run in runs {
        let (v, p) = run?;
        if best.as_ref().map_or(true, |(b, _)| v < *b) {
            best = Some((v, p));
        }
    }
    let (_, p) = best.expect("at least one restart");
    let eta = unit_eta(&p).ok_or_else(|| Error::Numerical("degenerate decomposable direction".into()))?;
    let (min_margin, xi) = margin_and_xi(&f, &eta);
    Ok(MarginReport {
        min_margin,
        worst_eta: KForm::from_coeffs(n, k, eta)?,
        worst_xi: KForm::from_coeffs(n, k, xi)?,
        restarts: restarts.max(1),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationOptions {
    pub initial: f64,
    pub max_doublings: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self {
            initial: 1.0,
            max_doublings: 60,
            restarts: 48,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationReport {
    pub gamma_pen: f64,
    /// `(candidate γ_pen, smallest margin found)` in the order tried.
    pub candidates: Vec<(f64, f64)>,
    /// The acceptance test is an adversarial search, not a proof.
    pub heuristic: bool,
    pub xi_domain: &'static str,
}

/// Doubling search for a penalty `γ_pen` making `f_ε` ext. one convex,
/// judged by [`one_convexity_margin`]. Heuristic: a candidate is accepted
/// when the search finds no negative margin.
pub fn calibrate_gamma_pen(c: &SverakConstruction, eps: f64, opts: &CalibrationOptions) -> Result<CalibrationReport> {
    let mut gamma = opts.initial;
    let mut candidates = Vec::new();
    for _ in 0..=opts.max_doublings {
        let m = one_convexity_margin(c, eps, gamma, opts.restarts, opts.seed)?;
        candidates.push((gamma, m.min_margin));
        if m.min_margin >= 0.0 {
            return Ok(CalibrationReport {
                gamma_pen: gamma,
                candidates,
                heuristic: true,
                xi_domain: "all of Λᵏ (closed-form minimum over ξ)",
            });
        }
        gamma *= 2.0;
    }
    Err(Error::BudgetExhausted(opts.max_doublings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    #[test]
    fn k2_branch() {
        let c = build_sverak::<Exact>(2).unwrap();
        assert_eq!(c.alpha, KForm::basis(5, &[3]).unwrap());
        assert_eq!(c.beta, KForm::basis(5, &[4]).unwrap());
        assert_eq!(c.gamma, KForm::basis(5, &[5]).unwrap());
    }

    #[test]
    fn k3_branch() {
        let c = build_sverak::<Exact>(3).unwrap();
        let b = |i: usize, j: usize| KForm::<Exact>::basis(6, &[i, j]).unwrap();
        assert_eq!(c.alpha, b(3, 4) + b(5, 6));
        assert_eq!(c.beta, b(4, 6) + b(3, 5));
        assert_eq!(c.gamma, b(3, 6) + b(4, 5));
    }

    #[test]
    fn structure_for_several_k() {
        for k in 2..=6 {
            let c = build_sverak::<Exact>(k).unwrap();
            assert_eq!(c.independence_rank(), 3, "k = {k}");
            assert!(c.basis_is_orthogonal());
            let p = &c.projection;
            assert_eq!(p.matmul(p), *p);
            assert_eq!(p.transpose(), *p);
            for (i, v) in c.l_basis.iter().enumerate() {
                let mut want = [Exact::from_i64(0), Exact::from_i64(0), Exact::from_i64(0)];
                want[i] = Exact::from_i64(1);
                assert_eq!(c.coords(v).unwrap(), want);
            }
        }
        assert!(build_sverak::<f64>(1).is_err());
    }

    #[test]
    fn l_claim_small_sample() {
        for k in 2..=4 {
            let c = build_sverak::<f64>(k).unwrap();
            let r = check_l_claim(&c, 60, 1).unwrap();
            assert!(r.holds, "k = {k}");
            assert_eq!(r.axis_divisible, [true, true, true]);
        }
        let c = build_sverak::<f64>(2).unwrap();
        assert!(!one_divisible(&c.from_coords(&[1.0, 1.0, 0.0])).unwrap().divisible);
    }

    #[test]
    fn energy_values_and_gradient() {
        let c = build_sverak::<f64>(2).unwrap();
        let f = SverakEnergy::new(c.clone(), 0.1, 5.0).unwrap();
        let xi = c.from_coords(&[1.0, 1.0, 1.0]);
        let s = xi.norm_squared();
        assert!((f.eval(&xi) - (-1.0 + 0.1 * (s + s * s))).abs() < 1e-12);
        let mut rng = stream(3, 0);
        let off = loop {
            let x = KForm::random(5, 2, &mut rng).unwrap();
            let p = c.project(&x).unwrap();
            break &x - &p;
        };
        let s = off.norm_squared();
        assert!((f.eval(&off) - (0.1 * (s + s * s) + 5.0 * s)).abs() < 1e-12);
        let x = KForm::random(5, 2, &mut rng).unwrap();
        let mut g = vec![0.0; 10];
        f.value_and_gradient(x.coeffs(), &mut g);
        for i in 0..10 {
            let h = 1e-6;
            let mut xp = x.clone();
            xp.coeffs_mut()[i] += h;
            let mut xm = x.clone();
            xm.coeffs_mut()[i] -= h;
            let fd = (f.eval(&xp) - f.eval(&xm)) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-6 * (1.0 + fd.abs()));
        }
    }

    #[test]
    fn g_is_affine_along_divisible_directions_in_l() {
        let c = build_sverak::<f64>(3).unwrap();
        let f = SverakEnergy::new(c.clone(), 0.0, 0.0).unwrap();
        let mut rng = stream(4, 0);
        for axis in 0..3 {
            let mut t = [0.0; 3];
            t[axis] = rng.gen_range(0.5..2.0);
            let eta = c.from_coords(&t);
            let xi = c.from_coords(&[
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ]);
            assert!(f.second_derivative(&xi, &eta).abs() < 1e-12);
        }
    }

    #[test]
    fn second_derivative_matches_finite_differences() {
        let c = build_sverak::<f64>(2).unwrap();
        let f = SverakEnergy::new(c, 0.2, 3.0).unwrap();
        let mut rng = stream(5, 0);
        let xi = KForm::random(5, 2, &mut rng).unwrap();
        let eta = KForm::random(5, 1, &mut rng)
            .unwrap()
            .wedge(&KForm::random(5, 1, &mut rng).unwrap())
            .unwrap();
        let h = 1e-4;
        let fd = (f.eval(&(&xi + &eta.scale(&h))) - 2.0 * f.eval(&xi) + f.eval(&(&xi - &eta.scale(&h)))) / (h * h);
        let exact = f.second_derivative(&xi, &eta);
        assert!((fd - exact).abs() < 1e-4 * (1.0 + exact.abs()));
    }

    #[test]
    fn closed_form_margin_is_the_minimum_over_xi() {
        let c = build_sverak::<f64>(2).unwrap();
        let f = SverakEnergy::new(c, 0.05, 1.0).unwrap();
        let mut rng = stream(6, 0);
        let eta = {
            let e = KForm::random(5, 1, &mut rng)
                .unwrap()
                .wedge(&KForm::random(5, 1, &mut rng).unwrap())
                .unwrap();
            e.scale(&(1.0 / e.norm()))
        };
        let (m, xi) = margin_and_xi(&f, eta.coeffs());
        let xi = KForm::from_coeffs(5, 2, xi).unwrap();
        assert!((f.second_derivative(&xi, &eta) - m).abs() < 1e-9 * (1.0 + m.abs()));
        for _ in 0..200 {
            let other = &xi + &KForm::random(5, 2, &mut rng).unwrap().scale(&0.3);
            assert!(f.second_derivative(&other, &eta) >= m - 1e-9);
        }
    }

    #[test]
    fn integral_oracle_values() {
        let c = build_sverak::<f64>(2).unwrap();
        assert!((sverak_integral(&c, 0.0, 1.0, 64).unwrap() + 0.25).abs() < 1e-12);
        assert!(sverak_integral(&c, 1e3, 1.0, 32).unwrap() > 0.0);
    }

    #[test]
    fn margin_rejects_zero_penalty() {
        let c = build_sverak::<f64>(2).unwrap();
        let m = one_convexity_margin(&c, 0.01, 0.0, 8, 0).unwrap();
        assert!(m.min_margin < 0.0);
    }
}
