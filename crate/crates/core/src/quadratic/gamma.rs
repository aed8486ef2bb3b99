use super::QuadraticForm;
use crate::algebra::{left_wedge_matrix, right_wedge_matrix, KForm};
use crate::divisibility::one_divisible;
use crate::error::{Error, Result};
use crate::rng::stream;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

/// Multistart settings for the γ optimizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaOptions {
    pub restarts: usize,
    /// Relative stationarity tolerance on the objective between sweeps.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for GammaOptions {
    fn default() -> Self {
        Self {
            restarts: 64,
            tol: 1e-10,
            max_iter: 5000,
            seed: 0,
        }
    }
}

/// Best value of `f(a ∧ b)` over unit decomposables found by the optimizer.
/// For minimization this is an upper bound on the true infimum.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaResult {
    pub gamma: f64,
    pub argmin_a: KForm,
    pub argmin_b: KForm,
    pub restarts: usize,
    pub converged: bool,
    pub iterations: usize,
}

impl GammaResult {
    pub fn decomposable(&self) -> KForm {
        self.argmin_a.wedge(&self.argmin_b).expect("degrees add up to k")
    }
}

/// Minimizes `m` (already sign-adjusted) over unit vectors in the range of `w`.
/// Returns the value and the coefficients `c` with `w c` the unit minimizer.
fn restricted_min(m: &DMatrix<f64>, w: &DMatrix<f64>) -> Option<(f64, DVector<f64>)> {
    let svd = w.clone().svd(true, true);
    let u = svd.u.as_ref()?;
    let v_t = svd.v_t.as_ref()?;
    let s_max = svd.singular_values.max();
    if s_max <= 0.0 {
        return None;
    }
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 1e-10 * s_max)
        .collect();
    let q = DMatrix::from_columns(&keep.iter().map(|&i| u.column(i).into_owned()).collect::<Vec<_>>());
    let reduced = q.transpose() * m * &q;
    let eig = SymmetricEigen::new(reduced);
    let (idx, val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, v)| (i, *v))?;
    let y = eig.eigenvectors.column(idx);
    let mut c = DVector::zeros(w.ncols());
    for (slot, &i) in keep.iter().enumerate() {
        c += v_t.row(i).transpose() * (y[slot] / svd.singular_values[i]);
    }
    Some((val, c))
}

struct RunOutcome {
    value: f64,
    a: KForm,
    b: KForm,
    converged: bool,
    iterations: usize,
}

fn single_run(m: &DMatrix<f64>, n: usize, k: usize, opts: &GammaOptions, index: u64) -> Result<RunOutcome> {
    let mut rng = stream(opts.seed, index);
    let mut a = KForm::random_unit(n, k - 1, &mut rng)?;
    let mut b = KForm::random_unit(n, 1, &mut rng)?;
    let mut value = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..opts.max_iter {
        iterations = it + 1;
        let wb = right_wedge_matrix(&b, k - 1)?.to_dmatrix();
        let (_, ca) = restricted_min(m, &wb).ok_or_else(|| Error::Numerical("degenerate b".into()))?;
        a = KForm::from_coeffs(n, k - 1, ca.iter().copied().collect())?;
        let wa = left_wedge_matrix(&a, 1)?.to_dmatrix();
        let (val, cb) = restricted_min(m, &wa).ok_or_else(|| Error::Numerical("degenerate a".into()))?;
        b = KForm::from_coeffs(n, 1, cb.iter().copied().collect())?;
        let nb = b.norm();
        b = b.scale(&(1.0 / nb));
        a = a.scale(&nb);
        let decrease = value - val;
        value = val;
        if decrease.is_finite() && decrease <= opts.tol * val.abs().max(1.0) {
            converged = true;
            break;
        }
    }
    Ok(RunOutcome {
        value,
        a,
        b,
        converged,
        iterations,
    })
}

fn optimize(q: &QuadraticForm, opts: &GammaOptions, maximize: bool) -> Result<GammaResult> {
    let (n, k) = (q.n(), q.degree());
    if k == 0 || k > n {
        return Err(Error::Precondition("1 ≤ k ≤ n".into()));
    }
    if opts.restarts < 1 {
        return Err(Error::InvalidInput("restarts must be at least 1".into()));
    }
    let sign = if maximize { -1.0 } else { 1.0 };
    let m = q.to_dmatrix() * sign;
    let runs: Vec<Result<RunOutcome>> = (0..opts.restarts as u64)
        .into_par_iter()
        .map(|i| single_run(&m, n, k, opts, i))
        .collect();
    let mut best: Option<RunOutcome> = None;
    for run in runs {
        let run = run?;
        // Strict comparison keeps the lowest index among ties.
        if best.as_ref().is_none_or(|b| run.value < b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one restart");
    Ok(GammaResult {
        gamma: sign * best.value,
        argmin_a: best.a,
        argmin_b: best.b,
        restarts: opts.restarts,
        converged: best.converged,
        iterations: best.iterations,
    })
}

/// `γ = inf { f(a ∧ b) : a ∈ Λ^{k−1}, b ∈ Λ¹, |a ∧ b| = 1 }` by alternating
/// minimization: for fixed `b` the problem is an eigenproblem of `M`
/// restricted to `b ∧ Λ^{k−1}`, and symmetrically for fixed `a`.
pub fn gamma_infimum(q: &QuadraticForm, opts: &GammaOptions) -> Result<GammaResult> {
    optimize(q, opts, false)
}

/// Supremum counterpart of [`gamma_infimum`] (a lower bound on the true sup).
pub fn gamma_supremum(q: &QuadraticForm, opts: &GammaOptions) -> Result<GammaResult> {
    optimize(q, opts, true)
}

/// Verdict of the ext. one convexity test.
#[derive(Debug, Clone, PartialEq)]
pub struct OneConvexity {
    pub ext_one_convex: bool,
    pub gamma: GammaResult,
    /// Unit decomposable with `f < −tol` when the test fails.
    pub witness: Option<KForm>,
}

/// A quadratic form is ext. one convex iff `f(a ∧ b) ≥ 0` on decomposables.
pub fn is_ext_one_convex(q: &QuadraticForm, opts: &GammaOptions, tol: f64) -> Result<OneConvexity> {
    let gamma = gamma_infimum(q, opts)?;
    let ok = gamma.gamma >= -tol;
    let witness = (!ok).then(|| gamma.decomposable());
    Ok(OneConvexity {
        ext_one_convex: ok,
        gamma,
        witness,
    })
}

/// `c = 1 / sup { ⟨α; a ∧ b⟩² : |a ∧ b| = 1 }` for a form `α` that is not
/// 1-divisible. Then `1/c < |α|²` and `|ξ|² − c⟨α; ξ⟩²` is ext. one convex
/// without being convex.
pub fn proposition_c_constant(alpha: &KForm, opts: &GammaOptions) -> Result<f64> {
    if one_divisible(alpha)?.divisible {
        return Err(Error::Precondition("a form that is not 1-divisible".into()));
    }
    let q = QuadraticForm::sum_of_squares(alpha.n(), alpha.degree(), std::slice::from_ref(alpha))?;
    let sup = gamma_supremum(&q, opts)?.gamma;
    Ok(1.0 / sup)
}

/// Points of the hyperspherical angle grid on `S^{n−1}` modulo `b ~ −b`.
fn sphere_grid(n: usize, points_per_angle: usize) -> Vec<Vec<f64>> {
    use std::f64::consts::PI;
    if n == 1 {
        return vec![vec![1.0]];
    }
    let p = points_per_angle.max(2);
    let angles = n - 1;
    let total = p.pow(angles as u32);
    let mut out = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = flat;
        let mut phi = Vec::with_capacity(angles);
        for j in 0..angles {
            let i = rem % p;
            rem /= p;
            phi.push(if j + 1 < angles {
                PI * i as f64 / (p - 1) as f64
            } else {
                PI * i as f64 / p as f64
            });
        }
        let mut b = Vec::with_capacity(n);
        let mut sin_prod = 1.0;
        for &ph in &phi {
            b.push(sin_prod * ph.cos());
            sin_prod *= ph.sin();
        }
        b.push(sin_prod);
        out.push(b);
    }
    out
}

/// Brute-force cross-check of γ: the 1-form `b` runs over a hyperspherical
/// angle grid with `points_per_angle` nodes per angle and, for each `b`, the
/// best `a` is found exactly by an eigenvalue problem on `b ∧ Λ^{k−1}`.
pub fn gamma_grid_search(q: &QuadraticForm, points_per_angle: usize, maximize: bool) -> Result<f64> {
    let (n, k) = (q.n(), q.degree());
    let sign = if maximize { -1.0 } else { 1.0 };
    let m = q.to_dmatrix() * sign;
    let best = sphere_grid(n, points_per_angle)
        .into_par_iter()
        .map(|b| {
            let b = KForm::from_coeffs(n, 1, b).expect("length n");
            let w = right_wedge_matrix(&b, k - 1).expect("degrees fit").to_dmatrix();
            restricted_min(&m, &w).map_or(f64::INFINITY, |(v, _)| v)
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(sign * best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::LinearMap;
    use crate::linalg::Dense;

    fn e(n: usize, idx: &[usize]) -> KForm {
        KForm::basis(n, idx).unwrap()
    }

    fn opts(restarts: usize, seed: u64) -> GammaOptions {
        GammaOptions {
            restarts,
            seed,
            ..Default::default()
        }
    }

    #[test]
    fn identity_gamma_is_one() {
        for (n, k) in [(3, 1), (4, 2), (5, 3), (4, 4)] {
            let r = gamma_infimum(&QuadraticForm::identity(n, k), &opts(4, 1)).unwrap();
            assert!((r.gamma - 1.0).abs() < 1e-12);
            assert!((r.decomposable().norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn result_invariants() {
        let mut rng = stream(5, 0);
        let q = QuadraticForm::random(5, 2, &mut rng).unwrap();
        let r = gamma_infimum(&q, &opts(16, 3)).unwrap();
        let xi = r.decomposable();
        assert!((xi.norm() - 1.0).abs() < 1e-9);
        assert!((q.eval(&xi).unwrap() - r.gamma).abs() < 1e-9);
        assert!(r.converged);
        assert!(gamma_infimum(&q, &opts(0, 3)).is_err());
    }

    #[test]
    fn k_one_gives_min_eigenvalue() {
        let mut rng = stream(6, 0);
        let q = QuadraticForm::random(4, 1, &mut rng).unwrap();
        let r = gamma_infimum(&q, &opts(3, 0)).unwrap();
        assert!((r.gamma - q.min_eigenvalue()).abs() < 1e-10);
    }

    #[test]
    fn one_convexity_verdicts() {
        let o = opts(8, 2);
        assert!(
            is_ext_one_convex(&QuadraticForm::identity(4, 2), &o, 1e-8)
                .unwrap()
                .ext_one_convex
        );
        let neg = QuadraticForm::identity(4, 2).shift(2.0);
        let v = is_ext_one_convex(&neg, &o, 1e-8).unwrap();
        assert!(!v.ext_one_convex);
        assert!(neg.eval(&v.witness.unwrap()).unwrap() < 0.0);
        // The Pfaffian vanishes on decomposables but is indefinite.
        let g = QuadraticForm::pfaffian();
        let v = is_ext_one_convex(&g, &o, 1e-8).unwrap();
        assert!(v.ext_one_convex && v.gamma.gamma.abs() < 1e-10);
        assert!(!g.is_convex(1e-8));
    }

    #[test]
    fn sup_of_alpha_squared() {
        let alpha = e(6, &[1, 2, 3]) + e(6, &[4, 5, 6]);
        let c = proposition_c_constant(&alpha, &opts(32, 1)).unwrap();
        assert!((1.0 / c - 1.0).abs() < 1e-9);
        let c2 = proposition_c_constant(&alpha.scale(&2.0), &opts(32, 1)).unwrap();
        assert!((c2 - c / 4.0).abs() < 1e-9);
        let s = e(4, &[1, 2]) + e(4, &[3, 4]);
        let c = proposition_c_constant(&s, &opts(32, 1)).unwrap();
        assert!((1.0 / c - 1.0).abs() < 1e-9);
        assert!(proposition_c_constant(&e(4, &[1, 2]), &opts(4, 1)).is_err());
    }

    #[test]
    fn gamma_invariant_under_rotation() {
        let mut rng = stream(7, 0);
        let q = QuadraticForm::random(4, 2, &mut rng).unwrap();
        let (c, s) = (0.28f64, 0.96f64);
        let t = LinearMap::new(Dense::from_rows(&[
            vec![c, -s, 0.0, 0.0],
            vec![s, c, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ]))
        .unwrap();
        let rotated = q.compose_pullback(&t).unwrap();
        let g1 = gamma_infimum(&q, &opts(32, 1)).unwrap().gamma;
        let g2 = gamma_infimum(&rotated, &opts(32, 2)).unwrap().gamma;
        assert!((g1 - g2).abs() < 1e-6, "{g1} vs {g2}");
    }

    #[test]
    fn grid_agrees_roughly_and_bounds_optimizer() {
        let mut rng = stream(8, 0);
        let q = QuadraticForm::random(4, 2, &mut rng).unwrap();
        let opt = gamma_infimum(&q, &opts(32, 1)).unwrap().gamma;
        let grid = gamma_grid_search(&q, 24, false).unwrap();
        assert!(opt <= grid + 1e-12);
        assert!(grid - opt < 0.1 * (1.0 + opt.abs()), "{grid} vs {opt}");
    }

    #[test]
    fn sphere_grid_is_unit() {
        for b in sphere_grid(4, 5) {
            let norm: f64 = b.iter().map(|x| x * x).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        assert_eq!(sphere_grid(4, 5).len(), 125);
    }
}
