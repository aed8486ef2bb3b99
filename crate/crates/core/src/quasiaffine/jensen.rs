use super::max_power;
use crate::algebra::KForm;
use crate::error::{Error, Result};
use serde::Serialize;

/// Largest moment residual accepted by [`jensen_violation`].
pub const MOMENT_TOL: f64 = 1e-9;

/// Weighted points `(t_i, ξ_i)` for the Jensen inequality of ext.
/// polyconvex functions. A witness is admissible when
/// `Σ t_i ξ_i^s = (Σ t_i ξ_i)^s` for every `s = 1, …, ⌊n/k⌋`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JensenWitness {
    pub weights: Vec<f64>,
    #[serde(skip)]
    pub points: Vec<KForm>,
    /// `‖Σ t_i ξ_i^s − (Σ t_i ξ_i)^s‖` for `s = 1, …, ⌊n/k⌋`.
    pub moment_residuals: Vec<f64>,
    /// `f(Σ t_i ξ_i) − Σ t_i f(ξ_i)` once evaluated.
    pub jensen_gap: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JensenVerdict {
    pub violates: bool,
    pub gap: f64,
}

impl JensenWitness {
    pub fn new(weights: Vec<f64>, points: Vec<KForm>) -> Result<Self> {
        if points.is_empty() || weights.len() != points.len() {
            return Err(Error::InvalidInput("a witness needs one weight per point".into()));
        }
        if weights.iter().any(|&t| !(t >= 0.0)) {
            return Err(Error::InvalidInput("witness weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("witness weights sum to {total}, not 1")));
        }
        let (n, k) = (points[0].n(), points[0].degree());
        if k == 0 {
            return Err(Error::Precondition("points of degree ≥ 1".into()));
        }
        if points.iter().any(|p| p.n() != n || p.degree() != k) {
            return Err(Error::InvalidInput("witness points must share n and k".into()));
        }
        let mut bary = KForm::zero(n, k)?;
        for (t, p) in weights.iter().zip(&points) {
            bary += &p.scale(t);
        }
        let mut moment_residuals = Vec::new();
        for s in 1..=max_power(n, k) {
            let mut mean = KForm::zero(n, s * k)?;
            for (t, p) in weights.iter().zip(&points) {
                mean += &p.wedge_power(s)?.scale(t);
            }
            moment_residuals.push((&mean - &bary.wedge_power(s)?).norm());
        }
        Ok(Self {
            weights,
            points,
            moment_residuals,
            jensen_gap: None,
        })
    }

    /// Equal weights on `±p` for each given `p`.
    pub fn symmetric(points: &[KForm]) -> Result<Self> {
        let t = 0.5 / points.len() as f64;
        let pts: Vec<KForm> = points.iter().flat_map(|p| [p.clone(), -p]).collect();
        let weights = vec![t; pts.len()];
        Self::new(weights, pts)
    }

    pub fn barycenter(&self) -> KForm {
        let mut bary = self.points[0].scale(&0.0);
        for (t, p) in self.weights.iter().zip(&self.points) {
            bary += &p.scale(t);
        }
        bary
    }

    pub fn max_moment_residual(&self) -> f64 {
        self.moment_residuals.iter().fold(0.0, |m, &r| m.max(r))
    }
}

/// Checks `f(Σ t_i ξ_i) ≤ Σ t_i f(ξ_i)`; a violation beyond `tol` certifies
/// that `f` is not ext. polyconvex. The gap is stored on the witness.
pub fn jensen_violation<F: Fn(&KForm) -> f64>(f: F, witness: &mut JensenWitness, tol: f64) -> Result<JensenVerdict> {
    let worst = witness.max_moment_residual();
    if worst > MOMENT_TOL {
        return Err(Error::Precondition(format!(
            "a witness with moment residuals ≤ {MOMENT_TOL:e}, got {worst:e}"
        )));
    }
    let mean: f64 = witness.weights.iter().zip(&witness.points).map(|(t, p)| t * f(p)).sum();
    let gap = f(&witness.barycenter()) - mean;
    witness.jensen_gap = Some(gap);
    Ok(JensenVerdict {
        violates: gap > tol,
        gap,
    })
}
