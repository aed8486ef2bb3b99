use super::energy::{grid_energy, Integrand};
use super::grid::{Domain, GridField};
use super::ops::discrete_d;
use super::optimize::{lbfgs, LbfgsOptions};
use crate::algebra::KForm;
use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletOptions {
    pub max_iter: usize,
    /// Stop once `‖∇E‖ ≤ grad_tol · (1 + |E|)`.
    pub grad_tol: f64,
}

impl Default for DirichletOptions {
    fn default() -> Self {
        Self {
            max_iter: 50_000,
            grad_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimizationReport {
    /// Non-increasing: every entry comes from an accepted Armijo step.
    pub energy_trace: Vec<f64>,
    pub final_energy: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub converged: bool,
    pub line_search_stalled: bool,
    /// `dω` of the final iterate; `ω` itself is only determined up to a gauge.
    #[serde(skip)]
    pub d_omega_snapshot: GridField,
    #[serde(skip)]
    pub omega: GridField,
}

/// Minimizes `Σ_cells hⁿ f(dω)` over fields that agree with `omega0` on the
/// boundary of the box, starting from `omega0`.
pub fn minimize_dirichlet<F: Integrand + ?Sized>(
    f: &F,
    omega0: &GridField,
    opts: &DirichletOptions,
) -> Result<MinimizationReport> {
    let spec = *omega0.spec();
    if spec.domain != Domain::Box {
        return Err(Error::Precondition("Dirichlet minimization on a box grid".into()));
    }
    let comps = omega0.components();
    let free: Vec<bool> = (0..spec.num_nodes())
        .flat_map(|node| std::iter::repeat(!spec.is_boundary(node)).take(comps))
        .collect();
    let zero = KForm::zero(spec.n, f.degree())?;
    let k = omega0.degree();
    let fg = |x: &[f64]| {
        let w = GridField::from_values(spec, k, x.to_vec())?;
        let (e, g) = grid_energy(f, &zero, &w, true)?;
        Ok((e, g.expect("gradient requested").into_values()))
    };
    let lopts = LbfgsOptions {
        max_iter: opts.max_iter,
        grad_tol: opts.grad_tol,
        ..Default::default()
    };
    let out = lbfgs(omega0.values().to_vec(), fg, Some(&free), &lopts)?;
    let omega = GridField::from_values(spec, k, out.x)?;
    Ok(MinimizationReport {
        final_energy: *out.energy_trace.last().expect("trace starts with the initial energy"),
        energy_trace: out.energy_trace,
        iterations: out.iterations,
        gradient_norm: out.gradient_norm,
        converged: out.converged,
        line_search_stalled: out.line_search_stalled,
        d_omega_snapshot: discrete_d(&omega)?,
        omega,
    })
}
