use super::grid::GridField;
use super::ops::{d_transpose, discrete_d};
use crate::algebra::KForm;
use crate::error::{Error, Result};
use crate::quadratic::QuadraticForm;
use crate::quasiaffine::PolyaffineRep;
use rayon::prelude::*;

/// An integrand `f: Λᵏ(ℝⁿ) → ℝ` evaluated on raw coefficient slices.
pub trait Integrand: Sync {
    fn n(&self) -> usize;

    fn degree(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// Writes `∇f(x)` into `grad` and returns `f(x)`. The default uses
    /// central differences.
    fn value_and_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let mut y = x.to_vec();
        for i in 0..x.len() {
            let step = 1e-6 * (1.0 + x[i].abs());
            y[i] = x[i] + step;
            let up = self.value(&y);
            y[i] = x[i] - step;
            let down = self.value(&y);
            y[i] = x[i];
            grad[i] = (up - down) / (2.0 * step);
        }
        self.value(x)
    }
}

/// Wraps a closure on forms; gradients by finite differences.
pub struct FnIntegrand<F> {
    n: usize,
    k: usize,
    f: F,
}

impl<F: Fn(&KForm) -> f64 + Sync> FnIntegrand<F> {
    pub fn new(n: usize, k: usize, f: F) -> Self {
        Self { n, k, f }
    }
}

impl<F: Fn(&KForm) -> f64 + Sync> Integrand for FnIntegrand<F> {
    fn n(&self) -> usize {
        self.n
    }

    fn degree(&self) -> usize {
        self.k
    }

    fn value(&self, x: &[f64]) -> f64 {
        let form = KForm::from_coeffs(self.n, self.k, x.to_vec()).expect("slice of the integrand's degree");
        (self.f)(&form)
    }
}

impl Integrand for QuadraticForm<f64> {
    fn n(&self) -> usize {
        QuadraticForm::n(self)
    }

    fn degree(&self) -> usize {
        QuadraticForm::degree(self)
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.eval_slice(x)
    }

    fn value_and_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        grad.copy_from_slice(&self.gradient(x));
        self.eval_slice(x)
    }
}

impl Integrand for PolyaffineRep<f64> {
    fn n(&self) -> usize {
        PolyaffineRep::n(self)
    }

    fn degree(&self) -> usize {
        PolyaffineRep::degree(self)
    }

    fn value(&self, x: &[f64]) -> f64 {
        let form = KForm::from_coeffs(self.n(), self.degree(), x.to_vec()).expect("slice of the integrand's degree");
        self.eval(&form).expect("degrees checked")
    }

    fn value_and_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let form = KForm::from_coeffs(self.n(), self.degree(), x.to_vec()).expect("slice of the integrand's degree");
        grad.copy_from_slice(self.gradient(&form).expect("degrees checked").coeffs());
        self.eval(&form).expect("degrees checked")
    }
}

const BLOCK: usize = 4096;

/// `E(ω) = Σ_cells hⁿ f(ξ + dω(cell))` and optionally `∇_ω E`.
///
/// On the torus every node is a cell and `E` is the grid mean; on the box
/// the cells are the nodes with all coordinates `< N − 1`. Block partial sums
/// are reduced in a fixed order, so the result does not depend on the number
/// of threads.
pub fn grid_energy<F: Integrand + ?Sized>(
    f: &F,
    xi: &KForm,
    omega: &GridField,
    want_gradient: bool,
) -> Result<(f64, Option<GridField>)> {
    let spec = *omega.spec();
    if f.n() != spec.n || xi.n() != spec.n {
        return Err(Error::DimensionMismatch {
            expected: spec.n,
            found: f.n(),
        });
    }
    if f.degree() != omega.degree() + 1 || xi.degree() != f.degree() {
        return Err(Error::DegreeMismatch {
            expected: f.degree(),
            found: omega.degree() + 1,
        });
    }
    let d = discrete_d(omega)?;
    let comps = d.components();
    let w = spec.cell_weight();
    let mut g = if want_gradient {
        Some(GridField::zeros(spec, f.degree())?)
    } else {
        None
    };
    let dvals = d.values();
    let partial: Vec<f64> = match g.as_mut() {
        Some(g) => g
            .values_mut()
            .par_chunks_mut(BLOCK * comps)
            .enumerate()
            .map(|(b, out)| {
                let mut y = vec![0.0; comps];
                let mut acc = 0.0;
                for (local, gnode) in out.chunks_mut(comps).enumerate() {
                    let node = b * BLOCK + local;
                    if !spec.is_cell(node) {
                        continue;
                    }
                    for (c, yc) in y.iter_mut().enumerate() {
                        *yc = xi.coeffs()[c] + dvals[node * comps + c];
                    }
                    acc += f.value_and_gradient(&y, gnode);
                    gnode.iter_mut().for_each(|v| *v *= w);
                }
                acc
            })
            .collect(),
        None => dvals
            .par_chunks(BLOCK * comps)
            .enumerate()
            .map(|(b, block)| {
                let mut y = vec![0.0; comps];
                let mut acc = 0.0;
                for (local, dn) in block.chunks(comps).enumerate() {
                    if !spec.is_cell(b * BLOCK + local) {
                        continue;
                    }
                    for (c, yc) in y.iter_mut().enumerate() {
                        *yc = xi.coeffs()[c] + dn[c];
                    }
                    acc += f.value(&y);
                }
                acc
            })
            .collect(),
    };
    let energy = w * partial.iter().sum::<f64>();
    if !energy.is_finite() {
        return Err(Error::Numerical("non-finite energy".into()));
    }
    let grad = g.map(|g| d_transpose(&g)).transpose()?;
    Ok((energy, grad))
}
