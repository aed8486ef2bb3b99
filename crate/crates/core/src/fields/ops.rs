use super::grid::{Domain, GridField, GridSpec};
use crate::algebra::basis_form;
use crate::error::{Error, Result};
use crate::multi_index::{binomial, wedge_table};
use rayon::prelude::*;

/// `(component of ω, component of dω, negative sign)` per axis.
type AxisEntries = Vec<Vec<(usize, usize, bool)>>;

fn axis_entries(n: usize, k: usize) -> AxisEntries {
    let mut by_axis = vec![Vec::new(); n];
    for &(j, b, o, neg) in &wedge_table(n, 1, k).entries {
        by_axis[j].push((b, o, neg));
    }
    by_axis
}

fn forward_neighbor(spec: &GridSpec, node: usize, j: usize) -> Option<usize> {
    let (c, s) = (spec.coord(node, j), spec.stride(j));
    if c + 1 < spec.size {
        Some(node + s)
    } else if spec.domain == Domain::Torus {
        Some(node - c * s)
    } else {
        None
    }
}

fn backward_neighbor(spec: &GridSpec, node: usize, j: usize) -> Option<usize> {
    let (c, s) = (spec.coord(node, j), spec.stride(j));
    if c > 0 {
        Some(node - s)
    } else if spec.domain == Domain::Torus {
        Some(node + (spec.size - 1) * s)
    } else {
        None
    }
}

fn exterior_derivative(field: &GridField, backward: bool) -> Result<GridField> {
    let spec = *field.spec();
    let (n, k) = (spec.n, field.degree());
    if k >= n {
        return Err(Error::DegreeOverflow { degree: k + 1, n });
    }
    let by_axis = axis_entries(n, k);
    let (cin, cout) = (binomial(n, k), binomial(n, k + 1));
    let inv_h = 1.0 / spec.h();
    let vals = field.values();
    let mut out = GridField::zeros(spec, k + 1)?;
    out.values_mut().par_chunks_mut(cout).enumerate().for_each(|(node, o)| {
        for (j, entries) in by_axis.iter().enumerate() {
            let (from, to) = if backward {
                match backward_neighbor(&spec, node, j) {
                    Some(p) => (p, node),
                    None => continue,
                }
            } else {
                match forward_neighbor(&spec, node, j) {
                    Some(q) => (node, q),
                    None => continue,
                }
            };
            for &(b, oi, neg) in entries {
                let diff = (vals[to * cin + b] - vals[from * cin + b]) * inv_h;
                if neg {
                    o[oi] -= diff;
                } else {
                    o[oi] += diff;
                }
            }
        }
    });
    Ok(out)
}

/// Discrete exterior derivative `dω = Σ_j e^j ∧ D_j ω` with forward
/// differences `D_j`. On the torus `D_j` wraps around; on the box it is set to
/// zero on the last layer `x_j = 1`, which keeps `d ∘ d = 0` exact.
pub fn discrete_d(field: &GridField) -> Result<GridField> {
    exterior_derivative(field, false)
}

/// Transpose of [`discrete_d`] with respect to the plain dot product of
/// value arrays; maps degree `k+1` fields to degree `k`.
pub fn d_transpose(field: &GridField) -> Result<GridField> {
    let spec = *field.spec();
    let n = spec.n;
    let k = field
        .degree()
        .checked_sub(1)
        .ok_or_else(|| Error::Precondition("a field of degree ≥ 1".into()))?;
    let by_axis = axis_entries(n, k);
    let (cin, cout) = (binomial(n, k + 1), binomial(n, k));
    let inv_h = 1.0 / spec.h();
    let g = field.values();
    let mut out = GridField::zeros(spec, k)?;
    out.values_mut().par_chunks_mut(cout).enumerate().for_each(|(node, o)| {
        for (j, entries) in by_axis.iter().enumerate() {
            let own = forward_neighbor(&spec, node, j).is_some();
            let pred = backward_neighbor(&spec, node, j);
            for &(b, oi, neg) in entries {
                let mut v = 0.0;
                if let Some(p) = pred {
                    v += g[p * cin + oi];
                }
                if own {
                    v -= g[node * cin + oi];
                }
                v *= inv_h;
                if neg {
                    o[b] -= v;
                } else {
                    o[b] += v;
                }
            }
        }
    });
    Ok(out)
}

fn pointwise_star(field: &GridField) -> Result<GridField> {
    let spec = *field.spec();
    let (n, k) = (spec.n, field.degree());
    let image: Vec<(usize, f64)> = (0..binomial(n, k))
        .map(|r| {
            let s = basis_form::<f64>(n, k, r).hodge_star();
            let (pos, v) = s
                .coeffs()
                .iter()
                .enumerate()
                .find(|(_, v)| **v != 0.0)
                .expect("star of a basis form");
            (pos, *v)
        })
        .collect();
    let (cin, cout) = (binomial(n, k), binomial(n, n - k));
    let vals = field.values();
    let mut out = GridField::zeros(spec, n - k)?;
    out.values_mut().par_chunks_mut(cout).enumerate().for_each(|(node, o)| {
        for (r, &(pos, sign)) in image.iter().enumerate() {
            o[pos] = sign * vals[node * cin + r];
        }
    });
    Ok(out)
}

/// Codifferential `δω = (−1)^{n(k−1)} ∗ d⁻ ∗ ω` on the torus, with `d⁻` the
/// backward-difference exterior derivative. With this sign `δ = −dᵀ`, so
/// `⟨dα, β⟩ = −⟨α, δβ⟩` exactly on the grid.
pub fn discrete_delta(field: &GridField) -> Result<GridField> {
    let spec = field.spec();
    if spec.domain != Domain::Torus {
        return Err(Error::Precondition(
            "the codifferential is implemented on the torus only".into(),
        ));
    }
    let k = field.degree();
    if k == 0 {
        return Err(Error::Precondition("a field of degree ≥ 1".into()));
    }
    let inner = exterior_derivative(&pointwise_star(field)?, true)?;
    let mut out = pointwise_star(&inner)?;
    if (spec.n * (k - 1)) % 2 == 1 {
        out.values_mut().iter_mut().for_each(|v| *v = -*v);
    }
    Ok(out)
}
