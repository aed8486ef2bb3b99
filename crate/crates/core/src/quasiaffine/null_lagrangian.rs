use super::{max_power, PolyaffineRep};
use crate::algebra::KForm;
use crate::error::{Error, Result};
use crate::fields::{discrete_d, GridField, GridSpec};
use crate::multi_index::{binomial, wedge_table};
use crate::rng::stream;
use rayon::prelude::*;
use serde::Serialize;

/// `x^s` for a coefficient slice `x ∈ Λᵏ(ℝⁿ)`, `sk ≤ n`.
pub fn power_slice(n: usize, k: usize, x: &[f64], s: usize) -> Vec<f64> {
    let mut acc = vec![1.0];
    for j in 0..s {
        let mut next = vec![0.0; binomial(n, (j + 1) * k)];
        wedge_table(n, j * k, k).accumulate(&acc, x, &mut next);
        acc = next;
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullLagrangianReport {
    pub h: f64,
    pub fields: usize,
    /// Largest `|mean_grid f(ξ + dω) − f(ξ)|` over the sampled fields.
    pub mean_f_difference: f64,
    /// Per `s = 1, …, ⌊n/k⌋`: largest component of
    /// `mean_grid (ξ + dω)^s − ξ^s`, maximized over fields.
    pub moment_errors: Vec<f64>,
}

const BLOCK: usize = 4096;

/// Grid quadrature of the null-Lagrangian identity
/// `mean (ξ + dω)^s = ξ^s` for random smooth periodic `ω`.
pub fn null_lagrangian_check(
    rep: &PolyaffineRep,
    xi: &KForm,
    spec: GridSpec,
    fields: usize,
    seed: u64,
) -> Result<NullLagrangianReport> {
    let (n, k) = (rep.n(), rep.degree());
    if spec.domain != crate::fields::Domain::Torus {
        return Err(Error::Precondition("a periodic grid".into()));
    }
    if spec.n != n || xi.n() != n || xi.degree() != k {
        return Err(Error::InvalidInput(
            "ξ, grid and representation must share n and k".into(),
        ));
    }
    let m = max_power(n, k);
    let xi_pow: Vec<Vec<f64>> = (0..=m).map(|s| power_slice(n, k, xi.coeffs(), s)).collect();
    let f_xi = rep.eval(xi)?;
    let comps = binomial(n, k);
    let mut mean_f_difference: f64 = 0.0;
    let mut moment_errors = vec![0.0f64; m];
    for r in 0..fields {
        let mut rng = stream(seed, r as u64);
        let omega = GridField::random_smooth(spec, k - 1, 3, 1.0, &mut rng)?;
        let d = discrete_d(&omega)?;
        // Per block: sums of f and of every power's components.
        let partial: Vec<(f64, Vec<Vec<f64>>)> = d
            .values()
            .par_chunks(BLOCK * comps)
            .map(|block| {
                let mut fsum = 0.0;
                let mut sums: Vec<Vec<f64>> = (1..=m).map(|s| vec![0.0; binomial(n, s * k)]).collect();
                let mut y = vec![0.0; comps];
                for dn in block.chunks(comps) {
                    for (c, yc) in y.iter_mut().enumerate() {
                        *yc = xi.coeffs()[c] + dn[c];
                    }
                    let mut f = rep.coefficients()[0].coeffs()[0];
                    for s in 1..=m {
                        let p = power_slice(n, k, &y, s);
                        f += rep.coefficients()[s]
                            .coeffs()
                            .iter()
                            .zip(&p)
                            .map(|(a, b)| a * b)
                            .sum::<f64>();
                        sums[s - 1].iter_mut().zip(&p).for_each(|(a, b)| *a += b);
                    }
                    fsum += f;
                }
                (fsum, sums)
            })
            .collect();
        let count = spec.num_nodes() as f64;
        let mut fsum = 0.0;
        let mut sums: Vec<Vec<f64>> = (1..=m).map(|s| vec![0.0; binomial(n, s * k)]).collect();
        for (bf, bs) in partial {
            fsum += bf;
            for (acc, b) in sums.iter_mut().zip(bs) {
                acc.iter_mut().zip(b).for_each(|(a, v)| *a += v);
            }
        }
        mean_f_difference = mean_f_difference.max((fsum / count - f_xi).abs());
        for s in 1..=m {
            let err = sums[s - 1]
                .iter()
                .zip(&xi_pow[s])
                .map(|(a, b)| (a / count - b).abs())
                .fold(0.0, f64::max);
            moment_errors[s - 1] = moment_errors[s - 1].max(err);
        }
    }
    Ok(NullLagrangianReport {
        h: spec.h(),
        fields,
        mean_f_difference,
        moment_errors,
    })
}
