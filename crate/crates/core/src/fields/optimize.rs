use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbfgsOptions {
    pub max_iter: usize,
    pub memory: usize,
    /// Stop once `‖∇E‖ ≤ grad_tol · (1 + |E|)`.
    pub grad_tol: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    pub max_backtracks: usize,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self {
            max_iter: 50_000,
            memory: 10,
            grad_tol: 1e-6,
            armijo: 1e-4,
            max_backtracks: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LbfgsOutcome {
    #[serde(skip)]
    pub x: Vec<f64>,
    /// Energy after each accepted step, starting with the initial energy.
    pub energy_trace: Vec<f64>,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub converged: bool,
    /// No Armijo step was found along the last search direction.
    pub line_search_stalled: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Limited-memory BFGS with Armijo backtracking. Entries with
/// `free[i] == false` are held fixed. Every accepted step decreases the
/// energy, so the trace is non-increasing.
pub fn lbfgs<F>(x0: Vec<f64>, mut fg: F, free: Option<&[bool]>, opts: &LbfgsOptions) -> Result<LbfgsOutcome>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let mask = |g: &mut Vec<f64>| {
        if let Some(free) = free {
            g.iter_mut().zip(free).filter(|(_, f)| !**f).for_each(|(v, _)| *v = 0.0);
        }
    };
    let mut x = x0;
    let (mut e, mut g) = fg(&x)?;
    if !e.is_finite() {
        return Err(Error::Numerical("non-finite initial energy".into()));
    }
    mask(&mut g);
    let mut trace = vec![e];
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut iterations = 0;
    let mut stalled = false;
    let mut gnorm = dot(&g, &g).sqrt();
    while gnorm > opts.grad_tol * (1.0 + e.abs()) && iterations < opts.max_iter {
        // Two-loop recursion.
        let mut p: Vec<f64> = g.iter().map(|v| -v).collect();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &p);
            p.iter_mut().zip(y).for_each(|(pi, yi)| *pi -= a * yi);
            alphas.push(a);
        }
        if let Some((s, y, _)) = history.back() {
            let scale = dot(s, y) / dot(y, y);
            p.iter_mut().for_each(|v| *v *= scale);
        } else {
            let scale = 1.0 / gnorm.max(1.0);
            p.iter_mut().for_each(|v| *v *= scale);
        }
        for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &p);
            p.iter_mut().zip(s).for_each(|(pi, si)| *pi += (a - b) * si);
        }
        let mut slope = dot(&g, &p);
        if slope >= 0.0 {
            history.clear();
            p = g.iter().map(|v| -v / gnorm.max(1.0)).collect();
            slope = dot(&g, &p);
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..opts.max_backtracks {
            let trial: Vec<f64> = x.iter().zip(&p).map(|(xi, pi)| xi + step * pi).collect();
            let outcome = fg(&trial);
            if let Ok((et, gt)) = outcome {
                if et.is_finite() && et <= e + opts.armijo * step * slope && et < e {
                    accepted = Some((trial, et, gt));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((xn, en, mut gn)) = accepted else {
            stalled = true;
            break;
        };
        mask(&mut gn);
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&y, &y).max(f64::MIN_POSITIVE) {
            if history.len() == opts.memory {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        x = xn;
        e = en;
        g = gn;
        gnorm = dot(&g, &g).sqrt();
        trace.push(e);
        iterations += 1;
    }
    let converged = gnorm <= opts.grad_tol * (1.0 + e.abs());
    Ok(LbfgsOutcome {
        x,
        energy_trace: trace,
        iterations,
        gradient_norm: gnorm,
        converged,
        line_search_stalled: stalled && !converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_rosenbrock() {
        let f = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            let e = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
            let g = vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)];
            Ok((e, g))
        };
        let out = lbfgs(
            vec![-1.2, 1.0],
            f,
            None,
            &LbfgsOptions {
                grad_tol: 1e-10,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(out.converged);
        assert!((out.x[0] - 1.0).abs() < 1e-6 && (out.x[1] - 1.0).abs() < 1e-6);
        assert!(out.energy_trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn respects_fixed_entries() {
        let f = |x: &[f64]| {
            Ok((
                x.iter().map(|v| v * v).sum::<f64>(),
                x.iter().map(|v| 2.0 * v).collect(),
            ))
        };
        let free = [true, false, true];
        let out = lbfgs(vec![1.0, 2.0, 3.0], f, Some(&free), &LbfgsOptions::default()).unwrap();
        assert_eq!(out.x[1], 2.0);
        assert!(out.x[0].abs() < 1e-6 && out.x[2].abs() < 1e-6);
    }
}
