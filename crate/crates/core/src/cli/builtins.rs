//! Named integrands selectable with `--fn builtin:<name>` or `--fn rep:<path>`.

use crate::algebra::KForm;
use crate::counterexamples::{build_serre_form, build_sverak, SverakEnergy};
use crate::error::{Error, Result};
use crate::fields::Integrand;
use crate::io::{read_json_file, rep_from_json};
use crate::quadratic::QuadraticForm;
use crate::quasiaffine::PolyaffineRep;
use crate::scalar::{exact_from_f64, Exact};
use std::path::Path;

/// Names accepted after `builtin:`.
pub const BUILTIN_NAMES: &[&str] = &["norm2", "norm4", "pfaffian", "wedge-square", "serre", "sverak"];

/// Parameters a builtin may need beyond its name.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuiltinParams {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub eps: f64,
    pub gamma_pen: Option<f64>,
}

impl Default for BuiltinParams {
    fn default() -> Self {
        Self {
            n: None,
            k: None,
            eps: 1e-3,
            gamma_pen: None,
        }
    }
}

pub enum Builtin {
    /// `⟨Mξ; ξ⟩` together with its exact-mode matrix.
    Quadratic {
        name: String,
        q: QuadraticForm,
        exact: QuadraticForm<Exact>,
    },
    /// `|ξ|⁴ + |ξ|²`.
    Norm4 {
        n: usize,
        k: usize,
    },
    Sverak(Box<SverakEnergy>),
    Rep(PolyaffineRep),
}

fn need(v: Option<usize>, flag: &str, name: &str) -> Result<usize> {
    v.ok_or_else(|| Error::InvalidInput(format!("builtin:{name} needs --{flag}")))
}

fn expect_dims(name: &str, p: &BuiltinParams, n: usize, k: usize) -> Result<()> {
    if p.n.is_some_and(|v| v != n) || p.k.is_some_and(|v| v != k) {
        return Err(Error::InvalidInput(format!("builtin:{name} lives on Λ^{k}(ℝ^{n})")));
    }
    Ok(())
}

impl Builtin {
    /// Resolves `builtin:<name>` or `rep:<path>`.
    pub fn resolve(spec: &str, p: &BuiltinParams) -> Result<Self> {
        if let Some(path) = spec.strip_prefix("rep:") {
            let rep = rep_from_json(&read_json_file(Path::new(path))?)?;
            return Ok(Builtin::Rep(rep));
        }
        let name = spec
            .strip_prefix("builtin:")
            .ok_or_else(|| Error::InvalidInput(format!("--fn must be builtin:<name> or rep:<path>, got {spec:?}")))?;
        let quad = |q: QuadraticForm, exact: QuadraticForm<Exact>| Builtin::Quadratic {
            name: name.to_string(),
            q,
            exact,
        };
        match name {
            "norm2" => {
                let (n, k) = (need(p.n, "n", name)?, need(p.k, "k", name)?);
                KForm::<f64>::zero(n, k)?;
                Ok(quad(QuadraticForm::identity(n, k), QuadraticForm::identity(n, k)))
            }
            "norm4" => {
                let (n, k) = (need(p.n, "n", name)?, need(p.k, "k", name)?);
                KForm::<f64>::zero(n, k)?;
                Ok(Builtin::Norm4 { n, k })
            }
            "pfaffian" => {
                expect_dims(name, p, 4, 2)?;
                Ok(quad(
                    QuadraticForm::pfaffian(),
                    QuadraticForm::wedge_square(2, &KForm::volume(4))?,
                ))
            }
            "wedge-square" => {
                let (n, k) = (need(p.n, "n", name)?, need(p.k, "k", name)?);
                let idx: Vec<usize> = (1..=2 * k).collect();
                let beta = KForm::<f64>::basis(n, &idx)?;
                let q = QuadraticForm::wedge_square(k, &beta)?;
                let exact = QuadraticForm::wedge_square(k, &KForm::<Exact>::basis(n, &idx)?)?;
                Ok(quad(q, exact))
            }
            "serre" => {
                expect_dims(name, p, 6, 2)?;
                Ok(quad(build_serre_form(), build_serre_form()))
            }
            "sverak" => {
                let k = need(p.k, "k", name)?;
                let c = build_sverak::<f64>(k)?;
                expect_dims(name, p, c.n, k)?;
                let gamma_pen = p
                    .gamma_pen
                    .ok_or_else(|| Error::InvalidInput("builtin:sverak needs --gamma-pen".into()))?;
                Ok(Builtin::Sverak(Box::new(SverakEnergy::new(c, p.eps, gamma_pen)?)))
            }
            other => Err(Error::InvalidInput(format!(
                "unknown builtin {other:?}; expected one of {}",
                BUILTIN_NAMES.join(", ")
            ))),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Builtin::Quadratic { name, .. } => format!("builtin:{name}"),
            Builtin::Norm4 { .. } => "builtin:norm4".into(),
            Builtin::Sverak(_) => "builtin:sverak".into(),
            Builtin::Rep(_) => "rep".into(),
        }
    }

    pub fn eval(&self, x: &KForm) -> f64 {
        self.value(x.coeffs())
    }

    /// Exact evaluation, available for every builtin except `sverak`.
    pub fn eval_exact(&self, x: &KForm<Exact>) -> Result<Exact> {
        match self {
            Builtin::Quadratic { exact, .. } => exact.eval(x),
            Builtin::Norm4 { .. } => {
                let s = x.norm_squared();
                Ok(s.clone() * s.clone() + s)
            }
            Builtin::Sverak(_) => Err(Error::Precondition("float mode for builtin:sverak".into())),
            Builtin::Rep(rep) => {
                let c = rep
                    .coefficients()
                    .iter()
                    .map(|c| c.map(|v| exact_from_f64(*v)))
                    .collect();
                PolyaffineRep::<Exact>::new(rep.n(), rep.degree(), c)?.eval(x)
            }
        }
    }
}

impl Integrand for Builtin {
    fn n(&self) -> usize {
        match self {
            Builtin::Quadratic { q, .. } => q.n(),
            Builtin::Norm4 { n, .. } => *n,
            Builtin::Sverak(f) => f.construction.n,
            Builtin::Rep(r) => r.n(),
        }
    }

    fn degree(&self) -> usize {
        match self {
            Builtin::Quadratic { q, .. } => q.degree(),
            Builtin::Norm4 { k, .. } => *k,
            Builtin::Sverak(f) => f.construction.k,
            Builtin::Rep(r) => r.degree(),
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        match self {
            Builtin::Quadratic { q, .. } => q.value(x),
            Builtin::Norm4 { .. } => {
                let s: f64 = x.iter().map(|v| v * v).sum();
                s * s + s
            }
            Builtin::Sverak(f) => f.value(x),
            Builtin::Rep(r) => r.value(x),
        }
    }

    fn value_and_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        match self {
            Builtin::Quadratic { q, .. } => q.value_and_gradient(x, grad),
            Builtin::Norm4 { .. } => {
                let s: f64 = x.iter().map(|v| v * v).sum();
                for (g, v) in grad.iter_mut().zip(x) {
                    *g = (4.0 * s + 2.0) * v;
                }
                s * s + s
            }
            Builtin::Sverak(f) => f.value_and_gradient(x, grad),
            Builtin::Rep(r) => r.value_and_gradient(x, grad),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn params(n: usize, k: usize) -> BuiltinParams {
        BuiltinParams {
            n: Some(n),
            k: Some(k),
            ..Default::default()
        }
    }

    #[test]
    fn norm4_gradient_matches_differences() {
        let f = Builtin::resolve("builtin:norm4", &params(4, 2)).unwrap();
        let x = [0.3, -0.2, 0.5, 0.1, 0.0, -0.7];
        let mut g = [0.0; 6];
        f.value_and_gradient(&x, &mut g);
        for i in 0..6 {
            let mut y = x;
            y[i] += 1e-6;
            let up = f.value(&y);
            y[i] -= 2e-6;
            let fd = (up - f.value(&y)) / 2e-6;
            assert!((fd - g[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn exact_and_float_agree() {
        let x = KForm::<Exact>::from_coeffs(4, 2, (1..=6).map(|i| Exact::from_ratio(i, 3)).collect()).unwrap();
        for name in ["norm2", "norm4", "pfaffian", "wedge-square"] {
            let f = Builtin::resolve(&format!("builtin:{name}"), &params(4, 2)).unwrap();
            let exact = f.eval_exact(&x).unwrap();
            assert!((exact.to_f64() - f.eval(&x.to_f64())).abs() < 1e-12, "{name}");
        }
    }

    #[test]
    fn bad_names_and_dimensions() {
        assert!(Builtin::resolve("builtin:nope", &params(4, 2)).is_err());
        assert!(Builtin::resolve("pfaffian", &params(4, 2)).is_err());
        assert!(Builtin::resolve("builtin:pfaffian", &params(5, 2)).is_err());
        assert!(Builtin::resolve("builtin:sverak", &params(5, 2)).is_err());
        assert!(Builtin::resolve("builtin:norm2", &BuiltinParams::default()).is_err());
    }
}
