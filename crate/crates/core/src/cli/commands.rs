use super::{
    AlgebraArgs, AlgebraOp, Builtin, ClassifyArgs, Command, EnvelopeArgs, MinimizeArgs, Mode, QuasiaffineCommand,
    ReproduceCommand, RunConfig, WarmStart, SCHEMA_VERSION,
};
use crate::algebra::{KForm, LinearMap};
use crate::counterexamples::{
    build_serre_form, build_sverak, calibrate_gamma_pen, check_l_claim, one_convexity_margin,
    serre_half_square_expansion, serre_jensen_witness, serre_violation, serre_xi_family, sverak_integral,
    sverak_warm_start, CalibrationOptions, SverakEnergy,
};
use crate::divisibility::{form_rank, form_rank_exact, one_divisible, one_divisible_exact};
use crate::error::{Error, Result};
use crate::fields::{
    envelope_estimate, minimize_dirichlet, DirichletOptions, EnvelopeOptions, GridField, GridSpec, Integrand,
    LbfgsOptions,
};
use crate::io::{
    exact_form_from_json, exact_form_to_json, exact_linear_map_from_json, exact_rep_to_json, form_from_json,
    form_to_json, linear_map_from_json, quadratic_from_json, read_json_file, rep_to_json,
};
use crate::quadratic::{
    gamma_grid_search, is_ext_one_convex, marcellini_lambda, polyconvexity_certificate, CertificateOptions,
    GammaOptions,
};
use crate::quasiaffine::{extract_representation, jensen_violation, verify_ext_one_affine};
use crate::rng::stream;
use crate::scalar::{format_exact, Exact, Scalar};
use num_traits::Zero;
use rand::Rng;
use serde_json::{json, Map, Value};
use std::path::{Path, PathBuf};

/// Runs a parsed subcommand; returns the report and the exit code.
pub(super) fn dispatch(command: &Command, cfg: &RunConfig) -> Result<(Value, i32)> {
    let report = match command {
        Command::Algebra(a) => algebra(a, cfg)?,
        Command::Divisible { form } => divisible(form, cfg)?,
        Command::Classify(a) => classify(a, cfg)?,
        Command::Quasiaffine(q) => quasiaffine(q, cfg)?,
        Command::Reproduce(ReproduceCommand::Serre {
            restarts,
            samples,
            grid,
        }) => reproduce_serre(*restarts, *samples, *grid, cfg)?,
        Command::Reproduce(ReproduceCommand::Sverak {
            k,
            eps,
            gamma_pen,
            restarts,
            l_trials,
            quad,
            grid,
            max_iter,
        }) => reproduce_sverak(
            &SverakArgs {
                k: *k,
                eps: *eps,
                gamma_pen: *gamma_pen,
                restarts: *restarts,
                l_trials: *l_trials,
                quad: *quad,
                grid: *grid,
                max_iter: *max_iter,
            },
            cfg,
        )?,
        Command::Envelope(a) => envelope(a, cfg)?,
        Command::Minimize(a) => minimize(a, cfg)?,
        Command::Suite { full } => {
            let report = super::run_suite(*full, cfg.seed)?;
            let code = if report.all_passed { 0 } else { 2 };
            let mut out = header("suite", cfg);
            out.insert("full".into(), json!(full));
            out.extend(as_map(serde_json::to_value(&report)?));
            return Ok((Value::Object(out), code));
        }
    };
    Ok((Value::Object(report), 0))
}

fn header(command: &str, cfg: &RunConfig) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    m.insert("config".into(), serde_json::to_value(cfg).expect("config serializes"));
    m
}

fn as_map(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    }
}

fn float_only(cfg: &RunConfig, what: &str) -> Result<()> {
    if cfg.mode == Mode::Exact {
        return Err(Error::InvalidInput(format!("{what} runs in float mode only")));
    }
    Ok(())
}

enum AlgebraValue<S> {
    Form(KForm<S>),
    Number(S),
}

fn algebra_op<S: Scalar>(
    op: AlgebraOp,
    x: KForm<S>,
    y: Option<KForm<S>>,
    s: usize,
    map: Option<LinearMap<S>>,
) -> Result<AlgebraValue<S>> {
    let y = || {
        y.clone()
            .ok_or_else(|| Error::InvalidInput("this operation needs --y".into()))
    };
    Ok(match op {
        AlgebraOp::Wedge => AlgebraValue::Form(x.wedge(&y()?)?),
        AlgebraOp::Star => AlgebraValue::Form(x.hodge_star()),
        AlgebraOp::Interior => AlgebraValue::Form(x.interior_product(&y()?)?),
        AlgebraOp::Inner => AlgebraValue::Number(x.inner(&y()?)?),
        AlgebraOp::Power => AlgebraValue::Form(x.wedge_power(s)?),
        AlgebraOp::Pullback => {
            let t = map.ok_or_else(|| Error::InvalidInput("pullback needs --map".into()))?;
            AlgebraValue::Form(t.pullback(x.degree())?.apply(&x)?)
        }
        AlgebraOp::NormSquared => AlgebraValue::Number(x.norm_squared()),
    })
}

fn read_optional(path: &Option<PathBuf>) -> Result<Option<Value>> {
    path.as_deref().map(read_json_file).transpose()
}

fn algebra(a: &AlgebraArgs, cfg: &RunConfig) -> Result<Map<String, Value>> {
    let xv = read_json_file(&a.x)?;
    let yv = read_optional(&a.y)?;
    let mv = read_optional(&a.map)?;
    let result = match cfg.mode {
        Mode::Float => {
            let y = yv.as_ref().map(form_from_json).transpose()?;
            let map = mv.as_ref().map(linear_map_from_json).transpose()?;
            match algebra_op(a.op, form_from_json(&xv)?, y, a.s, map)? {
                AlgebraValue::Form(f) => form_to_json(&f),
                AlgebraValue::Number(v) => json!(v),
            }
        }
        Mode::Exact => {
            let y = yv.as_ref().map(exact_form_from_json).transpose()?;
            let map = mv.as_ref().map(exact_linear_map_from_json).transpose()?;
            match algebra_op(a.op, exact_form_from_json(&xv)?, y, a.s, map)? {
                AlgebraValue::Form(f) => exact_form_to_json(&f),
                AlgebraValue::Number(v) => json!(format_exact(&v)),
            }
        }
    };
    let mut out = header("algebra", cfg);
    out.insert("op".into(), serde_json::to_value(a.op)?);
    out.insert("result".into(), result);
    Ok(out)
}

fn divisible(path: &Path, cfg: &RunConfig) -> Result<Map<String, Value>> {
    let v = read_json_file(path)?;
    let mut out = header("divisible", cfg);
    match cfg.mode {
        Mode::Float => {
            let x = form_from_json(&v)?;
            let r = one_divisible(&x)?;
            let residual = match (&r.factor_a, &r.factor_b) {
                (Some(a), Some(b)) => Some(a.wedge(b)?.checked_sub(&x)?.max_abs()),
                _ => None,
            };
            out.insert("divisible".into(), json!(r.divisible));
            out.insert("kernel_dim".into(), json!(r.kernel_dim));
            out.insert("form_rank".into(), json!(form_rank(&x)?));
            out.insert("factor_a".into(), r.factor_a.as_ref().map_or(Value::Null, form_to_json));
            out.insert("factor_b".into(), r.factor_b.as_ref().map_or(Value::Null, form_to_json));
            out.insert("factorization_residual".into(), json!(residual));
        }
        Mode::Exact => {
            let x = exact_form_from_json(&v)?;
            let r = one_divisible_exact(&x)?;
            let exact_ok = match (&r.factor_a, &r.factor_b) {
                (Some(a), Some(b)) => Some(a.wedge(b)? == x),
                _ => None,
            };
            out.insert("divisible".into(), json!(r.divisible));
            out.insert("kernel_dim".into(), json!(r.kernel_dim));
            out.insert("form_rank".into(), json!(form_rank_exact(&x)?));
            out.insert(
                "factor_a".into(),
                r.factor_a.as_ref().map_or(Value::Null, exact_form_to_json),
            );
            out.insert(
                "factor_b".into(),
                r.factor_b.as_ref().map_or(Value::Null, exact_form_to_json),
            );
            out.insert("factorization_exact".into(), json!(exact_ok));
        }
    }
    Ok(out)
}

fn classify(a: &ClassifyArgs, cfg: &RunConfig) -> Result<Map<String, Value>> {
    float_only(cfg, "classify")?;
    let q = quadratic_from_json(&read_json_file(&a.quadratic)?)?;
    if a.n.is_some_and(|n| n != q.n()) || a.k.is_some_and(|k| k != q.degree()) {
        return Err(Error::InvalidInput(format!(
            "file holds a form on Λ^{}(ℝ^{}), which disagrees with --n/--k",
            q.degree(),
            q.n()
        )));
    }
    let eig_tol = cfg.tol("eig");
    let min_eig = q.min_eigenvalue();
    let gopts = GammaOptions {
        restarts: a.restarts,
        seed: cfg.seed,
        ..Default::default()
    };
    let oc = is_ext_one_convex(&q, &gopts, cfg.tol("one_convex"))?;
    let cert = polyconvexity_certificate(
        &q,
        &CertificateOptions {
            max_iter: a.max_iter,
            tol: eig_tol,
            ..Default::default()
        },
    )?;
    let mut out = header("classify", cfg);
    out.insert("n".into(), json!(q.n()));
    out.insert("k".into(), json!(q.degree()));
    out.insert("convex".into(), json!(min_eig >= -eig_tol));
    out.insert("min_eigenvalue".into(), json!(min_eig));
    out.insert("ext_one_convex".into(), json!(oc.ext_one_convex));
    out.insert(
        "gamma".into(),
        json!({
            "value": oc.gamma.gamma,
            "kind": "upper_bound",
            "restarts": oc.gamma.restarts,
            "converged": oc.gamma.converged,
            "argmin_a": form_to_json(&oc.gamma.argmin_a),
            "argmin_b": form_to_json(&oc.gamma.argmin_b),
        }),
    );
    out.insert(
        "polyconvex_certificate".into(),
        json!({
            "status": cert.status,
            "achieved_min_eig": cert.achieved_min_eig,
            "iterations": cert.iterations,
            "fast_path": cert.fast_path,
            "beta": cert.beta.as_ref().map_or(Value::Null, form_to_json),
        }),
    );
    if q.n() == 4 && q.degree() == 2 {
        out.insert("lambda_marcellini".into(), json!(marcellini_lambda(&q)?));
    }
    Ok(out)
}

fn quasiaffine(cmd: &QuasiaffineCommand, cfg: &RunConfig) -> Result<Map<String, Value>> {
    match cmd {
        QuasiaffineCommand::Extract { function } => {
            let f = function.resolve()?;
            let (n, k) = (f.n(), f.degree());
            let mut out = header("quasiaffine extract", cfg);
            out.insert("function".into(), json!(f.label()));
            out.insert("n".into(), json!(n));
            out.insert("k".into(), json!(k));
            let rep = match cfg.mode {
                Mode::Float => extract_representation::<f64, _>(|x| f.eval(x), n, k).map(|r| rep_to_json(&r)),
                Mode::Exact => {
                    f.eval_exact(&KForm::zero(n, k)?)?;
                    extract_representation::<Exact, _>(|x| f.eval_exact(x).expect("exact evaluation available"), n, k)
                        .map(|r| exact_rep_to_json(&r))
                }
            };
            match rep {
                Ok(rep) => {
                    out.insert("ext_one_affine".into(), json!(true));
                    out.insert("representation".into(), rep);
                }
                Err(Error::InvalidInput(reason)) => {
                    out.insert("ext_one_affine".into(), json!(false));
                    out.insert("representation".into(), Value::Null);
                    out.insert("reason".into(), json!(reason));
                }
                Err(e) => return Err(e),
            }
            Ok(out)
        }
        QuasiaffineCommand::Verify { function, samples } => {
            float_only(cfg, "quasiaffine verify")?;
            let f = function.resolve()?;
            let r = verify_ext_one_affine(|x| f.eval(x), f.n(), f.degree(), *samples, cfg.seed, cfg.tol("affine"))?;
            let mut out = header("quasiaffine verify", cfg);
            out.insert("function".into(), json!(f.label()));
            out.extend(as_map(serde_json::to_value(&r)?));
            Ok(out)
        }
    }
}

fn reproduce_serre(restarts: usize, samples: usize, grid: usize, cfg: &RunConfig) -> Result<Map<String, Value>> {
    float_only(cfg, "reproduce serre")?;
    let g = build_serre_form::<f64>();
    let gopts = GammaOptions {
        restarts,
        seed: cfg.seed,
        ..Default::default()
    };
    let gamma = is_ext_one_convex(&g, &gopts, cfg.tol("one_convex"))?.gamma;
    let grid_bound = (grid > 0).then(|| gamma_grid_search(&g, grid, false)).transpose()?;

    let g_exact = build_serre_form::<Exact>();
    let mut rng = stream(cfg.seed, 1);
    let mut family_zero = true;
    let mut expansion_matches = true;
    let family_trials = 25;
    for _ in 0..family_trials {
        let p: Vec<Exact> = (0..4)
            .map(|_| Exact::from_ratio(rng.gen_range(-9..10), rng.gen_range(1..7)))
            .collect();
        let xi = serre_xi_family(p[0].clone(), p[1].clone(), p[2].clone(), p[3].clone());
        family_zero &= g_exact.eval(&xi)?.is_zero();
        let half = xi.wedge(&xi)?.scale(&Exact::from_ratio(1, 2));
        let mut expected = KForm::<Exact>::zero(6, 4)?;
        for (idx, v) in serre_half_square_expansion(p[0].clone(), p[1].clone(), p[2].clone(), p[3].clone()) {
            expected.set_coeff(&idx, v)?;
        }
        expansion_matches &= half == expected;
    }

    let mut rng = stream(cfg.seed, 2);
    let mut worst = f64::NEG_INFINITY;
    let mut negative = 0;
    let mut cases = Map::new();
    for _ in 0..samples {
        let alpha = KForm::random(6, 4, &mut rng)?;
        let v = serre_violation(&alpha, gamma.gamma)?;
        worst = worst.max(v.value);
        negative += usize::from(v.value < 0.0);
        let key = serde_json::to_value(v.case)?.as_str().unwrap_or("unknown").to_string();
        let count = cases.get(&key).and_then(Value::as_u64).unwrap_or(0);
        cases.insert(key, json!(count + 1));
    }

    let f = g.shift(gamma.gamma);
    let mut witness = serre_jensen_witness()?;
    let verdict = jensen_violation(|x| f.eval(x).expect("Λ²(ℝ⁶)"), &mut witness, cfg.tol("jensen"))?;
    let cert = polyconvexity_certificate(&f, &CertificateOptions::default())?;

    let mut out = header("reproduce serre", cfg);
    out.insert(
        "gamma".into(),
        json!({
            "value": gamma.gamma,
            "positive": gamma.gamma > 0.0,
            "restarts": gamma.restarts,
            "converged": gamma.converged,
            "grid_upper_bound": grid_bound,
            "grid_points_per_angle": grid,
        }),
    );
    out.insert(
        "family".into(),
        json!({
            "trials": family_trials,
            "g_vanishes_exactly": family_zero,
            "half_square_expansion_matches": expansion_matches,
        }),
    );
    out.insert(
        "violations".into(),
        json!({
            "samples": samples,
            "negative": negative,
            "all_negative": negative == samples,
            "max_value": if samples > 0 { json!(worst) } else { Value::Null },
            "cases": cases,
        }),
    );
    out.insert(
        "jensen_witness".into(),
        json!({ "witness": witness, "verdict": verdict }),
    );
    out.insert(
        "certificate_on_g_minus_gamma".into(),
        json!({ "status": cert.status, "achieved_min_eig": cert.achieved_min_eig }),
    );
    Ok(out)
}

struct SverakArgs {
    k: usize,
    eps: f64,
    gamma_pen: Option<f64>,
    restarts: usize,
    l_trials: usize,
    quad: usize,
    grid: Option<usize>,
    max_iter: usize,
}

/// Smallest sampled `d²/dt² f(ξ + tη)` over random `ξ` and unit decomposable `η`.
fn sampled_second_derivative(f: &SverakEnergy, samples: usize, seed: u64) -> Result<f64> {
    let (n, k) = (f.construction.n, f.construction.k);
    let mut rng = stream(seed, 3);
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let xi = KForm::random(n, k, &mut rng)?;
        let a = KForm::random(n, k - 1, &mut rng)?;
        let b = KForm::random(n, 1, &mut rng)?;
        let eta = a.wedge(&b)?;
        let norm = eta.norm();
        if norm < 1e-12 {
            continue;
        }
        worst = worst.min(f.second_derivative(&xi, &eta.scale(&(1.0 / norm))));
    }
    Ok(worst)
}

fn reproduce_sverak(a: &SverakArgs, cfg: &RunConfig) -> Result<Map<String, Value>> {
    float_only(cfg, "reproduce sverak")?;
    let c = build_sverak::<f64>(a.k)?;
    let l_claim = check_l_claim(&c, a.l_trials, cfg.seed)?;
    let (gamma_pen, calibration) = match a.gamma_pen {
        Some(g) => (g, Value::Null),
        None => {
            let r = calibrate_gamma_pen(
                &c,
                a.eps,
                &CalibrationOptions {
                    restarts: a.restarts,
                    seed: cfg.seed,
                    ..Default::default()
                },
            )?;
            (r.gamma_pen, serde_json::to_value(&r)?)
        }
    };
    let margin = one_convexity_margin(&c, a.eps, gamma_pen, a.restarts, cfg.seed.wrapping_add(1))?;
    let energy = SverakEnergy::new(c.clone(), a.eps, gamma_pen)?;
    let samples = 10_000;
    let sampled = sampled_second_derivative(&energy, samples, cfg.seed)?;
    let integral = sverak_integral(&c, a.eps, gamma_pen, a.quad)?;
    let integral_eps0 = sverak_integral(&c, 0.0, gamma_pen, a.quad)?;

    let envelope = match a.grid {
        Some(size) => {
            let spec = GridSpec::torus(c.n, size)?;
            let warm = sverak_warm_start(&c, spec)?;
            let opts = EnvelopeOptions {
                restarts: 0,
                seed: cfg.seed,
                descent: LbfgsOptions {
                    max_iter: a.max_iter,
                    ..EnvelopeOptions::default().descent
                },
                ..Default::default()
            };
            let r = envelope_estimate(&energy, &KForm::zero(c.n, a.k)?, spec, Some(&warm), &opts)?;
            let mut m = as_map(serde_json::to_value(&r)?);
            m.insert("grid".into(), serde_json::to_value(spec)?);
            m.insert("below_f_at_zero".into(), json!(r.estimate < 0.0));
            Value::Object(m)
        }
        None => Value::Null,
    };

    let mut out = header("reproduce sverak", cfg);
    out.insert("k".into(), json!(a.k));
    out.insert("n".into(), json!(c.n));
    out.insert("eps".into(), json!(a.eps));
    out.insert(
        "construction".into(),
        json!({
            "alpha": form_to_json(&c.alpha),
            "beta": form_to_json(&c.beta),
            "gamma": form_to_json(&c.gamma),
            "independence_rank": c.independence_rank(),
            "basis_orthogonal": c.basis_is_orthogonal(),
        }),
    );
    out.insert("l_claim".into(), serde_json::to_value(&l_claim)?);
    out.insert("gamma_pen".into(), json!(gamma_pen));
    out.insert("calibration".into(), calibration);
    out.insert(
        "one_convexity".into(),
        json!({
            "adversarial_min_margin": margin.min_margin,
            "adversarial_restarts": margin.restarts,
            "sampled_min_second_derivative": sampled,
            "samples": samples,
            "holds": margin.min_margin >= 0.0 && sampled >= -cfg.tol("one_convex"),
        }),
    );
    out.insert(
        "integral".into(),
        json!({
            "value": integral,
            "value_eps0": integral_eps0,
            "quad_points": a.quad,
            "negative": integral < 0.0,
        }),
    );
    out.insert("envelope".into(), envelope);
    Ok(out)
}

fn envelope(a: &EnvelopeArgs, cfg: &RunConfig) -> Result<Map<String, Value>> {
    float_only(cfg, "envelope")?;
    let f = a.function.resolve()?;
    let (n, k) = (f.n(), f.degree());
    let xi = match &a.xi {
        Some(p) => form_from_json(&read_json_file(p)?)?,
        None => KForm::zero(n, k)?,
    };
    if xi.n() != n || xi.degree() != k {
        return Err(Error::InvalidInput(format!("--xi must be a {k}-form on ℝ^{n}")));
    }
    let spec = GridSpec::torus(n, a.grid)?;
    let warm = match (a.warm_start, &f) {
        (None, _) => None,
        (Some(WarmStart::Sverak), Builtin::Sverak(e)) => Some(sverak_warm_start(&e.construction, spec)?),
        (Some(WarmStart::Sverak), _) => {
            return Err(Error::InvalidInput(
                "--warm-start sverak needs --fn builtin:sverak".into(),
            ))
        }
    };
    let opts = EnvelopeOptions {
        restarts: a.restarts,
        seed: cfg.seed,
        init_amplitude: a.amplitude,
        descent: LbfgsOptions {
            max_iter: a.max_iter,
            ..EnvelopeOptions::default().descent
        },
        ..Default::default()
    };
    let r = envelope_estimate(&f, &xi, spec, warm.as_ref(), &opts)?;
    let mut out = header("envelope", cfg);
    out.insert("function".into(), json!(f.label()));
    out.insert("xi".into(), form_to_json(&xi));
    out.insert("grid".into(), serde_json::to_value(spec)?);
    out.extend(as_map(serde_json::to_value(&r)?));
    Ok(out)
}

fn read_field(path: &str) -> Result<GridField> {
    let p = Path::new(path);
    let bin = if p.extension().is_some_and(|e| e == "json") {
        p.with_extension("bin")
    } else {
        p.to_path_buf()
    };
    GridField::read(&bin)
}

fn boundary_field(a: &MinimizeArgs, n: usize, k: usize) -> Result<GridField> {
    let need_grid = || {
        a.grid
            .ok_or_else(|| Error::InvalidInput("--grid is required with a builtin boundary datum".into()))
    };
    let field = match a.boundary.as_str() {
        "zero" => GridField::zeros(GridSpec::unit_box(n, need_grid()?)?, k - 1)?,
        "linear" => {
            let spec = GridSpec::unit_box(n, need_grid()?)?;
            let idx: Vec<usize> = (2..=k).collect();
            let tail = KForm::<f64>::basis(n, &idx)?;
            GridField::from_fn(spec, k - 1, |x| tail.scale(&x[0]).into_coeffs())?
        }
        path => read_field(path)?,
    };
    let spec = field.spec();
    if spec.n != n || field.degree() + 1 != k {
        return Err(Error::InvalidInput(format!(
            "boundary datum must be a {}-field on a grid in n = {n} dimensions",
            k - 1
        )));
    }
    if a.grid.is_some_and(|g| g != spec.size) {
        return Err(Error::InvalidInput(format!(
            "--grid disagrees with the datum's N = {}",
            spec.size
        )));
    }
    Ok(field)
}

fn minimize(a: &MinimizeArgs, cfg: &RunConfig) -> Result<Map<String, Value>> {
    float_only(cfg, "minimize")?;
    let f = a.function.resolve()?;
    let (n, k) = (f.n(), f.degree());
    if k == 0 {
        return Err(Error::InvalidInput(
            "the integrand must act on forms of degree ≥ 1".into(),
        ));
    }
    let omega0 = boundary_field(a, n, k)?;
    let r = minimize_dirichlet(
        &f,
        &omega0,
        &DirichletOptions {
            max_iter: a.max_iter,
            grad_tol: a.grad_tol,
        },
    )?;
    if let Some(path) = &a.save_d_omega {
        r.d_omega_snapshot.write(path)?;
    }
    let mut out = header("minimize", cfg);
    out.insert("function".into(), json!(f.label()));
    out.insert("grid".into(), serde_json::to_value(omega0.spec())?);
    out.insert("boundary".into(), json!(a.boundary));
    out.extend(as_map(serde_json::to_value(&r)?));
    out.insert("d_omega_max_abs".into(), json!(r.d_omega_snapshot.max_abs()));
    out.insert("d_omega_mean".into(), form_to_json(&r.d_omega_snapshot.mean()));
    if let Some(path) = &a.save_d_omega {
        out.insert("d_omega_saved_to".into(), json!(path.display().to_string()));
    }
    Ok(out)
}
