//! Command-line front end. Every subcommand prints one JSON report carrying
//! `"schema_version": 1`; reports are byte-identical for a fixed argv.

mod builtins;
mod commands;
mod suite;

pub use builtins::{Builtin, BuiltinParams, BUILTIN_NAMES};
pub use suite::{run_suite, SuiteCheck, SuiteReport};

use crate::error::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

pub const SCHEMA_VERSION: u32 = 1;

/// The only environment variable read: rayon thread-pool size.
pub const THREADS_ENV: &str = "EXTCONVEX_THREADS";

/// Tolerances that `--tol NAME=VALUE` may override, with their defaults.
pub const TOLERANCES: &[(&str, f64)] = &[("eig", 1e-8), ("one_convex", 1e-8), ("affine", 1e-9), ("jensen", 1e-12)];

#[derive(Parser, Debug)]
#[command(
    name = "extconvex",
    version,
    about = "Convexity analyzers for functions of differential forms"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance override NAME=VALUE (names: eig, one_convex, affine, jensen).
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
    /// Exact rational arithmetic where the subcommand supports it.
    #[arg(long, global = true)]
    pub exact: bool,
    /// Write the report to this file instead of stdout.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exterior algebra operations on forms read from JSON.
    Algebra(AlgebraArgs),
    /// Decide 1-divisibility (ξ = a ∧ b) and compute the form rank.
    Divisible {
        /// Form JSON: {"n", "k", "coeffs": {"1,2": 1.0}}.
        #[arg(long)]
        form: PathBuf,
    },
    /// Convexity, ext. one convexity and polyconvexity of a quadratic form.
    Classify(ClassifyArgs),
    /// Extract or verify ext. quasiaffine functions.
    #[command(subcommand)]
    Quasiaffine(QuasiaffineCommand),
    /// Reproduce the two counterexamples.
    #[command(subcommand)]
    Reproduce(ReproduceCommand),
    /// Grid upper bound for the ext. quasiconvex envelope at ξ.
    Envelope(EnvelopeArgs),
    /// Dirichlet minimization on a box grid.
    Minimize(MinimizeArgs),
    /// Run the reproduction checks; exit 2 if any property is violated.
    Suite {
        /// Full-size checks instead of the quick variants.
        #[arg(long)]
        full: bool,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgebraOp {
    /// x ∧ y
    Wedge,
    /// ∗x
    Star,
    /// x ⌟ y for a 1-form x
    Interior,
    /// ⟨x; y⟩
    Inner,
    /// x ∧ … ∧ x (s factors)
    Power,
    /// T*x
    Pullback,
    /// |x|²
    NormSquared,
}

#[derive(Args, Debug)]
pub struct AlgebraArgs {
    pub op: AlgebraOp,
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: Option<PathBuf>,
    /// Exponent for `power`.
    #[arg(long, default_value_t = 2)]
    pub s: usize,
    /// Linear map JSON {"n", "matrix"} for `pullback`.
    #[arg(long)]
    pub map: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// Matrix JSON: {"n", "k", "matrix": rows}.
    #[arg(long)]
    pub quadratic: PathBuf,
    /// Expected ambient dimension (checked against the file).
    #[arg(long)]
    pub n: Option<usize>,
    /// Expected degree (checked against the file).
    #[arg(long)]
    pub k: Option<usize>,
    /// Multistart count for the γ search.
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    /// Iteration cap of the certificate search.
    #[arg(long, default_value_t = 5000)]
    pub max_iter: usize,
}

/// Function selection shared by `quasiaffine`, `envelope` and `minimize`.
#[derive(Args, Debug, Clone)]
pub struct FnArgs {
    /// builtin:<norm2|norm4|pfaffian|wedge-square|serre|sverak> or rep:<path>.
    #[arg(long = "fn", value_name = "SPEC")]
    pub function: String,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// ε of builtin:sverak.
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    /// Penalty γ of builtin:sverak.
    #[arg(long)]
    pub gamma_pen: Option<f64>,
}

impl FnArgs {
    fn resolve(&self) -> Result<Builtin> {
        Builtin::resolve(
            &self.function,
            &BuiltinParams {
                n: self.n,
                k: self.k,
                eps: self.eps,
                gamma_pen: self.gamma_pen,
            },
        )
    }
}

#[derive(Subcommand, Debug)]
pub enum QuasiaffineCommand {
    /// Recover c_s with f(ξ) = Σ ⟨c_s; ξ^s⟩, or report that f is not ext. one affine.
    Extract {
        #[command(flatten)]
        function: FnArgs,
    },
    /// Sample t ↦ f(ξ + t a∧b) for affinity.
    Verify {
        #[command(flatten)]
        function: FnArgs,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum ReproduceCommand {
    /// Ext. one convex but not ext. polyconvex quadratic form on Λ²(ℝ⁶).
    Serre {
        #[arg(long, default_value_t = 200)]
        restarts: usize,
        /// Random α ∈ Λ⁴(ℝ⁶) fed to the violation construction.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Points per angle of the brute-force γ cross-check (0 skips it).
        #[arg(long, default_value_t = 6)]
        grid: usize,
    },
    /// Ext. one convex but not ext. quasiconvex quartic on Λᵏ(ℝ^{k+3}).
    Sverak {
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        /// Skip calibration and use this penalty.
        #[arg(long)]
        gamma_pen: Option<f64>,
        #[arg(long, default_value_t = 48)]
        restarts: usize,
        #[arg(long, default_value_t = 500)]
        l_trials: usize,
        /// Quadrature nodes per axis for the integral.
        #[arg(long, default_value_t = 256)]
        quad: usize,
        /// Torus size for an envelope run from the analytic warm start (omit to skip).
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum WarmStart {
    /// The analytic field whose dω lies in L (builtin:sverak only).
    Sverak,
}

#[derive(Args, Debug)]
pub struct EnvelopeArgs {
    #[command(flatten)]
    pub function: FnArgs,
    /// Point ξ as form JSON; zero when omitted.
    #[arg(long)]
    pub xi: Option<PathBuf>,
    /// Nodes per axis of the periodic grid.
    #[arg(long)]
    pub grid: usize,
    /// Random starts besides the zero field and the warm start.
    #[arg(long, default_value_t = 3)]
    pub restarts: usize,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 0.1)]
    pub amplitude: f64,
    #[arg(long, value_enum)]
    pub warm_start: Option<WarmStart>,
}

#[derive(Args, Debug)]
pub struct MinimizeArgs {
    #[command(flatten)]
    pub function: FnArgs,
    /// `zero`, `linear` (ω = x₁ e^{2…k}), or a GridField file (.bin or its .json sidecar).
    #[arg(long)]
    pub boundary: String,
    /// Nodes per axis (required for zero/linear; checked against a file).
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, default_value_t = 50000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub grad_tol: f64,
    /// Save the final dω as a GridField binary plus sidecar.
    #[arg(long)]
    pub save_d_omega: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Float,
    Exact,
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub mode: Mode,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_args(g: &GlobalArgs) -> Result<Self> {
        let mut tolerances = BTreeMap::new();
        for item in &g.tol {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("--tol expects NAME=VALUE, got {item:?}")))?;
            if !TOLERANCES.iter().any(|(t, _)| *t == name) {
                return Err(Error::InvalidInput(format!("unknown tolerance {name:?}")));
            }
            let value: f64 = value
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite() && *v >= 0.0)
                .ok_or_else(|| Error::InvalidInput(format!("tolerance {name} must be a nonnegative number")))?;
            tolerances.insert(name.to_string(), value);
        }
        Ok(Self {
            seed: g.seed,
            tolerances,
            mode: if g.exact { Mode::Exact } else { Mode::Float },
            output: g.output.clone(),
        })
    }

    /// The override for `name`, else its default.
    pub fn tol(&self, name: &str) -> f64 {
        self.tolerances.get(name).copied().unwrap_or_else(|| {
            TOLERANCES
                .iter()
                .find(|(t, _)| *t == name)
                .map(|(_, v)| *v)
                .expect("registered tolerance")
        })
    }
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// 0 success, 1 usage or I/O error, 2 property violated (`suite`).
    pub code: i32,
    pub report: Option<Value>,
    /// Help text, or the diagnostic for exit code 1.
    pub message: Option<String>,
    /// Set when the report went to `--output`.
    pub written_to: Option<PathBuf>,
}

impl Outcome {
    fn failure(message: String) -> Self {
        Self {
            code: 1,
            report: None,
            message: Some(message),
            written_to: None,
        }
    }
}

/// Parses `argv` (including the program name), runs the subcommand and
/// writes the report to `--output` when given.
pub fn run_command<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            return Outcome {
                code,
                report: None,
                message: Some(e.render().to_string()),
                written_to: None,
            };
        }
    };
    let config = match RunConfig::from_args(&cli.global) {
        Ok(c) => c,
        Err(e) => return Outcome::failure(format!("error: {e}")),
    };
    let (report, code) = match commands::dispatch(&cli.command, &config) {
        Ok(r) => r,
        Err(e) => return Outcome::failure(format!("error: {e}")),
    };
    let mut outcome = Outcome {
        code,
        report: Some(report),
        message: None,
        written_to: None,
    };
    if let Some(path) = &config.output {
        let text = render_report(outcome.report.as_ref().expect("report present"));
        if let Err(e) = std::fs::write(path, text) {
            return Outcome::failure(format!("error: {}: {e}", path.display()));
        }
        outcome.written_to = Some(path.clone());
    }
    outcome
}

/// Pretty JSON with a trailing newline.
pub fn render_report(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

/// Sizes the global rayon pool from `EXTCONVEX_THREADS` when set.
pub fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::InvalidInput(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::InvalidInput(format!("{THREADS_ENV}: {e}")))
}

/// Entry point of the `extconvex` binary; returns the process exit code.
pub fn main_entry() -> i32 {
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return 1;
    }
    let outcome = run_command(std::env::args_os());
    if let Some(msg) = &outcome.message {
        if outcome.code == 0 {
            print!("{msg}");
        } else {
            eprint!("{msg}");
            if !msg.ends_with('\n') {
                eprintln!();
            }
        }
    }
    if let (Some(report), None) = (&outcome.report, &outcome.written_to) {
        print!("{}", render_report(report));
    }
    outcome.code
}
