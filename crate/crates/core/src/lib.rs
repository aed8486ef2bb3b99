//! Exterior algebra machinery and convexity analyzers for functions of
//! differential forms `f: Λᵏ(ℝⁿ) → ℝ`.
//!
//! * [`algebra`]: forms, wedge/interior products, Hodge star, pullbacks.
//! * [`divisibility`]: 1-divisibility and form rank.
//! * [`quadratic`]: convexity, ext. one convexity and polyconvexity
//!   certificates for quadratic forms on `Λᵏ`.
//! * [`quasiaffine`]: polyaffine representations, extraction, Jensen witnesses.
//! * [`counterexamples`]: the Serre-type quadratic form and the Šverák-type
//!   quartic separating ext. one convexity from ext. quasiconvexity.
//! * [`fields`]: discrete exterior calculus on grids, envelope estimates and
//!   Dirichlet minimization.

pub mod algebra;
pub mod cli;
pub mod counterexamples;
pub mod divisibility;
pub mod error;
pub mod fields;
pub mod io;
pub mod linalg;
pub mod multi_index;
pub mod quadratic;
pub mod quasiaffine;
pub mod rng;
pub mod scalar;

pub use algebra::{hodge_transform, FormOperator, KForm, LinearMap};
pub use error::{Error, Result};
pub use scalar::{Exact, Scalar};
