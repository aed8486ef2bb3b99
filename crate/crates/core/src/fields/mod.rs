//! Discrete exterior calculus on regular grids over `[0,1]ⁿ`: periodic tori
//! and Dirichlet boxes, grid energies `∫ f(ξ + dω)`, and first-order
//! minimization of those energies.

mod dirichlet;
mod energy;
mod envelope;
mod grid;
mod ops;
mod optimize;

pub use dirichlet::{minimize_dirichlet, DirichletOptions, MinimizationReport};
pub use energy::{grid_energy, FnIntegrand, Integrand};
pub use envelope::{envelope_estimate, EnvelopeOptions, EnvelopeReport};
pub use grid::{Domain, GridField, GridSpec};
pub use ops::{d_transpose, discrete_d, discrete_delta};
pub use optimize::{lbfgs, LbfgsOptions, LbfgsOutcome};
