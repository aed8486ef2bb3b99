//! The two explicit counterexamples separating the convexity notions:
//! a quadratic form on `Λ²(ℝ⁶)` that is ext. one convex but not ext.
//! polyconvex, and, for every `k ≥ 2`, a quartic on `Λᵏ(ℝ^{k+3})` that is
//! ext. one convex but not ext. quasiconvex.

mod serre;
mod sverak;

pub use serre::{
    build_serre_form, serre_half_square_expansion, serre_jensen_witness, serre_violation, serre_xi_family, SerreCase,
    SerreViolation,
};
pub use sverak::{
    build_sverak, calibrate_gamma_pen, check_l_claim, one_convexity_margin, sverak_integral, sverak_warm_start,
    CalibrationOptions, CalibrationReport, LClaimReport, MarginReport, SverakConstruction, SverakEnergy,
};
