//! The Serre-type form on Λ²(ℝ⁶): ext. one convex after subtracting γ|ξ|²,
//! yet no 4-form certifies polyconvexity.

use extconvex::counterexamples::{build_serre_form, serre_jensen_witness, serre_violation};
use extconvex::quadratic::{gamma_infimum, GammaOptions};
use extconvex::quasiaffine::jensen_violation;
use extconvex::KForm;

fn main() {
    let g = build_serre_form::<f64>();
    let gamma = gamma_infimum(
        &g,
        &GammaOptions {
            restarts: 100,
            ..Default::default()
        },
    )
    .unwrap()
    .gamma;
    println!("gamma = {gamma:.10}");

    let mut rng = extconvex::rng::stream(7, 0);
    let worst = (0..1000)
        .map(|_| {
            serre_violation(&KForm::random(6, 4, &mut rng).unwrap(), gamma)
                .unwrap()
                .value
        })
        .fold(f64::NEG_INFINITY, f64::max);
    println!("largest f + 1/2<alpha; xi^xi> over 1000 random alpha: {worst:.4}");

    let f = g.shift(gamma);
    let mut witness = serre_jensen_witness().unwrap();
    let verdict = jensen_violation(|x| f.eval(x).unwrap(), &mut witness, 1e-12).unwrap();
    println!(
        "Jensen witness: violates = {}, gap = {:.4}",
        verdict.violates, verdict.gap
    );
}
