//! Recovering the polyaffine representation of an ext. one affine function
//! from evaluations, and catching a function that is not one.

use extconvex::quasiaffine::{extract_representation, verify_ext_one_affine, PolyaffineRep};
use extconvex::scalar::format_exact;
use extconvex::{Exact, KForm, Scalar};

fn main() {
    // f(ξ) = 3 + ξ₁₂ − ½ ⟨e^{1234}; ξ∧ξ⟩, evaluated exactly.
    let f = |x: &KForm<Exact>| {
        let sq = x.wedge(x).unwrap().coeffs()[0].clone();
        Exact::from_i64(3) + x.coeff(&[1, 2]).unwrap() - sq * Exact::from_ratio(1, 2)
    };
    let rep: PolyaffineRep<Exact> = extract_representation(f, 4, 2).unwrap();
    for (s, c) in rep.coefficients().iter().enumerate() {
        println!("c_{s} = {:?}", c.coeffs().iter().map(format_exact).collect::<Vec<_>>());
    }

    let float_rep = PolyaffineRep::random(6, 2, &mut extconvex::rng::stream(1, 0)).unwrap();
    let check = verify_ext_one_affine(float_rep.as_fn(), 6, 2, 200, 1, 1e-9).unwrap();
    println!("random rep: max one-affine residual {:.1e}", check.max_residual);

    let quartic = |x: &KForm| x.norm_squared().powi(2);
    println!(
        "|xi|^4 extraction: {}",
        extract_representation::<f64, _>(quartic, 4, 2).unwrap_err()
    );
}
