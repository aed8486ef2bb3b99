//! The Sverák-type integrand: ext. one convex (after calibrating the penalty)
//! but with a negative mean along a periodic gradient field.

use extconvex::counterexamples::{
    build_sverak, calibrate_gamma_pen, check_l_claim, sverak_integral, CalibrationOptions,
};

fn main() {
    let eps = 1e-3;
    for k in [2, 3] {
        let c = build_sverak::<f64>(k).unwrap();
        let l = check_l_claim(&c, 200, 0).unwrap();
        let cal = calibrate_gamma_pen(&c, eps, &CalibrationOptions::default()).unwrap();
        let integral = sverak_integral(&c, eps, cal.gamma_pen, 256).unwrap();
        println!(
            "k={k} n={}: L free of divisible mixtures: {}, gamma_pen = {}, mean f(d omega) = {integral:.5}",
            c.n, l.holds, cal.gamma_pen
        );
    }
}
