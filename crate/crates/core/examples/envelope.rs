//! Grid estimate of the ext. quasiconvex envelope at ξ = 0 for the Sverák
//! integrand, started from the analytic oscillation.

use extconvex::counterexamples::{build_sverak, sverak_warm_start, SverakEnergy};
use extconvex::fields::{envelope_estimate, EnvelopeOptions, GridSpec, LbfgsOptions};
use extconvex::KForm;

fn main() {
    let c = build_sverak::<f64>(2).unwrap();
    let spec = GridSpec::torus(c.n, 6).unwrap();
    let warm = sverak_warm_start(&c, spec).unwrap();
    let f = SverakEnergy::new(c.clone(), 1e-3, 128.0).unwrap();
    let opts = EnvelopeOptions {
        restarts: 1,
        descent: LbfgsOptions {
            max_iter: 50,
            ..EnvelopeOptions::default().descent
        },
        ..Default::default()
    };
    let r = envelope_estimate(&f, &KForm::zero(c.n, 2).unwrap(), spec, Some(&warm), &opts).unwrap();
    println!("f(0) = {}", r.f_xi);
    for (label, v) in r.run_labels.iter().zip(&r.run_values) {
        println!("{label:<12} {v:.6e}");
    }
    println!("estimate ({}) = {:.6e}", r.kind, r.estimate);
}
