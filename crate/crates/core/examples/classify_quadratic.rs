//! Classifying a quadratic form on 2-forms in four dimensions: convexity,
//! ext. one convexity and a polyconvexity certificate.

use extconvex::quadratic::{
    is_ext_one_convex, marcellini_lambda, polyconvexity_certificate, CertificateOptions, GammaOptions, QuadraticForm,
};

fn main() {
    // |ξ|² + 1.5 ⟨e^{1234}; ξ∧ξ⟩: indefinite, yet polyconvex.
    let q = QuadraticForm::identity(4, 2)
        .add_scaled(&1.5, &QuadraticForm::pfaffian())
        .unwrap();
    println!("lambda_min(M)      = {:.4}", q.min_eigenvalue());

    let one = is_ext_one_convex(&q, &GammaOptions::default(), 1e-8).unwrap();
    println!(
        "ext. one convex    = {} (gamma = {:.6})",
        one.ext_one_convex, one.gamma.gamma
    );

    let cert = polyconvexity_certificate(&q, &CertificateOptions::default()).unwrap();
    println!(
        "certificate        = {:?}, lambda_min(M - S(beta)) = {:.2e}",
        cert.status, cert.achieved_min_eig
    );

    if let Some(lam) = marcellini_lambda(&q).unwrap() {
        println!("Pfaffian multiplier = {lam:.6}");
    }
}
