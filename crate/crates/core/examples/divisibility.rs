//! Deciding whether a k-form factors as a ∧ b with b a 1-form.

use extconvex::divisibility::{form_rank, one_divisible};
use extconvex::KForm;

fn main() {
    let decomposable = KForm::from_coeffs(4, 1, vec![1.0, 2.0, 0.0, -1.0])
        .unwrap()
        .wedge(&KForm::from_coeffs(4, 1, vec![0.0, 1.0, 3.0, 1.0]).unwrap())
        .unwrap();
    let symplectic = KForm::basis(4, &[1, 2])
        .unwrap()
        .checked_add(&KForm::basis(4, &[3, 4]).unwrap())
        .unwrap();
    let triple = KForm::basis(6, &[1, 2, 3])
        .unwrap()
        .checked_add(&KForm::basis(6, &[4, 5, 6]).unwrap())
        .unwrap();

    for (name, x) in [
        ("a ^ b", &decomposable),
        ("e12 + e34", &symplectic),
        ("e123 + e456", &triple),
    ] {
        let d = one_divisible(x).unwrap();
        println!(
            "{name:<12} divisible: {:<5} kernel dim: {}  rank: {}",
            d.divisible,
            d.kernel_dim,
            form_rank(x).unwrap()
        );
        if let (Some(a), Some(b)) = (d.factor_a, d.factor_b) {
            let residual = a.wedge(&b).unwrap().checked_sub(x).unwrap().max_abs();
            println!("{:<12} factorization residual {residual:.1e}", "");
        }
    }
}
