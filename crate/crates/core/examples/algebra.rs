//! Wedge, Hodge star, interior product and pullback, in exact arithmetic.

use extconvex::scalar::format_exact;
use extconvex::{Exact, KForm, LinearMap, Scalar};

fn e(n: usize, idx: &[usize]) -> KForm<Exact> {
    KForm::basis(n, idx).unwrap()
}

fn show(x: &KForm<Exact>) -> String {
    let terms: Vec<String> = x
        .terms()
        .filter(|(_, c)| !num_traits::Zero::is_zero(*c))
        .map(|(idx, c)| {
            format!(
                "{} e{}",
                format_exact(c),
                idx.iter().map(usize::to_string).collect::<String>()
            )
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn main() {
    let n = 4;
    let x = e(n, &[1, 2])
        .checked_add(&e(n, &[3, 4]).scale(&Exact::from_ratio(1, 2)))
        .unwrap();
    println!("x         = {}", show(&x));
    println!("x ^ x     = {}", show(&x.wedge(&x).unwrap()));
    println!("*x        = {}", show(&x.hodge_star()));
    println!("e1 _| x   = {}", show(&e(n, &[1]).interior_product(&x).unwrap()));

    // A shear: T*(e^1) = e^1 + 2 e^3, other covectors fixed.
    let mut rows: Vec<Vec<Exact>> = (0..n)
        .map(|i| (0..n).map(|j| Exact::from_i64((i == j) as i64)).collect())
        .collect();
    rows[0][2] = Exact::from_i64(2);
    let t = LinearMap::from_rows(&rows).unwrap();
    let pulled = t.pullback(2).unwrap().apply(&x).unwrap();
    println!("T*x       = {}", show(&pulled));
    let lhs = t.pullback(4).unwrap().apply(&x.wedge(&x).unwrap()).unwrap();
    assert_eq!(lhs, pulled.wedge(&pulled).unwrap());
    println!("T*(x ^ x) = T*x ^ T*x holds exactly");
}
