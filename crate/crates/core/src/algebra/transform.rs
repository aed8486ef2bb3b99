use super::KForm;

/// The Hodge transform `f_*(ξ) = f(∗ξ)` of a function on `Λᵏ`, as a function
/// on `Λ^{n−k}`. Interior convexity notions of `f` are exterior notions of `f_*`.
pub fn hodge_transform<F>(f: F) -> impl Fn(&KForm) -> f64
where
    F: Fn(&KForm) -> f64,
{
    move |xi: &KForm| f(&xi.hodge_star())
}
