//! Coefficient fields: `f64` for numerics and `BigRational` for exact checks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;
use std::ops::Neg;

/// Exact rational coefficients.
pub type Exact = BigRational;

/// A field the exterior algebra can be built over.
pub trait Scalar: Num + Clone + Neg<Output = Self> + Debug + PartialEq + Send + Sync + 'static {
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;

    /// Magnitude used only for pivot selection.
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn to_f64(&self) -> f64 {
        // Ratio::to_f64 handles huge numerators/denominators without overflow.
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn magnitude(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            Scalar::to_f64(&self.abs()).max(f64::MIN_POSITIVE)
        }
    }
}

/// Sign `(-1)^p` as a scalar.
pub fn parity_sign<S: Scalar>(odd: bool) -> S {
    if odd {
        -S::one()
    } else {
        S::one()
    }
}

/// Convert an `f64` to an exact rational (exact binary expansion).
pub fn exact_from_f64(v: f64) -> Exact {
    BigRational::from_float(v).unwrap_or_else(BigRational::zero)
}

/// Parse `"p/q"`, `"p"` or a decimal literal into an exact rational.
pub fn parse_exact(s: &str) -> Option<Exact> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Ok(p) = s.parse::<BigInt>() {
        return Some(BigRational::from_integer(p));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let num: BigInt = digits.parse().ok()?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = BigRational::new(num, den);
        return Some(if neg { -r } else { r });
    }
    None
}

/// Render an exact rational as `"p/q"` (or `"p"` when integral).
pub fn format_exact(v: &Exact) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3/4", "-7", "0", "-1/3"] {
            assert_eq!(format_exact(&parse_exact(s).unwrap()), s);
        }
        assert_eq!(format_exact(&parse_exact("0.25").unwrap()), "1/4");
        assert_eq!(format_exact(&parse_exact("-1.5").unwrap()), "-3/2");
        assert!(parse_exact("1/0").is_none());
        assert!(parse_exact("abc").is_none());
    }

    #[test]
    fn exact_from_float_is_exact() {
        assert_eq!(format_exact(&exact_from_f64(0.375)), "3/8");
    }
}
