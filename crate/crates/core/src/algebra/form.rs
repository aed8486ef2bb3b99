use crate::error::{Error, Result};
use crate::multi_index::{basis, binomial, lex_rank, merge_sign, wedge_table, MultiIndex};
use crate::scalar::{exact_from_f64, parity_sign, Exact, Scalar};
use rand::Rng;
use rand_distr::StandardNormal;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

/// A degree-`k` alternating form on `ℝⁿ`, stored as coefficients over the
/// lexicographically ordered basis `{e^I}`.
#[derive(Debug, Clone, PartialEq)]
pub struct KForm<S = f64> {
    n: usize,
    k: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> KForm<S> {
    pub fn zero(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::DegreeOverflow { degree: k, n });
        }
        Ok(Self {
            n,
            k,
            coeffs: vec![S::zero(); binomial(n, k)],
        })
    }

    pub fn from_coeffs(n: usize, k: usize, coeffs: Vec<S>) -> Result<Self> {
        if k > n {
            return Err(Error::DegreeOverflow { degree: k, n });
        }
        let expected = binomial(n, k);
        if coeffs.len() != expected {
            return Err(Error::CoefficientLength {
                expected,
                found: coeffs.len(),
            });
        }
        Ok(Self { n, k, coeffs })
    }

    /// Degree-0 form with value `v`.
    pub fn scalar(n: usize, v: S) -> Self {
        Self {
            n,
            k: 0,
            coeffs: vec![v],
        }
    }

    /// The basis element `e^I` for an increasing multi-index.
    pub fn basis(n: usize, indices: &[usize]) -> Result<Self> {
        let idx = MultiIndex::new(n, indices.to_vec())?;
        let mut f = Self::zero(n, idx.degree())?;
        f.coeffs[idx.rank()] = S::one();
        Ok(f)
    }

    /// `e^{i_1} ∧ … ∧ e^{i_k}` for indices in any order (zero if repeated).
    pub fn monomial(n: usize, indices: &[usize]) -> Result<Self> {
        let mut f = Self::zero(n, indices.len())?;
        if let Some((idx, odd)) = MultiIndex::from_unsorted(n, indices)? {
            f.coeffs[idx.rank()] = parity_sign(odd);
        }
        Ok(f)
    }

    /// `e^1 ∧ … ∧ e^n`.
    pub fn volume(n: usize) -> Self {
        Self {
            n,
            k: n,
            coeffs: vec![S::one()],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [S] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    /// Coefficient on `e^I` for an increasing multi-index.
    pub fn coeff(&self, indices: &[usize]) -> Result<S> {
        let idx = MultiIndex::new(self.n, indices.to_vec())?;
        self.check_degree(idx.degree())?;
        Ok(self.coeffs[idx.rank()].clone())
    }

    pub fn set_coeff(&mut self, indices: &[usize], v: S) -> Result<()> {
        let idx = MultiIndex::new(self.n, indices.to_vec())?;
        self.check_degree(idx.degree())?;
        self.coeffs[idx.rank()] = v;
        Ok(())
    }

    /// Nonzero terms `(I, ξ_I)` in basis order.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, &S)> + '_ {
        let b = basis(self.n, self.k);
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(r, c)| (b[r].clone(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|c| c.clone() * s.clone())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> KForm<T> {
        KForm {
            n: self.n,
            k: self.k,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    fn check_degree(&self, k: usize) -> Result<()> {
        if k != self.k {
            return Err(Error::DegreeMismatch {
                expected: self.k,
                found: k,
            });
        }
        Ok(())
    }

    fn check_same_space(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        self.check_degree(other.k)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(self.zip(other, |a, b| a.clone() + b.clone()))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(self.zip(other, |a, b| a.clone() - b.clone()))
    }

    fn zip(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        Self {
            n: self.n,
            k: self.k,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// Euclidean scalar product in the orthonormal basis `{e^I}`.
    pub fn inner(&self, other: &Self) -> Result<S> {
        self.check_same_space(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
    }

    pub fn norm_squared(&self) -> S {
        self.coeffs.iter().fold(S::zero(), |acc, a| acc + a.clone() * a.clone())
    }

    /// Exterior product. Fails when the total degree exceeds `n`.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let degree = self.k + other.k;
        if degree > self.n {
            return Err(Error::DegreeOverflow { degree, n: self.n });
        }
        let table = wedge_table(self.n, self.k, other.k);
        let mut out = Self::zero(self.n, degree)?;
        for &(a, b, o, neg) in &table.entries {
            if self.coeffs[a].is_zero() || other.coeffs[b].is_zero() {
                continue;
            }
            let v = self.coeffs[a].clone() * other.coeffs[b].clone();
            let slot = &mut out.coeffs[o];
            *slot = if neg { slot.clone() - v } else { slot.clone() + v };
        }
        Ok(out)
    }

    /// Like [`KForm::wedge`], but returns `None` instead of an error when the
    /// total degree exceeds `n` (the product is then identically zero).
    pub fn wedge_or_zero(&self, other: &Self) -> Result<Option<Self>> {
        match self.wedge(other) {
            Err(Error::DegreeOverflow { .. }) => Ok(None),
            r => r.map(Some),
        }
    }

    /// `ξ^s = ξ ∧ … ∧ ξ` with `s` factors, `ξ^0 = 1`. No factorial scaling.
    pub fn wedge_power(&self, s: usize) -> Result<Self> {
        let degree = s * self.k;
        if degree > self.n {
            return Err(Error::DegreeOverflow { degree, n: self.n });
        }
        let mut acc = Self::scalar(self.n, S::one());
        for _ in 0..s {
            acc = acc.wedge(self)?;
        }
        Ok(acc)
    }

    /// Hodge star, characterized by `x ∧ ∗y = ⟨x; y⟩ e^{1…n}`.
    pub fn hodge_star(&self) -> Self {
        let n = self.n;
        let b = basis(n, self.k);
        let mut out = Self::zero(n, n - self.k).expect("complement degree is valid");
        for (r, idx) in b.iter().enumerate() {
            if self.coeffs[r].is_zero() {
                continue;
            }
            let comp: Vec<usize> = (1..=n).filter(|i| !idx.contains(i)).collect();
            let (_, odd) = merge_sign(idx, &comp).expect("disjoint by construction");
            let c = self.coeffs[r].clone();
            out.coeffs[lex_rank(n, &comp)] = if odd { -c } else { c };
        }
        out
    }

    /// Interior product `self ⌟ x` of a 1-form with a `k`-form: the adjoint of
    /// `y ↦ self ∧ y`, i.e. `⟨self ⌟ x; y⟩ = ⟨x; self ∧ y⟩`.
    pub fn interior_product(&self, x: &Self) -> Result<Self> {
        if self.k != 1 {
            return Err(Error::DegreeMismatch {
                expected: 1,
                found: self.k,
            });
        }
        if self.n != x.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.n,
            });
        }
        if x.k == 0 {
            return Err(Error::Precondition("interior product of a degree ≥ 1 form".into()));
        }
        let table = wedge_table(self.n, 1, x.k - 1);
        let mut out = Self::zero(self.n, x.k - 1)?;
        for &(i, j, o, neg) in &table.entries {
            if self.coeffs[i].is_zero() || x.coeffs[o].is_zero() {
                continue;
            }
            let v = self.coeffs[i].clone() * x.coeffs[o].clone();
            let slot = &mut out.coeffs[j];
            *slot = if neg { slot.clone() - v } else { slot.clone() + v };
        }
        Ok(out)
    }
}

impl KForm<f64> {
    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Coefficients drawn i.i.d. from the standard normal distribution.
    pub fn random<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Self> {
        let dim = binomial(n, k);
        let coeffs = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        Self::from_coeffs(n, k, coeffs)
    }

    /// Uniformly distributed unit form.
    pub fn random_unit<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Self> {
        loop {
            let f = Self::random(n, k, rng)?;
            let norm = f.norm();
            if norm > 1e-12 {
                return Ok(f.scale(&(1.0 / norm)));
            }
        }
    }

    pub fn to_exact(&self) -> KForm<Exact> {
        self.map(|c| exact_from_f64(*c))
    }
}

impl KForm<Exact> {
    pub fn to_f64(&self) -> KForm<f64> {
        self.map(Scalar::to_f64)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<S: Scalar> $tr<&KForm<S>> for &KForm<S> {
            type Output = KForm<S>;
            /// Panics when the operands live in different spaces.
            fn $method(self, rhs: &KForm<S>) -> KForm<S> {
                self.$checked(rhs)
                    .expect("forms of the same degree and dimension")
            }
        }
        impl<S: Scalar> $tr<KForm<S>> for KForm<S> {
            type Output = KForm<S>;
            fn $method(self, rhs: KForm<S>) -> KForm<S> {
                (&self).$method(&rhs)
            }
        }
        impl<S: Scalar> $tr<&KForm<S>> for KForm<S> {
            type Output = KForm<S>;
            fn $method(self, rhs: &KForm<S>) -> KForm<S> {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);

impl<S: Scalar> AddAssign<&KForm<S>> for KForm<S> {
    fn add_assign(&mut self, rhs: &KForm<S>) {
        *self = &*self + rhs;
    }
}

impl<S: Scalar> SubAssign<&KForm<S>> for KForm<S> {
    fn sub_assign(&mut self, rhs: &KForm<S>) {
        *self = &*self - rhs;
    }
}

impl<S: Scalar> Neg for KForm<S> {
    type Output = KForm<S>;
    fn neg(self) -> KForm<S> {
        self.map(|c| -c.clone())
    }
}

impl<S: Scalar> Neg for &KForm<S> {
    type Output = KForm<S>;
    fn neg(self) -> KForm<S> {
        self.map(|c| -c.clone())
    }
}

impl<S: Scalar> Mul<S> for &KForm<S> {
    type Output = KForm<S>;
    fn mul(self, rhs: S) -> KForm<S> {
        self.scale(&rhs)
    }
}

impl<S: Scalar> Mul<S> for KForm<S> {
    type Output = KForm<S>;
    fn mul(self, rhs: S) -> KForm<S> {
        self.scale(&rhs)
    }
}
