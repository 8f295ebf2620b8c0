//! The base *-algebra `V`: Laurent polynomials in one hermitian invertible
//! generator `x` over `Q(i)`, together with the scaling *-automorphism
//! `γ(x^d) = t^d x^d`.

use crate::scalar::Scalar;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

/// Element `Σ c_d x^d` of `V`, canonical form (no zero coefficients).
#[derive(Clone, PartialEq, Eq, Default)]
pub struct BaseElem {
    coeffs: BTreeMap<i64, Scalar>,
}

#[derive(Debug, Error)]
pub enum BaseError {
    #[error("automorphism parameter t must avoid {{0, 1, -1}}, got {0}")]
    InvalidParameter(String),
}

impl BaseElem {
    pub fn zero() -> Self {
        BaseElem::default()
    }

    pub fn one() -> Self {
        BaseElem::monomial(0, Scalar::one())
    }

    /// The generator power `x^d`.
    pub fn x_pow(d: i64) -> Self {
        BaseElem::monomial(d, Scalar::one())
    }

    pub fn monomial(d: i64, c: Scalar) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(d, c);
        }
        BaseElem { coeffs }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Scalar)>) -> Self {
        let mut out = BaseElem::zero();
        for (d, c) in terms {
            out.add_term(d, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, d: i64) -> Scalar {
        self.coeffs.get(&d).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &Scalar)> {
        self.coeffs.iter()
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.coeffs.keys().copied()
    }

    /// True when the element is a single monomial.
    pub fn as_monomial(&self) -> Option<(i64, &Scalar)> {
        if self.coeffs.len() == 1 {
            self.coeffs.iter().next().map(|(d, c)| (*d, c))
        } else {
            None
        }
    }

    fn add_term(&mut self, d: i64, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(d).or_insert_with(Scalar::zero);
        *entry += &c;
        if entry.is_zero() {
            self.coeffs.remove(&d);
        }
    }

    pub fn scalar_mul(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return BaseElem::zero();
        }
        BaseElem {
            coeffs: self
                .coeffs
                .iter()
                .map(|(d, v)| (*d, v * c))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    /// Coefficient-wise conjugation; `x* = x`, so the star fixes degrees.
    pub fn star(&self) -> Self {
        BaseElem {
            coeffs: self.coeffs.iter().map(|(d, c)| (*d, c.conj())).collect(),
        }
    }

    /// Multiplicative inverse, defined for monomials `c x^d` only.
    pub fn inverse(&self) -> Option<Self> {
        let (d, c) = self.as_monomial()?;
        Some(BaseElem::monomial(-d, c.inv()?))
    }
}

impl fmt::Display for BaseElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match d {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{d}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BaseElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Add for &BaseElem {
    type Output = BaseElem;
    fn add(self, rhs: &BaseElem) -> BaseElem {
        let mut out = self.clone();
        for (d, c) in &rhs.coeffs {
            out.add_term(*d, c.clone());
        }
        out
    }
}

impl Sub for &BaseElem {
    type Output = BaseElem;
    fn sub(self, rhs: &BaseElem) -> BaseElem {
        self + &(-rhs)
    }
}

impl Neg for &BaseElem {
    type Output = BaseElem;
    fn neg(self) -> BaseElem {
        BaseElem {
            coeffs: self.coeffs.iter().map(|(d, c)| (*d, -c)).collect(),
        }
    }
}

impl Mul for &BaseElem {
    type Output = BaseElem;
    fn mul(self, rhs: &BaseElem) -> BaseElem {
        let mut out = BaseElem::zero();
        for (d1, c1) in &self.coeffs {
            for (d2, c2) in &rhs.coeffs {
                out.add_term(d1 + d2, c1 * c2);
            }
        }
        out
    }
}

/// The *-automorphism `γ` of `V`, determined by `γ(x) = t·x`.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseAutomorphism {
    t: BigRational,
}

impl BaseAutomorphism {
    pub fn new(t: BigRational) -> Result<Self, BaseError> {
        if t.is_zero() || t.is_one() || (-&t).is_one() {
            return Err(BaseError::InvalidParameter(t.to_string()));
        }
        Ok(BaseAutomorphism { t })
    }

    pub fn t(&self) -> &BigRational {
        &self.t
    }

    /// Applies `γ^m`: the coefficient of `x^d` picks up `t^{m·d}`.
    pub fn pow_apply(&self, a: &BaseElem, m: i64) -> BaseElem {
        if m == 0 {
            return a.clone();
        }
        BaseElem {
            coeffs: a
                .coeffs
                .iter()
                .map(|(d, c)| {
                    let factor = Scalar::from_rational(Scalar::rational_pow(&self.t, m * d));
                    (*d, c * &factor)
                })
                .collect(),
        }
    }

    pub fn apply(&self, a: &BaseElem) -> BaseElem {
        self.pow_apply(a, 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn gamma2() -> BaseAutomorphism {
        BaseAutomorphism::new(q(2, 1)).unwrap()
    }

    #[test]
    fn inverse_pair_multiplies_to_one() {
        let a = BaseElem::x_pow(1);
        let b = BaseElem::x_pow(-1);
        assert_eq!(&a * &b, BaseElem::one());
    }

    #[test]
    fn distributes_over_sum() {
        // (x + x^2)·x = x^2 + x^3
        let a = &BaseElem::x_pow(1) + &BaseElem::x_pow(2);
        let expected = &BaseElem::x_pow(2) + &BaseElem::x_pow(3);
        assert_eq!(&a * &BaseElem::x_pow(1), expected);
    }

    #[test]
    fn gaussian_coefficients_multiply() {
        // ((1+i)x)·((1-i)x) = 2x^2, by direct Gaussian-rational arithmetic
        let a = BaseElem::monomial(1, Scalar::new(q(1, 1), q(1, 1)));
        let b = BaseElem::monomial(1, Scalar::new(q(1, 1), q(-1, 1)));
        assert_eq!(&a * &b, BaseElem::monomial(2, Scalar::from_int(2)));
    }

    #[test]
    fn star_conjugates_and_fixes_degrees() {
        let a = BaseElem::monomial(1, Scalar::i());
        assert_eq!(a.star(), BaseElem::monomial(1, -Scalar::i()));
        assert_eq!(BaseElem::x_pow(2).star(), BaseElem::x_pow(2));
        let b = BaseElem::monomial(-1, Scalar::new(q(2, 1), q(3, 1)));
        assert_eq!(b.star(), BaseElem::monomial(-1, Scalar::new(q(2, 1), q(-3, 1))));
    }

    #[test]
    fn gamma_scales_by_degree() {
        let g = gamma2();
        assert_eq!(g.apply(&BaseElem::x_pow(1)), BaseElem::monomial(1, Scalar::from_int(2)));
        // γ^{-2}(x^3) = 2^{-6} x^3 = (1/64) x^3
        assert_eq!(
            g.pow_apply(&BaseElem::x_pow(3), -2),
            BaseElem::monomial(3, Scalar::from_ratio(1, 64))
        );
        assert_eq!(g.pow_apply(&BaseElem::one(), 5), BaseElem::one());
    }

    #[test]
    fn rejects_degenerate_t() {
        for bad in [q(0, 1), q(1, 1), q(-1, 1)] {
            assert!(BaseAutomorphism::new(bad).is_err());
        }
    }

    fn arb_scalar() -> impl Strategy<Value = Scalar> {
        (-6i64..=6, 1i64..=4, -6i64..=6, 1i64..=4)
            .prop_map(|(a, b, c, d)| Scalar::new(q(a, b), q(c, d)))
    }

    prop_compose! {
        fn arb_elem()(terms in prop::collection::vec((-4i64..=4, arb_scalar()), 0..5)) -> BaseElem {
            BaseElem::from_terms(terms)
        }
    }

    proptest! {
        #[test]
        fn mul_assoc_comm(a in arb_elem(), b in arb_elem(), c in arb_elem()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &BaseElem::one(), a.clone());
        }

        #[test]
        fn star_is_involutive_and_multiplicative(a in arb_elem(), b in arb_elem()) {
            prop_assert_eq!(a.star().star(), a.clone());
            prop_assert_eq!((&a * &b).star(), &a.star() * &b.star());
        }

        #[test]
        fn gamma_is_automorphism(a in arb_elem(), b in arb_elem(), m in -3i64..=3, n in -3i64..=3) {
            let g = gamma2();
            prop_assert_eq!(g.pow_apply(&g.pow_apply(&a, m), n), g.pow_apply(&a, m + n));
            prop_assert_eq!(g.pow_apply(&(&a * &b), m), &g.pow_apply(&a, m) * &g.pow_apply(&b, m));
            prop_assert_eq!(g.pow_apply(&a.star(), m), g.pow_apply(&a, m).star());
        }
    }
}
