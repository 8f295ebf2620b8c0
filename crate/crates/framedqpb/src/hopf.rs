//! The commutative Hopf *-algebra `A` of SO(2), generated by a unitary `U`,
//! its standard 2-dimensional representation and the induced wedge
//! representation on `Λ C²`.

use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

/// Element `Σ a_m U^m` of `A`, canonical form.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct GroupElem {
    coeffs: BTreeMap<i64, Scalar>,
}

/// Element of `A ⊗ A` as a finite sum `Σ c_{jk} U^j ⊗ U^k`.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct TensorAA {
    pub coeffs: BTreeMap<(i64, i64), Scalar>,
}

#[derive(Debug, Error)]
pub enum HopfError {
    #[error("representation index out of range: ({0}, {1})")]
    IndexOutOfRange(usize, usize),
    #[error("wedge multi-indices must have equal size, got {0} and {1}")]
    SizeMismatch(usize, usize),
}

impl GroupElem {
    pub fn zero() -> Self {
        GroupElem::default()
    }

    pub fn one() -> Self {
        GroupElem::u_pow(0)
    }

    /// The group-like generator power `U^m`.
    pub fn u_pow(m: i64) -> Self {
        GroupElem::monomial(m, Scalar::one())
    }

    pub fn monomial(m: i64, c: Scalar) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(m, c);
        }
        GroupElem { coeffs }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Scalar)>) -> Self {
        let mut out = GroupElem::zero();
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    fn add_term(&mut self, m: i64, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(m).or_insert_with(Scalar::zero);
        *entry += &c;
        if entry.is_zero() {
            self.coeffs.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, m: i64) -> Scalar {
        self.coeffs.get(&m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &Scalar)> {
        self.coeffs.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn scalar_mul(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return GroupElem::zero();
        }
        GroupElem {
            coeffs: self.coeffs.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    /// `(U^m)* = U^{-m}` with conjugated coefficients.
    pub fn star(&self) -> Self {
        GroupElem {
            coeffs: self.coeffs.iter().map(|(m, c)| (-m, c.conj())).collect(),
        }
    }

    /// Counit `ε(U^m) = 1`, extended linearly.
    pub fn counit(&self) -> Scalar {
        let mut s = Scalar::zero();
        for c in self.coeffs.values() {
            s += c;
        }
        s
    }

    /// Antipode `κ(U^m) = U^{-m}`, extended linearly.
    pub fn antipode(&self) -> Self {
        GroupElem {
            coeffs: self.coeffs.iter().map(|(m, c)| (-m, c.clone())).collect(),
        }
    }

    /// Coproduct `φ(U^m) = U^m ⊗ U^m`, extended linearly.
    pub fn coproduct(&self) -> TensorAA {
        TensorAA {
            coeffs: self.coeffs.iter().map(|(m, c)| ((*m, *m), c.clone())).collect(),
        }
    }

    /// Dualized adjoint action `ad(a) = a^{(2)} ⊗ κ(a^{(1)}) a^{(3)}`; for the
    /// abelian group it collapses to `a ⊗ 1` on group-likes.
    pub fn adjoint(&self) -> TensorAA {
        TensorAA {
            coeffs: self.coeffs.iter().map(|(m, c)| ((*m, 0), c.clone())).collect(),
        }
    }

    /// `cos = (U + U^{-1})/2`.
    pub fn cos() -> Self {
        GroupElem::from_terms([(1, Scalar::from_ratio(1, 2)), (-1, Scalar::from_ratio(1, 2))])
    }

    /// `sin = (U - U^{-1})/2i`.
    pub fn sin() -> Self {
        let half_over_i = &Scalar::from_ratio(1, 2) / &Scalar::i();
        GroupElem::from_terms([(1, half_over_i.clone()), (-1, -&half_over_i)])
    }
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match m {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})U")?,
                _ => write!(f, "({c})U^{m}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Add for &GroupElem {
    type Output = GroupElem;
    fn add(self, rhs: &GroupElem) -> GroupElem {
        let mut out = self.clone();
        for (m, c) in &rhs.coeffs {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &GroupElem {
    type Output = GroupElem;
    fn sub(self, rhs: &GroupElem) -> GroupElem {
        self + &(-rhs)
    }
}

impl Neg for &GroupElem {
    type Output = GroupElem;
    fn neg(self) -> GroupElem {
        GroupElem {
            coeffs: self.coeffs.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Mul for &GroupElem {
    type Output = GroupElem;
    fn mul(self, rhs: &GroupElem) -> GroupElem {
        let mut out = GroupElem::zero();
        for (m1, c1) in &self.coeffs {
            for (m2, c2) in &rhs.coeffs {
                out.add_term(m1 + m2, c1 * c2);
            }
        }
        out
    }
}

impl TensorAA {
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((i64, i64), Scalar)>) -> Self {
        let mut coeffs: BTreeMap<(i64, i64), Scalar> = BTreeMap::new();
        for (k, c) in terms {
            let e = coeffs.entry(k).or_insert_with(Scalar::zero);
            *e += &c;
            if e.is_zero() {
                coeffs.remove(&k);
            }
        }
        TensorAA { coeffs }
    }

    /// Applies the multiplication map `m: A ⊗ A → A`.
    pub fn multiply_legs(&self) -> GroupElem {
        GroupElem::from_terms(self.coeffs.iter().map(|((j, k), c)| (j + k, c.clone())))
    }
}

/// Coproduct, counit and antipode of an element, in one call.
pub fn hopf_maps(a: &GroupElem) -> (TensorAA, Scalar, GroupElem) {
    (a.coproduct(), a.counit(), a.antipode())
}

/// Matrix entry `u_ij` of the standard representation
/// `u = [[cos, -sin], [sin, cos]]`, indices in `{1, 2}`.
pub fn rep_entry(i: usize, j: usize) -> Result<GroupElem, HopfError> {
    match (i, j) {
        (1, 1) | (2, 2) => Ok(GroupElem::cos()),
        (2, 1) => Ok(GroupElem::sin()),
        (1, 2) => Ok(-&GroupElem::sin()),
        _ => Err(HopfError::IndexOutOfRange(i, j)),
    }
}

/// Matrix coefficient of the induced representation `u^∧` on `Λ C²`:
/// the coefficient of `e_I` in `u^∧(e_J)`, i.e. `F^∧(θ_J) = Σ_I θ_I ⊗ (u^∧)_{IJ}`.
pub fn wedge_coaction_matrix(row: &[usize], col: &[usize]) -> Result<GroupElem, HopfError> {
    if row.len() != col.len() {
        return Err(HopfError::SizeMismatch(row.len(), col.len()));
    }
    match (row, col) {
        ([], []) => Ok(GroupElem::one()),
        ([i], [j]) => rep_entry(*i, *j),
        ([1, 2], [1, 2]) => {
            // determinant: u11 u22 - u21 u12
            let d = &(&rep_entry(1, 1)? * &rep_entry(2, 2)?) - &(&rep_entry(2, 1)? * &rep_entry(1, 2)?);
            Ok(d)
        }
        _ => Err(HopfError::IndexOutOfRange(row.first().copied().unwrap_or(0), col.first().copied().unwrap_or(0))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coproduct_of_group_like() {
        let (cop, eps, _) = hopf_maps(&GroupElem::u_pow(2));
        assert_eq!(cop, TensorAA::from_terms([((2, 2), Scalar::one())]));
        assert_eq!(eps, Scalar::one());
    }

    #[test]
    fn counit_kills_differences() {
        let a = GroupElem::from_terms([(1, Scalar::from_int(3)), (0, Scalar::from_int(-3))]);
        assert_eq!(a.counit(), Scalar::zero());
    }

    #[test]
    fn antipode_law_on_group_likes() {
        // m(κ ⊗ id)φ(a) = ε(a)·1 for a = U^m
        for m in -3..=3 {
            let a = GroupElem::u_pow(m);
            let cop = a.coproduct();
            let folded = TensorAA {
                coeffs: cop.coeffs.iter().map(|((j, k), c)| ((-j, *k), c.clone())).collect(),
            };
            assert_eq!(folded.multiply_legs(), GroupElem::one());
        }
    }

    #[test]
    fn coassociativity_on_window() {
        // (φ ⊗ id)φ = (id ⊗ φ)φ reduces to the diagonal on group-likes
        for m in -6..=6i64 {
            let cop = GroupElem::u_pow(m).coproduct();
            for ((j, k), _) in &cop.coeffs {
                assert_eq!((j, k), (&m, &m));
            }
            let a = GroupElem::u_pow(m);
            assert_eq!(a.coproduct().multiply_legs(), &a * &a);
        }
    }

    #[test]
    fn rep_matrix_is_real_orthogonal_det_one() {
        for i in 1..=2 {
            for j in 1..=2 {
                let u = rep_entry(i, j).unwrap();
                assert_eq!(u.star(), u, "u_{i}{j} hermitian");
            }
        }
        // Σ_k u_ki u_kj = δ_ij
        for i in 1..=2usize {
            for j in 1..=2usize {
                let mut s = GroupElem::zero();
                for k in 1..=2usize {
                    s = &s + &(&rep_entry(k, i).unwrap() * &rep_entry(k, j).unwrap());
                }
                let expected = if i == j { GroupElem::one() } else { GroupElem::zero() };
                assert_eq!(s, expected);
            }
        }
        assert_eq!(wedge_coaction_matrix(&[1, 2], &[1, 2]).unwrap(), GroupElem::one());
    }

    #[test]
    fn wedge_matrix_cases() {
        assert_eq!(wedge_coaction_matrix(&[], &[]).unwrap(), GroupElem::one());
        assert_eq!(wedge_coaction_matrix(&[1], &[1]).unwrap(), GroupElem::cos());
        assert!(wedge_coaction_matrix(&[1], &[1, 2]).is_err());
        assert!(rep_entry(0, 1).is_err());
    }

    #[test]
    fn cos_sin_relation() {
        // u_11^2 + u_21^2 = 1, expanded in the U-basis
        let c = GroupElem::cos();
        let s = GroupElem::sin();
        assert_eq!(&(&c * &c) + &(&s * &s), GroupElem::one());
    }

    #[test]
    fn adjoint_is_trivial_for_abelian_group() {
        for m in -4..=4 {
            let ad = GroupElem::u_pow(m).adjoint();
            assert_eq!(ad, TensorAA::from_terms([((m, 0), Scalar::one())]));
        }
    }
}
