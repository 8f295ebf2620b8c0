//! The total calculus in vertical-horizontal form: `vh_P = hor_P ⊗ Ψ_inv^∧`
//! for the 1-dimensional induced calculus (`Ψ_inv = C·ζ`, `ζ² = 0`,
//! `dζ = 0`, `ζ* = −ζ`), with the twisted product, the star and the
//! differential `∂_D` of a preconnection.

use crate::bundle::{BundleElem, Crossed, ModelConfig};
use crate::connections::{ConnectionError, Preconnection};
use crate::hopf::GroupElem;
use crate::horizontal::{hor_mul, hor_star, weight_pieces, HorForm};
use crate::scalar::Scalar;
use num_rational::BigRational;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VhError {
    #[error("the vertical factor supports quotient dimension 0 or 1, got {0}")]
    UnsupportedDimension(usize),
    #[error("nonzero vertical part needs a 1-dimensional quotient")]
    NoVerticalDirection,
    #[error(transparent)]
    Connection(#[from] ConnectionError),
}

/// Element `h₀ + h₁·ζ` of `vh_P`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct VHForm {
    pub h0: HorForm,
    pub h1: HorForm,
}

impl VHForm {
    pub fn zero() -> Self {
        VHForm::default()
    }

    pub fn horizontal(h: HorForm) -> Self {
        VHForm {
            h0: h,
            h1: HorForm::zero(),
        }
    }

    pub fn vertical(h: HorForm) -> Self {
        VHForm {
            h0: HorForm::zero(),
            h1: h,
        }
    }

    /// The generator `1 ⊗ ζ`.
    pub fn zeta() -> Self {
        VHForm::vertical(HorForm::one())
    }

    pub fn is_zero(&self) -> bool {
        self.h0.is_zero() && self.h1.is_zero()
    }

    pub fn add(&self, rhs: &VHForm) -> VHForm {
        VHForm {
            h0: self.h0.add(&rhs.h0),
            h1: self.h1.add(&rhs.h1),
        }
    }

    pub fn sub(&self, rhs: &VHForm) -> VHForm {
        VHForm {
            h0: self.h0.sub(&rhs.h0),
            h1: self.h1.sub(&rhs.h1),
        }
    }

    pub fn scalar_mul(&self, c: &Scalar) -> VHForm {
        VHForm {
            h0: self.h0.scalar_mul(c),
            h1: self.h1.scalar_mul(c),
        }
    }
}

impl fmt::Display for VHForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if !self.h0.is_zero() {
            write!(f, "{}", self.h0)?;
            if !self.h1.is_zero() {
                write!(f, " + ")?;
            }
        }
        if !self.h1.is_zero() {
            write!(f, "({})ζ", self.h1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for VHForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The `vh_P` algebra context. The `∘`-twist across the vertical generator
/// is `ζ∘U^w = t′^{−w}ζ`.
#[derive(Clone, Debug)]
pub struct VhCalculus {
    crossed: Crossed,
    tprime: Option<BigRational>,
    pub psi_dim: usize,
}

impl VhCalculus {
    pub fn new(model: &ModelConfig, psi_dim: usize) -> Result<Self, VhError> {
        if psi_dim > 1 {
            return Err(VhError::UnsupportedDimension(psi_dim));
        }
        if psi_dim == 1 && model.tprime.is_none() {
            return Err(VhError::NoVerticalDirection);
        }
        Ok(VhCalculus {
            crossed: model.crossed.clone(),
            tprime: model.tprime.clone(),
            psi_dim,
        })
    }

    pub fn crossed(&self) -> &Crossed {
        &self.crossed
    }

    fn twist(&self, w: i64) -> Scalar {
        match &self.tprime {
            Some(tp) => Scalar::from_rational(Scalar::rational_pow(tp, -w)),
            None => Scalar::one(),
        }
    }

    /// `ζ·φ = Σ (−1)^{∂φ} t′^{−w} φ_w ζ` on weight pieces of a horizontal
    /// form: the `∘`-twisted commutation.
    fn zeta_past(&self, phi: &HorForm) -> HorForm {
        let mut out = HorForm::zero();
        for (w, p, piece) in weight_pieces(phi) {
            let mut c = self.twist(w);
            if p % 2 == 1 {
                c = -&c;
            }
            out = out.add(&piece.scalar_mul(&c));
        }
        out
    }

    /// Product `(h₀ + h₁ζ)(h₀′ + h₁′ζ)`; `ζ² = 0`.
    pub fn mul(&self, a: &VHForm, b: &VHForm) -> Result<VHForm, VhError> {
        if self.psi_dim == 0 && (!a.h1.is_zero() || !b.h1.is_zero()) {
            return Err(VhError::NoVerticalDirection);
        }
        let c = &self.crossed;
        let h0 = hor_mul(c, &a.h0, &b.h0);
        let h1 = hor_mul(c, &a.h0, &b.h1).add(&hor_mul(c, &a.h1, &self.zeta_past(&b.h0)));
        Ok(VHForm { h0, h1 })
    }

    /// Star: `(φ + ψζ)* = φ* + Σ_w (−t′^{w}) ψ_w* ζ` from
    /// `(ψ⊗ζ)* = Σ ψ_k* ⊗ (ζ*∘c_k*)` with `ζ* = −ζ`.
    pub fn star(&self, a: &VHForm) -> Result<VHForm, VhError> {
        if self.psi_dim == 0 && !a.h1.is_zero() {
            return Err(VhError::NoVerticalDirection);
        }
        let c = &self.crossed;
        let mut h1 = HorForm::zero();
        for (w, _, piece) in weight_pieces(&a.h1) {
            let coeff = -&self.twist(-w);
            h1 = h1.add(&hor_star(c, &piece).scalar_mul(&coeff));
        }
        Ok(VHForm {
            h0: hor_star(c, &a.h0),
            h1,
        })
    }

    /// The differential `∂_D`:
    /// `∂_D(φ) = D(φ) + (−1)^{∂φ} Σ_w f_w φ_w ζ` on horizontal forms,
    /// `∂_D(ζ) = ρ_D(ζ)` (with `dζ = 0`), extended by the graded Leibniz
    /// rule to the vertical part.
    pub fn partial_d(&self, d: &Preconnection, a: &VHForm) -> Result<VHForm, VhError> {
        if self.psi_dim == 0 {
            if !a.h1.is_zero() {
                return Err(VhError::NoVerticalDirection);
            }
            return Ok(VHForm::horizontal(d.apply(&a.h0)));
        }
        let rho_zeta = d.rho_zeta()?;
        let c = &self.crossed;
        // horizontal part: D(h0) + Σ (−1)^p piece(h1) ρ(ζ)
        let mut h0 = d.apply(&a.h0);
        for (_, p, piece) in weight_pieces(&a.h1) {
            let term = hor_mul(c, &piece, &rho_zeta);
            h0 = h0.add(&if p % 2 == 1 { term.neg() } else { term });
        }
        // vertical part: Σ (−1)^p f_w piece(h0) + D(h1)
        let mut h1 = d.apply(&a.h1);
        for (w, p, piece) in weight_pieces(&a.h0) {
            let mut coeff = d.f_coeff(w);
            if p % 2 == 1 {
                coeff = -&coeff;
            }
            h1 = h1.add(&piece.scalar_mul(&coeff));
        }
        Ok(VHForm { h0, h1 })
    }

    /// `∂_D²(s)` for each sample; returns the nonzero defects.
    pub fn nilpotency_check(
        &self,
        d: &Preconnection,
        samples: &[VHForm],
    ) -> Result<Vec<VHForm>, VhError> {
        let mut defects = Vec::new();
        for s in samples {
            let dd = self.partial_d(d, &self.partial_d(d, s)?)?;
            if !dd.is_zero() {
                defects.push(dd);
            }
        }
        Ok(defects)
    }
}

/// Freeness witness for a group algebra element: pairs `(q_k, b_k)` with
/// `Σ_k q_k F(b_k) = 1 ⊗ a`, plus the generation identity that exhibits the
/// vertical generator inside `B·∂_D(B)`:
/// `Σ_k q_k ∂_D(b_k) = Σ_k q_k D(b_k) + π(a)`.
#[derive(Clone, Debug)]
pub struct GenerationWitness {
    pub pairs: Vec<(BundleElem, BundleElem)>,
    pub freeness_ok: bool,
    pub display_ok: bool,
}

pub fn generation_witness(
    vh: &VhCalculus,
    d: &Preconnection,
    a: &GroupElem,
) -> Result<GenerationWitness, VhError> {
    let crossed = vh.crossed();
    let pairs: Vec<(BundleElem, BundleElem)> = a
        .terms()
        .map(|(m, c)| (BundleElem::u_pow(-m).scalar_mul(c), BundleElem::u_pow(*m)))
        .collect();

    // Σ q_k F(b_k) = 1 ⊗ a, leg by leg in B ⊗ A
    let mut legs = crate::bundle::BundleTensorA::default();
    for (qk, bk) in &pairs {
        for (k, leg) in crossed.coaction(bk).legs {
            let entry = legs.legs.entry(k).or_default();
            *entry = entry.add(&crossed.mul(qk, &leg));
        }
    }
    legs.legs.retain(|_, b| !b.is_zero());
    let expected = crate::bundle::BundleTensorA::from_terms(
        a.terms().map(|(m, c)| (*m, BundleElem::one().scalar_mul(c))),
    );
    let freeness_ok = legs.sub(&expected).is_zero();

    // the generation display
    let mut lhs = VHForm::zero();
    let mut rhs = VHForm::zero();
    for (qk, bk) in &pairs {
        let q_vh = VHForm::horizontal(HorForm::from_bundle(qk.clone()));
        let b_vh = VHForm::horizontal(HorForm::from_bundle(bk.clone()));
        lhs = lhs.add(&vh.mul(&q_vh, &vh.partial_d(d, &b_vh)?)?);
        rhs = rhs.add(&vh.mul(
            &q_vh,
            &VHForm::horizontal(d.apply(&HorForm::from_bundle(bk.clone()))),
        )?);
    }
    // π(a) = (Σ_m a_m f_m)·ζ
    let mut pi_coeff = Scalar::zero();
    for (m, c) in a.terms() {
        pi_coeff += &(c * &d.f_coeff(*m));
    }
    let rhs = rhs.add(&VHForm::zeta().scalar_mul(&pi_coeff));
    let display_ok = lhs.sub(&rhs).is_zero();

    Ok(GenerationWitness {
        pairs,
        freeness_ok,
        display_ok,
    })
}
