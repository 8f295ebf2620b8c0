//! Derivations on `B`, the frame structure `τ = (∂₁, ∂₂)` of the model,
//! integrability of its extension `(X₁, X₂)`, the induced antiderivation
//! `∇` on horizontal forms and the base differential `d_M`.

use crate::base::BaseElem;
use crate::bundle::{
    solve_completeness_witness, BundleElem, BundleTensorA, CompletenessWitness, Crossed,
    ModelConfig, WitnessError,
};
use crate::hopf::rep_entry;
use crate::horizontal::{coaction_wedge, hor_mul, invariant_test, HorForm, HorTensorA};
use crate::report::{Check, Status};
use crate::sample::Sampler;
use crate::scalar::Scalar;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FramingError {
    #[error("tabulated derivation is missing a value for generator {0}")]
    MissingGenerator(&'static str),
    #[error("input form is not F-invariant, so d_M does not apply")]
    NotInvariant,
}

/// A derivation of `B`: either inner (commutator with a fixed element) or
/// tabulated on the generators `x, x⁻¹, 1⊗U, 1⊗U⁻¹` and extended by the
/// Leibniz rule along the canonical word of each monomial.
#[derive(Clone, Debug)]
pub enum Derivation {
    Inner {
        element: BundleElem,
        label: String,
    },
    Tabulated {
        on_x: Option<BundleElem>,
        on_x_inv: Option<BundleElem>,
        on_u: Option<BundleElem>,
        on_u_inv: Option<BundleElem>,
        label: String,
    },
}

impl Derivation {
    pub fn inner(element: BundleElem, label: &str) -> Self {
        Derivation::Inner {
            element,
            label: label.to_string(),
        }
    }

    pub fn label(&self) -> &str {
        match self {
            Derivation::Inner { label, .. } => label,
            Derivation::Tabulated { label, .. } => label,
        }
    }

    /// Scales the derivation by a scalar (inner elements absorb it).
    pub fn scaled(&self, c: &Scalar) -> Derivation {
        match self {
            Derivation::Inner { element, label } => Derivation::Inner {
                element: element.scalar_mul(c),
                label: format!("{c}*{label}"),
            },
            Derivation::Tabulated {
                on_x,
                on_x_inv,
                on_u,
                on_u_inv,
                label,
            } => Derivation::Tabulated {
                on_x: on_x.as_ref().map(|b| b.scalar_mul(c)),
                on_x_inv: on_x_inv.as_ref().map(|b| b.scalar_mul(c)),
                on_u: on_u.as_ref().map(|b| b.scalar_mul(c)),
                on_u_inv: on_u_inv.as_ref().map(|b| b.scalar_mul(c)),
                label: format!("{c}*{label}"),
            },
        }
    }

    pub fn apply(&self, crossed: &Crossed, b: &BundleElem) -> Result<BundleElem, FramingError> {
        match self {
            Derivation::Inner { element, .. } => Ok(crossed.commutator(element, b)),
            Derivation::Tabulated {
                on_x,
                on_x_inv,
                on_u,
                on_u_inv,
                ..
            } => {
                let gx = on_x.as_ref().ok_or(FramingError::MissingGenerator("x"))?;
                let gxi = on_x_inv.as_ref().ok_or(FramingError::MissingGenerator("x^-1"))?;
                let gu = on_u.as_ref().ok_or(FramingError::MissingGenerator("U"))?;
                let gui = on_u_inv.as_ref().ok_or(FramingError::MissingGenerator("U^-1"))?;
                let mut out = BundleElem::zero();
                for (m, f) in b.components() {
                    for (d, c) in f.terms() {
                        out = out.add(&self.monomial_value(crossed, *d, *m, gx, gxi, gu, gui).scalar_mul(c));
                    }
                }
                Ok(out)
            }
        }
    }

    /// Leibniz expansion over the canonical word `x^d · (1⊗U)^m`.
    fn monomial_value(
        &self,
        crossed: &Crossed,
        d: i64,
        m: i64,
        gx: &BundleElem,
        gxi: &BundleElem,
        gu: &BundleElem,
        gui: &BundleElem,
    ) -> BundleElem {
        let xpart = BundleElem::from_base(BaseElem::x_pow(d));
        let upart = BundleElem::u_pow(m);
        // X(x^d) by Leibniz over |d| letters
        let dx = {
            let (letter, value, n) = if d >= 0 {
                (BaseElem::x_pow(1), gx, d)
            } else {
                (BaseElem::x_pow(-1), gxi, -d)
            };
            let mut acc = BundleElem::zero();
            for j in 0..n {
                let left = BundleElem::from_base(crate::base::BaseElem::x_pow(
                    if d >= 0 { j } else { -j },
                ));
                let right = BundleElem::from_base({
                    let mut p = BaseElem::one();
                    for _ in 0..(n - 1 - j) {
                        p = &p * &letter;
                    }
                    p
                });
                acc = acc.add(&crossed.mul(&crossed.mul(&left, value), &right));
            }
            acc
        };
        // X(U^m) by Leibniz over |m| letters
        let du = {
            let (value, step, n) = if m >= 0 { (gu, 1i64, m) } else { (gui, -1i64, -m) };
            let mut acc = BundleElem::zero();
            for j in 0..n {
                let left = BundleElem::u_pow(step * j);
                let right = BundleElem::u_pow(step * (n - 1 - j));
                acc = acc.add(&crossed.mul(&crossed.mul(&left, value), &right));
            }
            acc
        };
        crossed.mul(&dx, &upart).add(&crossed.mul(&xpart, &du))
    }

    /// For a tabulated derivation, checks the inverse-generator relations
    /// `X(g⁻¹) = −g⁻¹ X(g) g⁻¹` for both generators; inner derivations
    /// satisfy them identically.
    pub fn inverse_relations_consistent(&self, crossed: &Crossed) -> Result<bool, FramingError> {
        let pairs = [
            (
                BundleElem::from_base(BaseElem::x_pow(1)),
                BundleElem::from_base(BaseElem::x_pow(-1)),
            ),
            (BundleElem::u_pow(1), BundleElem::u_pow(-1)),
        ];
        for (g, ginv) in pairs {
            let lhs = self.apply(crossed, &ginv)?;
            let rhs = crossed
                .mul(&crossed.mul(&ginv, &self.apply(crossed, &g)?), &ginv)
                .neg();
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `X†(b) := X(b*)*`; the defect `X† − X` sampled on the generators.
    /// For a derivation, vanishing on the generators forces hermiticity
    /// everywhere (Leibniz and conjugate-linearity extend it to words).
    pub fn hermitian_defect(
        &self,
        crossed: &Crossed,
    ) -> Result<Vec<(&'static str, BundleElem)>, FramingError> {
        let generators: [(&'static str, BundleElem); 4] = [
            ("x", BundleElem::from_base(BaseElem::x_pow(1))),
            ("x^-1", BundleElem::from_base(BaseElem::x_pow(-1))),
            ("U", BundleElem::u_pow(1)),
            ("U^-1", BundleElem::u_pow(-1)),
        ];
        let mut defects = Vec::new();
        for (name, g) in generators {
            let dagger = crossed.star(&self.apply(crossed, &crossed.star(&g))?);
            let defect = dagger.sub(&self.apply(crossed, &g)?);
            if !defect.is_zero() {
                defects.push((name, defect));
            }
        }
        Ok(defects)
    }
}

/// The extension `(X₁, X₂)` of the frame to derivations of all of `B`.
#[derive(Clone, Debug)]
pub struct FrameExtension {
    pub x: [Derivation; 2],
    pub model: ModelConfig,
}

/// The frame structure `τ = (∂₁, ∂₂)` with its completeness witness.
#[derive(Clone, Debug)]
pub struct FrameStructure {
    pub partials: [Derivation; 2],
    pub witness: Option<CompletenessWitness>,
}

/// The complex normalization of the frame generators. `X₊ = ad(s·(α⊗U))`
/// and `X₋ = X₊† = ad(s̄·(β⊗U⁻¹))` with `|s|² = 1/2`, which calibrates the
/// commutator `[X₁, X₂] = (1/4i)·ad(v⊗1)` and hence the curvature
/// prefactor `1/4i`.
pub fn frame_scale() -> Scalar {
    &Scalar::from_ratio(1, 2) * &(&Scalar::one() + &Scalar::i())
}

/// The raising/lowering generators `g₊ = s(α⊗U)`, `g₋ = s̄(β⊗U⁻¹)`.
pub fn ladder_elements(model: &ModelConfig) -> (BundleElem, BundleElem) {
    let s = frame_scale();
    let g_plus = BundleElem::embed(1, model.alpha.clone()).scalar_mul(&s);
    let g_minus = BundleElem::embed(-1, model.beta.clone()).scalar_mul(&s.conj());
    (g_plus, g_minus)
}

/// Builds the model frame `(∂₁, ∂₂)` and its extension `(X₁, X₂)` from
/// `X± = X₁ ∓ iX₂`, i.e. `X₁ = (X₊+X₋)/2` and `X₂ = (X₋−X₊)/2i`.
pub fn model_frame(model: &ModelConfig) -> (FrameStructure, FrameExtension) {
    let (g_plus, g_minus) = ladder_elements(model);
    let half = Scalar::from_ratio(1, 2);
    let half_over_i = &half / &Scalar::i();
    let e1 = g_plus.add(&g_minus).scalar_mul(&half);
    let e2 = g_minus.sub(&g_plus).scalar_mul(&half_over_i);
    let x1 = Derivation::inner(e1, "X1");
    let x2 = Derivation::inner(e2, "X2");
    let ext = FrameExtension {
        x: [x1.clone(), x2.clone()],
        model: model.clone(),
    };
    let frame = FrameStructure {
        partials: [x1, x2],
        witness: None,
    };
    (frame, ext)
}

impl FrameStructure {
    /// `∂_i(f)` for `f ∈ V`.
    pub fn partial(&self, crossed: &Crossed, i: usize, f: &BaseElem) -> BundleElem {
        self.partials[i]
            .apply(crossed, &BundleElem::from_base(f.clone()))
            .expect("model partials are inner")
    }

    /// Solves for a completeness witness over the given monomial candidates.
    pub fn solve_witness(
        &mut self,
        crossed: &Crossed,
        v_candidates: &[i64],
        degree_box: i64,
    ) -> Result<&CompletenessWitness, WitnessError> {
        let d1 = |f: &BaseElem| self.partial(crossed, 0, f);
        let d2 = |f: &BaseElem| self.partial(crossed, 1, f);
        let witness = solve_completeness_witness(crossed, [&d1, &d2], v_candidates, degree_box)?;
        self.witness = Some(witness);
        Ok(self.witness.as_ref().unwrap())
    }
}

impl FrameExtension {
    pub fn crossed(&self) -> &Crossed {
        &self.model.crossed
    }

    pub fn apply(&self, i: usize, b: &BundleElem) -> BundleElem {
        self.x[i]
            .apply(self.crossed(), b)
            .expect("frame extension derivations are total")
    }

    /// `∇(w)`: the antiderivation with `∇(b) = Σ_k X_k(b)θ_k`, `∇(θ_i) = 0`.
    pub fn nabla(&self, w: &HorForm) -> HorForm {
        let crossed = self.crossed();
        let mut out = HorForm::zero();
        for idx in 0..4usize {
            let b = w.get(idx);
            if b.is_zero() {
                continue;
            }
            let db = HorForm::component(1, self.apply(0, b)).add(&HorForm::component(2, self.apply(1, b)));
            out = out.add(&hor_mul(crossed, &db, &HorForm::component(idx, BundleElem::one())));
        }
        out
    }

    /// `d_M`: the common restriction of the frame extensions to `Ω_M`.
    pub fn d_m(&self, w: &HorForm) -> Result<HorForm, FramingError> {
        if !invariant_test(self.crossed(), w).0 {
            return Err(FramingError::NotInvariant);
        }
        Ok(self.nabla(w))
    }

    /// `d_M` on a base algebra element.
    pub fn d_m_base(&self, f: &BaseElem) -> HorForm {
        self.nabla(&HorForm::from_bundle(BundleElem::from_base(f.clone())))
    }
}

/// Evaluates `Σ_α b_{iα} d_M(v_{iα})` and compares it with `θ_i`.
pub fn theta_from_dm(
    ext: &FrameExtension,
    witness: &CompletenessWitness,
    i: usize,
) -> (HorForm, HorForm) {
    let crossed = ext.crossed();
    let mut acc = HorForm::zero();
    for (b, v) in &witness.rows[i] {
        let dv = ext.d_m_base(v);
        acc = acc.add(&hor_mul(crossed, &HorForm::from_bundle(b.clone()), &dv));
    }
    (acc, HorForm::theta(i + 1))
}

fn defect_to_witness(tag: &str, defect: &BundleTensorA) -> String {
    format!("{tag}: defect legs {:?}", defect.legs)
}

/// Covariance of a derivation against the representation column `i`:
/// `F X(b) = Σ_j X_j(b_k) ⊗ c_k u_{ji}` with `F(b) = Σ b_k ⊗ c_k`.
fn covariance_defect(
    crossed: &Crossed,
    ops: &[Derivation; 2],
    i: usize,
    b: &BundleElem,
) -> Result<BundleTensorA, FramingError> {
    let lhs = crossed.coaction(&ops[i].apply(crossed, b)?);
    let mut rhs = BundleTensorA::default();
    for (j, op) in ops.iter().enumerate() {
        let u_ji = rep_entry(j + 1, i + 1).expect("indices in range");
        for (k, leg) in crossed.coaction(b).legs {
            let term = BundleTensorA::from_terms([(k, op.apply(crossed, &leg)?)]).mul_group_leg(&u_ji);
            rhs = BundleTensorA::from_terms(
                rhs.legs.into_iter().chain(term.legs.into_iter()),
            );
        }
    }
    Ok(lhs.sub(&rhs))
}

/// Frame-structure axioms: hermiticity of the `∂_i`, their covariance under
/// the coaction and the completeness witness identity.
pub fn check_frame_axioms(
    crossed: &Crossed,
    frame: &FrameStructure,
    sampler: &Sampler,
    samples: usize,
) -> Vec<Check> {
    let mut checks = Vec::new();
    let mut rng = sampler.rng();

    // hermiticity on generators (sufficient for derivations)
    for (i, op) in frame.partials.iter().enumerate() {
        match op.hermitian_defect(crossed) {
            Ok(defects) => checks.push(Check::of_bool(
                &format!("frame.hermitian.d{}", i + 1),
                "frame derivation is hermitian on the generator set",
                defects.is_empty(),
                || format!("{}: {:?}", op.label(), defects),
            )),
            Err(e) => checks.push(
                Check::new(
                    &format!("frame.hermitian.d{}", i + 1),
                    "frame derivation is hermitian on the generator set",
                    Status::Fail,
                )
                .with_witness(e.to_string()),
            ),
        }
    }

    // covariance on generators plus seeded samples of V
    let mut test_fs: Vec<BaseElem> = vec![BaseElem::x_pow(1), BaseElem::x_pow(-1)];
    for _ in 0..samples {
        test_fs.push(sampler.base_elem(&mut rng));
    }
    for i in 0..2usize {
        let mut defect_witness = None;
        for f in &test_fs {
            let b = BundleElem::from_base(f.clone());
            match covariance_defect(crossed, &frame.partials, i, &b) {
                Ok(d) if d.is_zero() => {}
                Ok(d) => {
                    defect_witness = Some(defect_to_witness(&format!("at f = {f}"), &d));
                    break;
                }
                Err(e) => {
                    defect_witness = Some(e.to_string());
                    break;
                }
            }
        }
        let mut check = Check::new(
            &format!("frame.covariance.d{}", i + 1),
            "frame derivations transform by the representation column-wise",
            if defect_witness.is_none() { Status::Pass } else { Status::Fail },
        );
        if let Some(w) = defect_witness {
            check = check.with_witness(w);
        }
        checks.push(check);
    }

    // completeness witness
    match &frame.witness {
        None => checks.push(Check::new(
            "frame.completeness",
            "completeness witness equation",
            Status::Unverified,
        )),
        Some(w) => {
            let d1 = |f: &BaseElem| frame.partial(crossed, 0, f);
            let d2 = |f: &BaseElem| frame.partial(crossed, 1, f);
            let result = w.verify(crossed, [&d1, &d2]);
            checks.push(Check::of_bool(
                "frame.completeness",
                "completeness witness equation",
                result.is_ok(),
                || format!("defects: {:?}", result.err()),
            ))
        }
    }
    checks
}

/// Integrability of the frame extension: covariance of the `X_i`, their
/// restriction to the frame and commutation on the base algebra.
pub fn check_integrability(
    ext: &FrameExtension,
    frame: &FrameStructure,
    sampler: &Sampler,
    samples: usize,
) -> Vec<Check> {
    let crossed = &ext.model.crossed;
    let mut checks = Vec::new();
    let mut rng = sampler.rng();

    let mut test_bs: Vec<BundleElem> = vec![
        BundleElem::from_base(BaseElem::x_pow(1)),
        BundleElem::from_base(BaseElem::x_pow(-1)),
        BundleElem::u_pow(1),
        BundleElem::u_pow(-1),
    ];
    for _ in 0..samples {
        test_bs.push(sampler.bundle_elem(&mut rng));
    }

    for j in 0..2usize {
        let mut witness = None;
        for b in &test_bs {
            match covariance_defect(crossed, &ext.x, j, b) {
                Ok(d) if d.is_zero() => {}
                Ok(d) => {
                    witness = Some(defect_to_witness(&format!("at b = {b}"), &d));
                    break;
                }
                Err(e) => {
                    witness = Some(e.to_string());
                    break;
                }
            }
        }
        let mut check = Check::new(
            &format!("integrable.covariance.x{}", j + 1),
            "extended derivations transform by the representation",
            if witness.is_none() { Status::Pass } else { Status::Fail },
        );
        if let Some(w) = witness {
            check = check.with_witness(w);
        }
        checks.push(check);
    }

    // restriction to V agrees with the frame
    let mut test_fs: Vec<BaseElem> = vec![BaseElem::x_pow(1), BaseElem::x_pow(-1)];
    for _ in 0..samples {
        test_fs.push(sampler.base_elem(&mut rng));
    }
    for i in 0..2usize {
        let ok = test_fs.iter().all(|f| {
            let b = BundleElem::from_base(f.clone());
            ext.x[i].apply(crossed, &b).ok() == Some(frame.partial(crossed, i, f))
        });
        checks.push(Check::of_bool(
            &format!("integrable.restriction.x{}", i + 1),
            "extension restricts to the frame derivations on the base",
            ok,
            || "restriction mismatch on a base sample".into(),
        ));
    }

    // X_i ∂_j − X_j ∂_i = 0 on V
    let ok = test_fs.iter().all(|f| {
        let d1 = frame.partial(crossed, 0, f);
        let d2 = frame.partial(crossed, 1, f);
        let lhs = ext.apply(0, &d2).sub(&ext.apply(1, &d1));
        lhs.is_zero()
    });
    checks.push(Check::of_bool(
        "integrable.commutation",
        "extended derivations commute through the frame on the base",
        ok,
        || "nonzero commutator on a base sample".into(),
    ));

    checks
}

/// The two defining identities of `∇`: compatibility with the star and
/// with the coaction, checked on seeded random forms.
pub fn check_nabla_laws(ext: &FrameExtension, sampler: &Sampler, samples: usize) -> Vec<Check> {
    let crossed = ext.crossed();
    let mut rng = sampler.rng();
    let mut star_ok = true;
    let mut cov_ok = true;
    let mut star_witness = String::new();
    let mut cov_witness = String::new();
    for _ in 0..samples {
        let w = sampler.hor_form(&mut rng);
        let lhs = ext.nabla(&crate::horizontal::hor_star(crossed, &w));
        let rhs = crate::horizontal::hor_star(crossed, &ext.nabla(&w));
        if lhs != rhs && star_ok {
            star_ok = false;
            star_witness = format!("at w = {w}");
        }
        let lhs2 = coaction_wedge(crossed, &ext.nabla(&w));
        let rhs2 = coaction_wedge(crossed, &w).map_hor(|h| ext.nabla(h));
        if lhs2 != rhs2 && cov_ok {
            cov_ok = false;
            cov_witness = format!("at w = {w}");
        }
    }
    vec![
        Check::of_bool(
            "nabla.star",
            "the frame connection commutes with the star",
            star_ok,
            || star_witness,
        ),
        Check::of_bool(
            "nabla.covariance",
            "the frame connection commutes with the coaction",
            cov_ok,
            || cov_witness,
        ),
    ]
}

/// `HorTensorA` equality via subtraction (helper for callers).
pub fn hor_tensor_equal(a: &HorTensorA, b: &HorTensorA) -> bool {
    a.sub(b).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::build_model;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn model2() -> ModelConfig {
        build_model(q(2, 1), BaseElem::x_pow(1), 6).unwrap()
    }

    #[test]
    fn plain_commutator_values() {
        // With the unscaled inner derivation ad(x⊗U):
        // [x⊗U, x⊗1] = x(γ(x) − x) ⊗ U = (t−1)x² ⊗ U = x² ⊗ U at t = 2
        let m = model2();
        let ad = Derivation::inner(BundleElem::embed(1, BaseElem::x_pow(1)), "ad(x⊗U)");
        let out = ad.apply(&m.crossed, &BundleElem::from_base(BaseElem::x_pow(1))).unwrap();
        assert_eq!(out, BundleElem::embed(1, BaseElem::x_pow(2)));
        // derivations kill the unit
        assert!(ad.apply(&m.crossed, &BundleElem::one()).unwrap().is_zero());
    }

    #[test]
    fn scaled_frame_values() {
        // X₁(x) = (1/4+i/4)x²⊗U + (1/16−i/16)x²⊗U⁻¹ for t = 2 under the
        // calibrated normalization s = (1+i)/2.
        let m = model2();
        let (_, ext) = model_frame(&m);
        let x1 = ext.apply(0, &BundleElem::from_base(BaseElem::x_pow(1)));
        let expected = BundleElem::embed(1, BaseElem::monomial(2, Scalar::new(q(1, 4), q(1, 4))))
            .add(&BundleElem::embed(-1, BaseElem::monomial(2, Scalar::new(q(1, 16), q(-1, 16)))));
        assert_eq!(x1, expected);
        let x2 = ext.apply(1, &BundleElem::from_base(BaseElem::x_pow(1)));
        let expected2 = BundleElem::embed(1, BaseElem::monomial(2, Scalar::new(q(-1, 4), q(1, 4))))
            .add(&BundleElem::embed(-1, BaseElem::monomial(2, Scalar::new(q(-1, 16), q(-1, 16)))));
        assert_eq!(x2, expected2);
    }

    #[test]
    fn leibniz_on_samples() {
        let m = model2();
        let (_, ext) = model_frame(&m);
        let sampler = Sampler::new(41);
        let mut rng = sampler.rng();
        for _ in 0..10 {
            let a = sampler.bundle_elem(&mut rng);
            let b = sampler.bundle_elem(&mut rng);
            for i in 0..2 {
                let lhs = ext.apply(i, &m.crossed.mul(&a, &b));
                let rhs = m
                    .crossed
                    .mul(&ext.apply(i, &a), &b)
                    .add(&m.crossed.mul(&a, &ext.apply(i, &b)));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn tabulated_matches_inner() {
        let m = model2();
        let g = BundleElem::embed(1, BaseElem::x_pow(1));
        let ad = Derivation::inner(g.clone(), "ad");
        let tab = {
            let gens = [
                BundleElem::from_base(BaseElem::x_pow(1)),
                BundleElem::from_base(BaseElem::x_pow(-1)),
                BundleElem::u_pow(1),
                BundleElem::u_pow(-1),
            ];
            let vals: Vec<BundleElem> = gens.iter().map(|b| m.crossed.commutator(&g, b)).collect();
            Derivation::Tabulated {
                on_x: Some(vals[0].clone()),
                on_x_inv: Some(vals[1].clone()),
                on_u: Some(vals[2].clone()),
                on_u_inv: Some(vals[3].clone()),
                label: "tab".into(),
            }
        };
        let sampler = Sampler::new(43);
        let mut rng = sampler.rng();
        for _ in 0..10 {
            let b = sampler.bundle_elem(&mut rng);
            assert_eq!(
                ad.apply(&m.crossed, &b).unwrap(),
                tab.apply(&m.crossed, &b).unwrap()
            );
        }
    }

    #[test]
    fn inverse_generator_relations() {
        let m = model2();
        let (_, ext) = model_frame(&m);
        for op in &ext.x {
            assert!(op.inverse_relations_consistent(&m.crossed).unwrap());
        }
        // an inconsistent table is detected
        let bad = Derivation::Tabulated {
            on_x: Some(BundleElem::u_pow(1)),
            on_x_inv: Some(BundleElem::u_pow(1)),
            on_u: Some(BundleElem::zero()),
            on_u_inv: Some(BundleElem::zero()),
            label: "bad".into(),
        };
        assert!(!bad.inverse_relations_consistent(&m.crossed).unwrap());
    }

    #[test]
    fn tabulated_missing_generator_errors() {
        let m = model2();
        let tab = Derivation::Tabulated {
            on_x: Some(BundleElem::zero()),
            on_x_inv: None,
            on_u: Some(BundleElem::zero()),
            on_u_inv: Some(BundleElem::zero()),
            label: "partial".into(),
        };
        let b = BundleElem::from_base(BaseElem::x_pow(-2));
        assert!(tab.apply(&m.crossed, &b).is_err());
    }

    #[test]
    fn hermiticity_of_frame_and_ladder() {
        let m = model2();
        let (frame, _) = model_frame(&m);
        for op in &frame.partials {
            assert!(op.hermitian_defect(&m.crossed).unwrap().is_empty());
        }
        // X₊ alone is not hermitian: X₊† = X₋ ≠ X₊
        let (gp, _) = ladder_elements(&m);
        let xp = Derivation::inner(gp, "X+");
        assert!(!xp.hermitian_defect(&m.crossed).unwrap().is_empty());
        // i·X₁ is anti-hermitian
        let (_, ext) = model_frame(&m);
        let ix1 = ext.x[0].scaled(&Scalar::i());
        assert!(!ix1.hermitian_defect(&m.crossed).unwrap().is_empty());
    }

    #[test]
    fn model_frame_passes_axioms_with_witness() {
        let m = model2();
        let (mut frame, ext) = model_frame(&m);
        frame.solve_witness(&m.crossed, &[1, -1], 4).unwrap();
        let sampler = Sampler::new(47);
        let checks = check_frame_axioms(&m.crossed, &frame, &sampler, 6);
        assert!(checks.iter().all(|c| c.status == Status::Pass), "{checks:?}");
        let checks = check_integrability(&ext, &frame, &sampler, 6);
        assert!(checks.iter().all(|c| c.status == Status::Pass), "{checks:?}");
    }

    #[test]
    fn witness_solver_fails_for_degenerate_frame() {
        // ∂₂ ≡ ∂₁ makes δ_12 unreachable
        let m = model2();
        let (frame, _) = model_frame(&m);
        let d1 = |f: &BaseElem| frame.partial(&m.crossed, 0, f);
        let solved = solve_completeness_witness(&m.crossed, [&d1, &d1], &[1, -1], 4);
        assert!(solved.is_err());
    }

    #[test]
    fn mutated_frames_fail_checks() {
        let m = model2();
        let (mut frame, ext) = model_frame(&m);
        frame.solve_witness(&m.crossed, &[1, -1], 4).unwrap();
        let sampler = Sampler::new(53);
        // scaling ∂₂ by 2 breaks covariance
        let mut bad = frame.clone();
        bad.partials[1] = bad.partials[1].scaled(&Scalar::from_int(2));
        let checks = check_frame_axioms(&m.crossed, &bad, &sampler, 4);
        assert!(checks.iter().any(|c| c.id == "frame.covariance.d2" && c.status == Status::Fail));
        // scaling X₂ breaks the restriction identity
        let mut bad_ext = ext.clone();
        bad_ext.x[1] = bad_ext.x[1].scaled(&Scalar::from_int(2));
        let checks = check_integrability(&bad_ext, &frame, &sampler, 4);
        assert!(checks
            .iter()
            .any(|c| c.id == "integrable.restriction.x2" && c.status == Status::Fail));
        // swapping the ladder weights breaks covariance
        let (gp, gm) = ladder_elements(&m);
        let swapped = FrameExtension {
            x: [
                Derivation::inner(gp.add(&gm).scalar_mul(&Scalar::from_ratio(1, 2)), "X1"),
                Derivation::inner(
                    gp.sub(&gm).scalar_mul(&(&Scalar::from_ratio(1, 2) / &Scalar::i())),
                    "X2-swapped",
                ),
            ],
            model: m.clone(),
        };
        let checks = check_integrability(&swapped, &frame, &sampler, 4);
        assert!(checks.iter().any(|c| c.status == Status::Fail));
    }

    #[test]
    fn frame_without_witness_reports_unverified() {
        let m = model2();
        let (frame, _) = model_frame(&m);
        let sampler = Sampler::new(59);
        let checks = check_frame_axioms(&m.crossed, &frame, &sampler, 2);
        assert!(checks
            .iter()
            .any(|c| c.id == "frame.completeness" && c.status == Status::Unverified));
    }

    #[test]
    fn nabla_laws_and_values() {
        let m = model2();
        let (_, ext) = model_frame(&m);
        // ∇(θ_i) = 0
        assert!(ext.nabla(&HorForm::theta(1)).is_zero());
        assert!(ext.nabla(&HorForm::theta(2)).is_zero());
        // ∇(x⊗1) = X₁(x)θ₁ + X₂(x)θ₂
        let w = ext.nabla(&HorForm::from_bundle(BundleElem::from_base(BaseElem::x_pow(1))));
        let expected = HorForm::component(1, ext.apply(0, &BundleElem::from_base(BaseElem::x_pow(1))))
            .add(&HorForm::component(2, ext.apply(1, &BundleElem::from_base(BaseElem::x_pow(1)))));
        assert_eq!(w, expected);
        // antiderivation law on samples
        let sampler = Sampler::new(61);
        let mut rng = sampler.rng();
        for _ in 0..8 {
            let a = sampler.hor_form_of_degree(&mut rng, 0);
            let b = sampler.hor_form(&mut rng);
            let lhs = ext.nabla(&hor_mul(&m.crossed, &a, &b));
            let rhs = hor_mul(&m.crossed, &ext.nabla(&a), &b)
                .add(&hor_mul(&m.crossed, &a, &ext.nabla(&b)));
            assert_eq!(lhs, rhs);
            let a1 = sampler.hor_form_of_degree(&mut rng, 1);
            let lhs = ext.nabla(&hor_mul(&m.crossed, &a1, &b));
            let rhs = hor_mul(&m.crossed, &ext.nabla(&a1), &b)
                .sub(&hor_mul(&m.crossed, &a1, &ext.nabla(&b)));
            assert_eq!(lhs, rhs);
        }
        // ∇* = *∇ and coaction compatibility
        let checks = check_nabla_laws(&ext, &Sampler::new(67), 20);
        assert!(checks.iter().all(|c| c.status == Status::Pass), "{checks:?}");
    }

    #[test]
    fn d_m_squares_to_zero_and_preserves_invariance() {
        let m = model2();
        let (_, ext) = model_frame(&m);
        let x = BaseElem::x_pow(1);
        let dx = ext.d_m_base(&x);
        assert!(invariant_test(&m.crossed, &dx).0);
        assert!(ext.nabla(&dx).is_zero());
        assert!(ext.d_m(&HorForm::one()).unwrap().is_zero());
        assert!(ext.d_m(&HorForm::theta(1)).is_err());
        // spans f₀ d_M f₁ d_M f₂: d_M² vanishes on them
        let sampler = Sampler::new(71);
        let mut rng = sampler.rng();
        for _ in 0..6 {
            let f0 = sampler.base_elem(&mut rng);
            let f1 = sampler.base_elem(&mut rng);
            let f2 = sampler.base_elem(&mut rng);
            let w = hor_mul(
                &m.crossed,
                &HorForm::from_bundle(BundleElem::from_base(f0)),
                &hor_mul(&m.crossed, &ext.d_m_base(&f1), &ext.d_m_base(&f2)),
            );
            assert!(invariant_test(&m.crossed, &w).0);
            let dw = ext.d_m(&w).unwrap();
            if !dw.is_zero() {
                assert!(ext.d_m(&dw).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn theta_identity_from_witness() {
        let m = model2();
        let (mut frame, ext) = model_frame(&m);
        frame.solve_witness(&m.crossed, &[1, -1], 4).unwrap();
        let w = frame.witness.as_ref().unwrap();
        for i in 0..2 {
            let (lhs, rhs) = theta_from_dm(&ext, w, i);
            assert_eq!(lhs, rhs, "theta_{}", i + 1);
        }
        // corrupted witness reports a nonzero difference
        let mut corrupted = w.clone();
        corrupted.rows[0][0].0 = corrupted.rows[0][0].0.scalar_mul(&Scalar::from_int(2));
        let (lhs, rhs) = theta_from_dm(&ext, &corrupted, 0);
        assert_ne!(lhs, rhs);
    }

    #[test]
    fn base_form_decompose_reassembles() {
        let m = model2();
        let (mut frame, ext) = model_frame(&m);
        frame.solve_witness(&m.crossed, &[1, -1], 4).unwrap();
        let witness = frame.witness.as_ref().unwrap();
        let sampler = Sampler::new(73);
        let mut rng = sampler.rng();
        let mut forms = vec![
            HorForm::theta(1),
            hor_mul(
                &m.crossed,
                &HorForm::from_bundle(BundleElem::embed(1, BaseElem::x_pow(1))),
                &HorForm::theta_plus(),
            ),
        ];
        for _ in 0..4 {
            forms.push(sampler.hor_form(&mut rng));
        }
        for w in &forms {
            let pairs = crate::horizontal::base_form_decompose(&m.crossed, w, witness);
            let mut acc = HorForm::zero();
            for (wi, fi) in &pairs {
                acc = acc.add(&hor_mul(&m.crossed, wi, &ext.d_m_base(fi)));
            }
            // reassembly recovers the positive-degree part of w
            let expected = w.sub(&HorForm::from_bundle(w.get(0).clone()));
            assert_eq!(acc, expected, "decomposition of {w}");
        }
        assert!(crate::horizontal::base_form_decompose(&m.crossed, &HorForm::zero(), witness).is_empty());
    }
}
