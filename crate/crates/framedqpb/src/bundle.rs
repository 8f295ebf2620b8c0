//! The crossed-product bundle algebra `B = V ⊗ A`: the twisted product
//! `(f⊗U^m)(g⊗U^n) = f γ^m(g) ⊗ U^{m+n}`, the star
//! `(f⊗U^m)* = γ^{-m}(f*) ⊗ U^{-m}`, the coaction `F(f⊗U^m) = f⊗U^m⊗U^m`,
//! the model data (α, β, v) and completeness witnesses.

use crate::base::{BaseAutomorphism, BaseElem};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use num_rational::BigRational;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Element `Σ_m f_m ⊗ U^m` of `B`, keyed by the coaction weight `m`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct BundleElem {
    graded: BTreeMap<i64, BaseElem>,
}

/// Element of `B ⊗ A`, keyed by the `A`-leg degree.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct BundleTensorA {
    pub legs: BTreeMap<i64, BundleElem>,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("deformation parameter: {0}")]
    Parameter(#[from] crate::base::BaseError),
    #[error("alpha must be nonzero")]
    ZeroAlpha,
    #[error("window must be at least 2, got {0}")]
    WindowTooSmall(i64),
}

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error("no completeness witness in the search window (degree box {0}); the system is inconsistent or the window is too small")]
    NoSolution(i64),
}

impl BundleElem {
    pub fn zero() -> Self {
        BundleElem::default()
    }

    pub fn one() -> Self {
        BundleElem::embed(0, BaseElem::one())
    }

    /// `f ⊗ U^m`.
    pub fn embed(m: i64, f: BaseElem) -> Self {
        let mut graded = BTreeMap::new();
        if !f.is_zero() {
            graded.insert(m, f);
        }
        BundleElem { graded }
    }

    /// `1 ⊗ U^m`.
    pub fn u_pow(m: i64) -> Self {
        BundleElem::embed(m, BaseElem::one())
    }

    /// `f ⊗ 1` for `f ∈ V`.
    pub fn from_base(f: BaseElem) -> Self {
        BundleElem::embed(0, f)
    }

    pub fn is_zero(&self) -> bool {
        self.graded.is_empty()
    }

    pub fn component(&self, m: i64) -> BaseElem {
        self.graded.get(&m).cloned().unwrap_or_default()
    }

    pub fn components(&self) -> impl Iterator<Item = (&i64, &BaseElem)> {
        self.graded.iter()
    }

    pub fn weights(&self) -> impl Iterator<Item = i64> + '_ {
        self.graded.keys().copied()
    }

    /// True when every component sits at the single coaction weight `m`.
    pub fn is_homogeneous_of_weight(&self, m: i64) -> bool {
        self.graded.keys().all(|&k| k == m)
    }

    pub fn add(&self, rhs: &BundleElem) -> BundleElem {
        let mut out = self.clone();
        for (m, f) in &rhs.graded {
            out.add_component(*m, f.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &BundleElem) -> BundleElem {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> BundleElem {
        BundleElem {
            graded: self.graded.iter().map(|(m, f)| (*m, -f)).collect(),
        }
    }

    pub fn scalar_mul(&self, c: &Scalar) -> BundleElem {
        let mut out = BundleElem::zero();
        for (m, f) in &self.graded {
            out.add_component(*m, f.scalar_mul(c));
        }
        out
    }

    fn add_component(&mut self, m: i64, f: BaseElem) {
        if f.is_zero() {
            return;
        }
        let entry = self.graded.entry(m).or_default();
        let sum = &*entry + &f;
        if sum.is_zero() {
            self.graded.remove(&m);
        } else {
            *entry = sum;
        }
    }

    /// Inverse of an invertible monomial `f ⊗ U^m` (with `f` a monomial).
    pub fn inverse(&self, gamma: &BaseAutomorphism) -> Option<BundleElem> {
        if self.graded.len() != 1 {
            return None;
        }
        let (m, f) = self.graded.iter().next()?;
        let finv = f.inverse()?;
        Some(BundleElem::embed(-m, gamma.pow_apply(&finv, -m)))
    }
}

impl fmt::Display for BundleElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, g) in &self.graded {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match m {
                0 => write!(f, "[{g}]")?,
                1 => write!(f, "[{g}]U")?,
                _ => write!(f, "[{g}]U^{m}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BundleElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The crossed-product structure: all products and stars in `B` twist
/// through this automorphism.
#[derive(Clone, Debug)]
pub struct Crossed {
    pub gamma: BaseAutomorphism,
}

impl Crossed {
    pub fn new(gamma: BaseAutomorphism) -> Self {
        Crossed { gamma }
    }

    /// Twisted product `(f⊗U^m)(g⊗U^n) = f γ^m(g) ⊗ U^{m+n}`.
    pub fn mul(&self, a: &BundleElem, b: &BundleElem) -> BundleElem {
        let mut out = BundleElem::zero();
        for (m, f) in &a.graded {
            for (n, g) in &b.graded {
                out.add_component(m + n, f * &self.gamma.pow_apply(g, *m));
            }
        }
        out
    }

    /// `(f⊗U^m)* = γ^{-m}(f*) ⊗ U^{-m}`.
    pub fn star(&self, a: &BundleElem) -> BundleElem {
        let mut out = BundleElem::zero();
        for (m, f) in &a.graded {
            out.add_component(-m, self.gamma.pow_apply(&f.star(), -m));
        }
        out
    }

    pub fn commutator(&self, a: &BundleElem, b: &BundleElem) -> BundleElem {
        self.mul(a, b).sub(&self.mul(b, a))
    }

    /// The coaction `F(f⊗U^m) = (f⊗U^m) ⊗ U^m`: the grading is the coaction.
    pub fn coaction(&self, a: &BundleElem) -> BundleTensorA {
        BundleTensorA {
            legs: a
                .graded
                .iter()
                .map(|(m, f)| (*m, BundleElem::embed(*m, f.clone())))
                .collect(),
        }
    }
}

impl BundleTensorA {
    pub fn is_zero(&self) -> bool {
        self.legs.values().all(|b| b.is_zero())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, BundleElem)>) -> Self {
        let mut legs: BTreeMap<i64, BundleElem> = BTreeMap::new();
        for (k, b) in terms {
            let entry = legs.entry(k).or_default();
            *entry = entry.add(&b);
        }
        legs.retain(|_, b| !b.is_zero());
        BundleTensorA { legs }
    }

    pub fn sub(&self, rhs: &BundleTensorA) -> BundleTensorA {
        let mut legs = self.legs.clone();
        for (k, b) in &rhs.legs {
            let entry = legs.entry(*k).or_default();
            *entry = entry.sub(b);
        }
        legs.retain(|_, b| !b.is_zero());
        BundleTensorA { legs }
    }

    /// Right-multiplies the `A`-leg by a group algebra element.
    pub fn mul_group_leg(&self, a: &crate::hopf::GroupElem) -> BundleTensorA {
        let mut out = BundleTensorA::default();
        for (k, b) in &self.legs {
            for (m, c) in a.terms() {
                let entry = out.legs.entry(k + m).or_default();
                *entry = entry.add(&b.scalar_mul(c));
            }
        }
        out.legs.retain(|_, b| !b.is_zero());
        out
    }

    /// Applies `id ⊗ ε`.
    pub fn counit_leg(&self) -> BundleElem {
        let mut out = BundleElem::zero();
        for b in self.legs.values() {
            out = out.add(b);
        }
        out
    }
}

/// The model data: `t`, `α`, the derived `β = -γ⁻¹(α*)`,
/// `v = αγ(β) - βγ⁻¹(α)` and, when `v` is a `γ`-eigenvector, its
/// eigenvalue `t′`.
#[derive(Clone, Debug)]
pub struct ModelConfig {
    pub crossed: Crossed,
    pub alpha: BaseElem,
    pub beta: BaseElem,
    pub v: BaseElem,
    /// Eigenvalue in `γ(v) = t′·v`, when `v` is a (single-degree) eigenvector.
    pub tprime: Option<BigRational>,
    pub window: i64,
}

/// Builds the model from `(t, α, window)`.
pub fn build_model(t: BigRational, alpha: BaseElem, window: i64) -> Result<ModelConfig, ModelError> {
    let gamma = BaseAutomorphism::new(t)?;
    if alpha.is_zero() {
        return Err(ModelError::ZeroAlpha);
    }
    if window < 2 {
        return Err(ModelError::WindowTooSmall(window));
    }
    let beta = -&gamma.pow_apply(&alpha.star(), -1);
    let v = &(&alpha * &gamma.apply(&beta)) - &(&beta * &gamma.pow_apply(&alpha, -1));
    let tprime = v.as_monomial().map(|(d, _)| Scalar::rational_pow(gamma.t(), d));
    Ok(ModelConfig {
        crossed: Crossed::new(gamma),
        alpha,
        beta,
        v,
        tprime,
        window,
    })
}

impl ModelConfig {
    pub fn gamma(&self) -> &BaseAutomorphism {
        &self.crossed.gamma
    }

    /// The β-relation `β = -γ⁻¹(α*)`, re-checked.
    pub fn beta_relation_holds(&self) -> bool {
        self.beta == -&self.crossed.gamma.pow_apply(&self.alpha.star(), -1)
    }
}

/// Witness `(b_{iα}, v_{iα})` for the completeness condition
/// `Σ_α b_{iα} ∂_j(v_{iα}) = δ_ij · 1`.
#[derive(Clone, Debug)]
pub struct CompletenessWitness {
    pub rows: [Vec<(BundleElem, BaseElem)>; 2],
}

impl CompletenessWitness {
    /// Re-checks the witness equation against the given partial derivations;
    /// returns the defect per `(i, j)` when it fails.
    pub fn verify(
        &self,
        crossed: &Crossed,
        partials: [&dyn Fn(&BaseElem) -> BundleElem; 2],
    ) -> Result<(), Vec<((usize, usize), BundleElem)>> {
        let mut defects = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            for (j, partial) in partials.iter().enumerate() {
                let mut acc = BundleElem::zero();
                for (b, v) in row {
                    acc = acc.add(&crossed.mul(b, &partial(v)));
                }
                let expected = if i == j { BundleElem::one() } else { BundleElem::zero() };
                let defect = acc.sub(&expected);
                if !defect.is_zero() {
                    defects.push(((i + 1, j + 1), defect));
                }
            }
        }
        if defects.is_empty() {
            Ok(())
        } else {
            Err(defects)
        }
    }
}

/// Solves for a completeness witness with `v`-elements drawn from the given
/// monomial candidates and `b`-coefficients in a bounded degree box at
/// coaction weights `±1`.
pub fn solve_completeness_witness(
    crossed: &Crossed,
    partials: [&dyn Fn(&BaseElem) -> BundleElem; 2],
    v_candidates: &[i64],
    degree_box: i64,
) -> Result<CompletenessWitness, WitnessError> {
    // Unknowns: for each v-candidate k, weight σ ∈ {-1, +1}, x-degree d:
    // coefficient of (x^d ⊗ U^σ) in b_k. Both frame rows share the layout.
    let mut unknowns = Vec::new();
    for &k in v_candidates {
        for &sigma in &[-1i64, 1] {
            for d in -degree_box..=degree_box {
                unknowns.push((k, sigma, d));
            }
        }
    }
    let partial_values: Vec<[BundleElem; 2]> = v_candidates
        .iter()
        .map(|&k| {
            let v = BaseElem::x_pow(k);
            [partials[0](&v), partials[1](&v)]
        })
        .collect();

    // Output monomials of b · ∂_j(v): index them for the equation matrix.
    let mut coords: BTreeMap<(usize, i64, i64), usize> = BTreeMap::new();
    let mut columns: Vec<BTreeMap<(usize, i64, i64), Scalar>> = Vec::new();
    for &(k, sigma, d) in &unknowns {
        let basis = BundleElem::embed(sigma, BaseElem::x_pow(d));
        let ci = v_candidates.iter().position(|&x| x == k).unwrap();
        let mut column = BTreeMap::new();
        for (j, pv) in partial_values[ci].iter().enumerate() {
            let product = crossed.mul(&basis, pv);
            for (m, f) in product.components() {
                for (deg, c) in f.terms() {
                    let key = (j, *m, *deg);
                    let next = coords.len();
                    coords.entry(key).or_insert(next);
                    let entry = column.entry(key).or_insert_with(Scalar::zero);
                    *entry += c;
                }
            }
        }
        columns.push(column);
    }

    let nrows = coords.len();
    let mut matrix = Matrix::zero(nrows, unknowns.len());
    for (ci, column) in columns.iter().enumerate() {
        for (key, c) in column {
            matrix.set(coords[key], ci, c.clone());
        }
    }

    let solve_row = |i: usize| -> Option<Vec<(BundleElem, BaseElem)>> {
        let mut rhs = vec![Scalar::zero(); nrows];
        // δ_ij at the constant monomial of the ∂_j-equation
        if let Some(&r) = coords.get(&(i, 0, 0)) {
            rhs[r] = Scalar::one();
        } else {
            return None;
        }
        let x = matrix.solve(&rhs)?;
        let mut per_candidate: BTreeMap<i64, BundleElem> = BTreeMap::new();
        for (ui, &(k, sigma, d)) in unknowns.iter().enumerate() {
            if x[ui].is_zero() {
                continue;
            }
            let term = BundleElem::embed(sigma, BaseElem::monomial(d, x[ui].clone()));
            let entry = per_candidate.entry(k).or_default();
            *entry = entry.add(&term);
        }
        Some(
            per_candidate
                .into_iter()
                .filter(|(_, b)| !b.is_zero())
                .map(|(k, b)| (b, BaseElem::x_pow(k)))
                .collect(),
        )
    };

    let row1 = solve_row(0).ok_or(WitnessError::NoSolution(degree_box))?;
    let row2 = solve_row(1).ok_or(WitnessError::NoSolution(degree_box))?;
    let witness = CompletenessWitness { rows: [row1, row2] };
    witness
        .verify(crossed, partials)
        .map_err(|_| WitnessError::NoSolution(degree_box))?;
    Ok(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::Sampler;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn model2() -> ModelConfig {
        build_model(q(2, 1), BaseElem::x_pow(1), 6).unwrap()
    }

    #[test]
    fn twisted_product_on_generators() {
        let m = model2();
        // (x⊗U)(x⊗U) = x·γ(x) ⊗ U² = 2x² ⊗ U²
        let a = BundleElem::embed(1, BaseElem::x_pow(1));
        let prod = m.crossed.mul(&a, &a);
        assert_eq!(prod, BundleElem::embed(2, BaseElem::monomial(2, Scalar::from_int(2))));
        // grade 0 embeds V multiplicatively
        let f = BundleElem::from_base(BaseElem::x_pow(2));
        let g = BundleElem::from_base(BaseElem::x_pow(-1));
        assert_eq!(m.crossed.mul(&f, &g), BundleElem::from_base(BaseElem::x_pow(1)));
    }

    #[test]
    fn conjugation_by_u_is_gamma() {
        let m = model2();
        let u = BundleElem::u_pow(1);
        let ubar = BundleElem::u_pow(-1);
        let sampler = Sampler::new(7);
        let mut rng = sampler.rng();
        for _ in 0..8 {
            let f = sampler.base_elem(&mut rng);
            let lhs = m.crossed.mul(&m.crossed.mul(&u, &BundleElem::from_base(f.clone())), &ubar);
            assert_eq!(lhs, BundleElem::from_base(m.crossed.gamma.apply(&f)));
        }
    }

    #[test]
    fn star_on_generators() {
        let m = model2();
        // (x⊗U)* = γ^{-1}(x) ⊗ U^{-1} = (1/2)x ⊗ U^{-1}
        let a = BundleElem::embed(1, BaseElem::x_pow(1));
        assert_eq!(
            m.crossed.star(&a),
            BundleElem::embed(-1, BaseElem::monomial(1, Scalar::from_ratio(1, 2)))
        );
    }

    #[test]
    fn star_involutive_antimultiplicative() {
        let m = model2();
        let sampler = Sampler::new(11);
        let mut rng = sampler.rng();
        for _ in 0..12 {
            let a = sampler.bundle_elem(&mut rng);
            let b = sampler.bundle_elem(&mut rng);
            assert_eq!(m.crossed.star(&m.crossed.star(&a)), a);
            assert_eq!(
                m.crossed.star(&m.crossed.mul(&a, &b)),
                m.crossed.mul(&m.crossed.star(&b), &m.crossed.star(&a))
            );
        }
    }

    #[test]
    fn product_associative_with_unit() {
        let m = model2();
        let sampler = Sampler::new(13);
        let mut rng = sampler.rng();
        for _ in 0..12 {
            let a = sampler.bundle_elem(&mut rng);
            let b = sampler.bundle_elem(&mut rng);
            let c = sampler.bundle_elem(&mut rng);
            assert_eq!(
                m.crossed.mul(&m.crossed.mul(&a, &b), &c),
                m.crossed.mul(&a, &m.crossed.mul(&b, &c))
            );
            assert_eq!(m.crossed.mul(&a, &BundleElem::one()), a);
            assert_eq!(m.crossed.mul(&BundleElem::one(), &a), a);
        }
    }

    #[test]
    fn coaction_laws() {
        let m = model2();
        let sampler = Sampler::new(17);
        let mut rng = sampler.rng();
        // F(x ⊗ U^3) = (x ⊗ U^3) ⊗ U^3
        let a = BundleElem::embed(3, BaseElem::x_pow(1));
        let fa = m.crossed.coaction(&a);
        assert_eq!(fa.legs.len(), 1);
        assert_eq!(fa.legs[&3], a);
        for _ in 0..10 {
            let a = sampler.bundle_elem(&mut rng);
            let b = sampler.bundle_elem(&mut rng);
            // (id ⊗ ε)F = id
            assert_eq!(m.crossed.coaction(&a).counit_leg(), a);
            // F(ab) = F(a)F(b), computed leg-wise
            let fab = m.crossed.coaction(&m.crossed.mul(&a, &b));
            let mut prod = BundleTensorA::default();
            for (k1, x) in &m.crossed.coaction(&a).legs {
                for (k2, y) in &m.crossed.coaction(&b).legs {
                    let entry = prod.legs.entry(k1 + k2).or_default();
                    *entry = entry.add(&m.crossed.mul(x, y));
                }
            }
            prod.legs.retain(|_, v| !v.is_zero());
            assert_eq!(fab, prod);
            // coassociativity: each leg of F(a) is homogeneous of its key
            for (k, leg) in &m.crossed.coaction(&a).legs {
                assert!(leg.is_homogeneous_of_weight(*k));
            }
            // *-homomorphism: F(a*) legs are the starred legs at -k
            let fstar = m.crossed.coaction(&m.crossed.star(&a));
            for (k, leg) in &m.crossed.coaction(&a).legs {
                assert_eq!(fstar.legs[&-k], m.crossed.star(leg));
            }
        }
    }

    #[test]
    fn model_derived_data() {
        let m = model2();
        // β = -γ^{-1}(x) = -(1/2)x,  v = (1/t² - 1)x² = -(3/4)x², γ(v) = 4v
        assert_eq!(m.beta, BaseElem::monomial(1, Scalar::from_ratio(-1, 2)));
        assert_eq!(m.v, BaseElem::monomial(2, Scalar::from_ratio(-3, 4)));
        assert_eq!(m.tprime, Some(q(4, 1)));
        assert!(m.beta_relation_holds());
    }

    #[test]
    fn flat_model_has_zero_v() {
        let m = build_model(q(2, 1), BaseElem::one(), 6).unwrap();
        assert_eq!(m.beta, -&BaseElem::one());
        assert!(m.v.is_zero());
        assert_eq!(m.tprime, None);
    }

    #[test]
    fn model_rejects_bad_input() {
        assert!(build_model(q(1, 1), BaseElem::x_pow(1), 6).is_err());
        assert!(build_model(q(2, 1), BaseElem::zero(), 6).is_err());
        assert!(build_model(q(2, 1), BaseElem::x_pow(1), 1).is_err());
    }

    #[test]
    fn mixed_alpha_v_has_three_degrees() {
        let m = build_model(q(2, 1), &BaseElem::x_pow(1) + &BaseElem::x_pow(2), 6).unwrap();
        let degs: Vec<i64> = m.v.degrees().collect();
        assert_eq!(degs, vec![2, 3, 4]);
        assert_eq!(m.tprime, None);
    }
}
