//! Seeded random elements for the law checks. All sampling is deterministic
//! in the seed, so failing witnesses reproduce across runs.

use crate::base::BaseElem;
use crate::bundle::BundleElem;
use crate::horizontal::HorForm;
use crate::scalar::Scalar;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct Sampler {
    seed: u64,
    /// x-degree range for base coefficients.
    pub base_degree: i64,
    /// coaction weight range for bundle elements.
    pub weight: i64,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            seed,
            base_degree: 3,
            weight: 2,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub fn scalar(&self, rng: &mut ChaCha8Rng) -> Scalar {
        let num = rng.gen_range(-5i64..=5);
        let den = rng.gen_range(1i64..=3);
        let inum = rng.gen_range(-5i64..=5);
        let iden = rng.gen_range(1i64..=3);
        &Scalar::from_ratio(num, den) + &(&Scalar::i() * &Scalar::from_ratio(inum, iden))
    }

    pub fn nonzero_scalar(&self, rng: &mut ChaCha8Rng) -> Scalar {
        loop {
            let s = self.scalar(rng);
            if !s.is_zero() {
                return s;
            }
        }
    }

    pub fn base_elem(&self, rng: &mut ChaCha8Rng) -> BaseElem {
        let nterms = rng.gen_range(1..=3);
        let mut out = BaseElem::zero();
        for _ in 0..nterms {
            let d = rng.gen_range(-self.base_degree..=self.base_degree);
            out = &out + &BaseElem::monomial(d, self.scalar(rng));
        }
        out
    }

    pub fn bundle_elem(&self, rng: &mut ChaCha8Rng) -> BundleElem {
        let nterms = rng.gen_range(1..=3);
        let mut out = BundleElem::zero();
        for _ in 0..nterms {
            let m = rng.gen_range(-self.weight..=self.weight);
            out = out.add(&BundleElem::embed(m, self.base_elem(rng)));
        }
        out
    }

    /// Homogeneous bundle element of the given coaction weight.
    pub fn bundle_elem_of_weight(&self, rng: &mut ChaCha8Rng, m: i64) -> BundleElem {
        BundleElem::embed(m, self.base_elem(rng))
    }

    pub fn hor_form(&self, rng: &mut ChaCha8Rng) -> HorForm {
        let mut out = HorForm::zero();
        for idx in 0..4usize {
            if rng.gen_bool(0.6) {
                out = out.add(&HorForm::component(idx, self.bundle_elem(rng)));
            }
        }
        if out.is_zero() {
            out = HorForm::from_bundle(self.bundle_elem(rng));
        }
        out
    }

    /// A horizontal form of pure exterior degree.
    pub fn hor_form_of_degree(&self, rng: &mut ChaCha8Rng, degree: usize) -> HorForm {
        match degree {
            0 => HorForm::from_bundle(self.bundle_elem(rng)),
            1 => {
                let a = HorForm::component(1, self.bundle_elem(rng));
                let b = HorForm::component(2, self.bundle_elem(rng));
                a.add(&b)
            }
            _ => HorForm::component(3, self.bundle_elem(rng)),
        }
    }
}
