//! Exact symbolic calculus on a framed quantum principal SO(2)-bundle.
//!
//! The total space is the crossed product `B = V ⊗ A` of a Laurent base
//! algebra `V = Q(i)[x, x⁻¹]` (with a scaling *-automorphism `γ`) by the
//! Hopf *-algebra `A` of SO(2). On top of it the crate builds horizontal
//! forms, a frame structure with its extension `∇`, the curvature-induced
//! first-order differential calculus on the group, preconnections with
//! their torsion, and the total calculus `vh_P` with the differential
//! `∂_D`. Every identity is checked by exact rational arithmetic: all
//! comparisons in this crate are structural equalities of canonical forms,
//! with zero tolerance.

pub mod base;
pub mod bundle;
pub mod connections;
pub mod fodc;
pub mod framing;
pub mod hopf;
pub mod horizontal;
pub mod linalg;
pub mod report;
pub mod sample;
pub mod scalar;
pub mod scenario;
pub mod verify;
pub mod vh;

pub use base::{BaseAutomorphism, BaseElem};
pub use bundle::{BundleElem, CompletenessWitness, Crossed, ModelConfig};
pub use connections::{Perturbation, Preconnection};
pub use fodc::FodcData;
pub use framing::{Derivation, FrameExtension, FrameStructure};
pub use hopf::GroupElem;
pub use horizontal::HorForm;
pub use scalar::Scalar;
pub use vh::VHForm;
