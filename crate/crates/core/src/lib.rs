//! Euclidean Jordan algebras (ℝⁿ, real symmetric matrices, Jordan spin
//! factors and their direct products), their spectral theory, and numerical
//! verification of commutation principles for spectral and weakly spectral
//! sets.

pub mod algebra;
pub mod commute;
mod components;
pub mod cones;
pub mod error;
pub mod harness;
pub mod orbits;
pub mod par;
pub mod random;
pub mod search;
pub mod sets;
pub mod spectral;

pub use algebra::{inner, jordan_product, lmap, unit, Algebra, AlgebraKind, Element, LinearMap};
pub use commute::{common_frame, commutator_norm, operator_commute, strongly_operator_commute};
pub use cones::{
    finite_set_subdifferential, idempotent_normal_cone_check, normal_cone_sample_convex, normal_cone_test,
    subgradient_test, Halfspace, SubgradientCertificate,
};
pub use error::{EjaError, Result};
pub use harness::{run_suite, SuiteConfig, SuiteId, VerificationReport};
pub use orbits::{
    derivation_from_pair, exp_derivation, is_automorphism, sample_orbit, sample_restricted_orbit, Derivation,
};
pub use par::Parallelism;
pub use sets::{set_contains, EigenvalueRegion, RegionKind, SetSpec};
pub use spectral::{
    eigenvalue_map, eval_spectral_function, in_symmetric_cone, project_symmetric_cone, spectral_decompose,
    trace_inequality_gap, SpectralDecomposition,
};
