//! Numerical laboratory for g-natural paracontact metric structures on the
//! unit tangent sphere bundle `T_1M` of a locally symmetric Riemannian manifold.
//!
//! Everything is evaluated at a single point `(x, u)` of `T_1M` in the adapted
//! frame `{u^h, e_1^h, e_1^t, ..., e_n^h, e_n^t}`, where `{e_0 = u, e_1, ..., e_n}`
//! is orthonormal at `x`.
//!
//! ```
//! use paracontact::{build_structure, CurvatureModel, Flavor};
//!
//! let s = build_structure(1.0, 0.0, -2.0, Flavor::Paracontact).unwrap();
//! assert_eq!(s.params().d, 5.0);
//! let hyperbolic = CurvatureModel::constant(3, -1.0).unwrap();
//! let report = paracontact::kappa_mu(&s, -1.0);
//! assert!((report.kappa + 1.0).abs() < 1e-12);
//! # let _ = hyperbolic;
//! ```

pub mod classify;
pub mod curvature_models;
pub mod curvature_t1m;
pub mod deform;
pub mod error;
pub mod frames;
pub mod gnatural;
pub mod paracontact;

pub use classify::{
    classify_structure, constant_phi_sectional_check, flat_base_families, h_squared_residual,
    kappa_mu, parasasakian_residual, ConstantPhiSectional, KappaMuReport, KappaMuSource,
    StructureClass, StructureKind,
};
pub use curvature_models::{CurvatureModel, ModelKind};
pub use curvature_t1m::{assemble_r4, phi_sectional_profile, rcurv, sectional, CurvatureT1M};
pub use deform::{
    contact_kappa_mu, d_homothetic, d_homothetic_tensors_check, deform1, deform2, normalize_phi,
};
pub use error::{GeometryError, Result};
pub use frames::{
    base_inner, gram_matrix, t1m_inner, tangential_lift, BaseVector, Frame, T1MVector,
};
pub use gnatural::{
    t1m_signature, tm_induced_class, tm_signature, unit_normal, MetricParams, SignatureKind,
    SignatureReport, TMCoefficients, TmInducedClass,
};
pub use paracontact::{build_structure, Flavor, ParacontactStructure};

/// Default relative tolerance for comparisons.
pub const REL_TOL: f64 = 1e-9;
/// Absolute tolerance for comparisons against zero.
pub const ABS_TOL: f64 = 1e-12;

/// `|x - y| <= max(ABS_TOL, REL_TOL * max(|x|, |y|))`.
pub fn approx_eq(x: f64, y: f64) -> bool {
    (x - y).abs() <= ABS_TOL.max(REL_TOL * x.abs().max(y.abs()))
}
