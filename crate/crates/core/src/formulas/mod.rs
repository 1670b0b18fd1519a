//! Congruence formulas and the checks built on them.

pub mod decompose;
pub mod dpsc;
pub mod phi;
pub mod psi;
pub mod theta;

pub use decompose::{decompose_commutator, CommutatorDecomposition};
pub use dpsc::{verify_dpsc, DpscReport};
pub use phi::{build_phi, eval_phi, phi_defines_check, PhiFormula, PhiVerdict};
pub use psi::{psi_image, psi_search, ucs_descent, PsiConfig, PsiOutcome, PsiStrategy};
pub use theta::{render_theta, theta_semantic_check, FirstOrderRendering, Truth};
