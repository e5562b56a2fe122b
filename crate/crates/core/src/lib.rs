//! Extendable continuous-time branching processes with possibly defective
//! offspring laws.

pub mod divdiff;
pub mod error;
pub mod law;
pub mod limits;
pub mod numeric;
pub mod profile;
pub mod psi;
pub mod sim;
pub mod transition;
pub mod verify;

pub use divdiff::{tail_gf, Analytic};
pub use error::{Error, Result};
pub use law::{LawKind, LawSpec, OffspringLaw};
pub use profile::{fixed_points, phi, profile, ExtendableProfile, Regime};
pub use psi::{Integrability, PsiKernel, PsiMode};
pub use transition::{
    absorption, f_closed, f_implicit, f_ode, f_ode_with_tol, tail_gf_of_f, Absorption, FtAnalytic,
    Method, TransitionResult, ODE_RTOL,
};
