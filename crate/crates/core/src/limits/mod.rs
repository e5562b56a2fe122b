//! Limit laws: the linearising function `K` and the Yaglom law, termination
//! times of nearly critical families, the critical expansion and the
//! supercritical martingale limit.

pub mod critical;
pub mod koenigs;
pub mod termination;
pub mod wlimit;

pub use critical::{critical_expansion, CriticalExpansion};
pub use koenigs::{
    koenigs, koenigs_complex, survival_expansion, yaglom, SurvivalExpansion, YaglomLaw, YaglomTail,
};
pub use termination::{
    balance_constant, near_critical_consistency, near_critical_params, termination_limit, Builder,
    ConsistencyReport, FamilySpec, LimitShape, NearCriticalFamily, NearCriticalParams, NearRegime,
    TerminationLimit,
};
pub use wlimit::{w_transform, w_transform_classical, WTransform};
