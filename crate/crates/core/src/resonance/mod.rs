//! Resonance detection, phase matching, classification and coupling design.

mod classify;
mod commensurability;
mod design;
mod phase;

use thiserror::Error;

pub use classify::{
    active_profile, classify, default_time_step, Category, Classification, ClassifyError, Tolerances,
};
pub use commensurability::{
    best_rational, detect_commensurability, ResonanceProfile, DEFAULT_COMMENSURABILITY_TOL,
    DEFAULT_MAX_DENOMINATOR,
};
pub use design::{design_couplings, CouplingFamily, DesignError};
pub use phase::{merge_degenerate, phase_matching, phase_matching_integer, MergedGroup, PhaseMatch};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResonanceError {
    #[error("frequencies are not commensurate")]
    NotCommensurate,
    #[error("sector {0} has no integer ratio in the profile")]
    MissingSector(usize),
}
