//! End-to-end classification of a motion from couplings and initial data.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::commensurability::{detect_commensurability, ResonanceProfile, DEFAULT_COMMENSURABILITY_TOL, DEFAULT_MAX_DENOMINATOR};
use super::phase::{merge_degenerate, phase_matching};
use crate::model::{Branch, Spectrum, SystemSpec};
use crate::modes::{active_sectors, fourier_decompose, DEFAULT_ACTIVE_REL_TOL};
use crate::state::{PhaseState, StateError};
use crate::traces::{default_samples, partition, sample_period, TraceError, TraceReport, DEFAULT_EPS_REL, PRINTED_EPS_REL};

/// Steps per reference period for the default integration step.
const STEPS_PER_PERIOD: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative sector energy below which a sector is inactive.
    pub active_rel: f64,
    pub max_denominator: u64,
    /// Relative error allowed when matching frequency ratios to fractions.
    pub commensurability_rel: f64,
    /// Trace residual tolerance relative to the configuration diameter.
    pub eps_rel: f64,
    /// Samples per period for trace analysis; `None` selects [`default_samples`].
    pub samples: Option<usize>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            active_rel: DEFAULT_ACTIVE_REL_TOL,
            max_denominator: DEFAULT_MAX_DENOMINATOR,
            commensurability_rel: DEFAULT_COMMENSURABILITY_TOL,
            eps_rel: DEFAULT_EPS_REL,
            samples: None,
        }
    }
}

impl Tolerances {
    /// Defaults with the trace tolerance relaxed for data printed to a few decimals.
    pub fn printed() -> Self {
        Tolerances {
            eps_rel: PRINTED_EPS_REL,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    Unbounded,
    Quasiperiodic,
    PeriodicNotEquivariant,
    EquivariantFragmented,
    EquivariantChoreography,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Unbounded,
        Category::Quasiperiodic,
        Category::PeriodicNotEquivariant,
        Category::EquivariantFragmented,
        Category::EquivariantChoreography,
    ];

    pub fn is_equivariant(self) -> bool {
        matches!(self, Category::EquivariantFragmented | Category::EquivariantChoreography)
    }

    pub fn name(self) -> &'static str {
        match self {
            Category::Unbounded => "Unbounded",
            Category::Quasiperiodic => "Quasiperiodic",
            Category::PeriodicNotEquivariant => "PeriodicNotEquivariant",
            Category::EquivariantFragmented => "EquivariantFragmented",
            Category::EquivariantChoreography => "EquivariantChoreography",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub category: Category,
    pub active: BTreeSet<usize>,
    pub merged_groups: Vec<Vec<usize>>,
    /// Active sectors that do not oscillate.
    pub unbounded_sectors: BTreeSet<usize>,
    pub profile: Option<ResonanceProfile>,
    pub period: Option<f64>,
    pub witness_shift: Option<usize>,
    pub failing_sectors: BTreeSet<usize>,
    /// Label each merged group matched with at the witness shift.
    pub labels_used: Vec<Option<usize>>,
    /// Advisory: all active sectors share one frequency.
    pub effective_single_sector: bool,
    pub trace_report: Option<TraceReport>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("no internal motion: every particle moves with the center of mass")]
    NoInternalMotion,
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Trace(#[from] TraceError),
}

/// Active sectors of `initial` (center of mass removed) and the
/// commensurability profile of the oscillatory ones.
pub fn active_profile(spec: &SystemSpec, initial: &PhaseState, tol: &Tolerances) -> Result<(Spectrum, BTreeSet<usize>, ResonanceProfile), StateError> {
    initial.check_n(spec.n)?;
    let spectrum = spec.spectrum();
    let modes = fourier_decompose(&initial.without_center_of_mass());
    let active = active_sectors(&modes, &spectrum, spec.mass, tol.active_rel);
    let oscillating: Vec<usize> = active
        .iter()
        .copied()
        .filter(|&l| spectrum.sector(l).branch == Branch::Oscillatory)
        .collect();
    let freqs: Vec<f64> = oscillating.iter().map(|&l| spectrum.sector(l).frequency.unwrap_or(0.0)).collect();
    let profile = detect_commensurability(&freqs, tol.max_denominator, tol.commensurability_rel).with_sectors(oscillating);
    Ok((spectrum, active, profile))
}

/// `T_min / 10⁴` for a commensurate motion, else `2π / (10⁴ · max Ω)`.
/// `None` when no sector oscillates.
pub fn default_time_step(spec: &SystemSpec, initial: &PhaseState) -> Result<Option<f64>, StateError> {
    let (spectrum, _, profile) = active_profile(spec, initial, &Tolerances::default())?;
    if let Some(t) = profile.t_min {
        return Ok(Some(t / STEPS_PER_PERIOD));
    }
    let w = spectrum.max_frequency();
    Ok((w > 0.0).then(|| 2.0 * std::f64::consts::PI / (STEPS_PER_PERIOD * w)))
}

pub fn classify(spec: &SystemSpec, initial: &PhaseState, tol: &Tolerances) -> Result<Classification, ClassifyError> {
    let (spectrum, active, profile) = active_profile(spec, initial, tol)?;
    if active.is_empty() {
        return Err(ClassifyError::NoInternalMotion);
    }
    let merged = merge_degenerate(&spectrum, &active);
    let mut out = Classification {
        category: Category::Unbounded,
        effective_single_sector: merged.len() == 1,
        active: active.clone(),
        merged_groups: merged.clone(),
        unbounded_sectors: active
            .iter()
            .copied()
            .filter(|&l| spectrum.sector(l).branch != Branch::Oscillatory)
            .collect(),
        profile: None,
        period: None,
        witness_shift: None,
        failing_sectors: BTreeSet::new(),
        labels_used: Vec::new(),
        trace_report: None,
    };
    if !out.unbounded_sectors.is_empty() {
        return Ok(out);
    }
    out.profile = Some(profile.clone());
    if !profile.commensurate {
        out.category = Category::Quasiperiodic;
        return Ok(out);
    }
    let pm = phase_matching(&profile, &merged, spec.n).expect("profile is commensurate and covers the active set");
    out.labels_used = pm.labels_used.clone();
    if !pm.pass {
        out.category = Category::PeriodicNotEquivariant;
        out.period = profile.t_min;
        out.failing_sectors = pm.failing_sectors;
        return Ok(out);
    }
    let period = pm.period.expect("witness implies period");
    let samples = tol.samples.unwrap_or_else(|| default_samples(spec.n));
    let traj = sample_period(spec, initial, period, samples)?;
    let report = partition(&traj, period, tol.eps_rel)?;
    out.category = if report.single_trace {
        Category::EquivariantChoreography
    } else {
        Category::EquivariantFragmented
    };
    out.period = Some(period);
    out.witness_shift = pm.witness_shift;
    out.trace_report = Some(report);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Convention, Couplings};

    fn spec(n: usize, kappa: Vec<f64>) -> SystemSpec {
        SystemSpec::new(n, 1.0, 1.0, Couplings::Float(kappa), Convention::ListedOnce).unwrap()
    }

    fn generic_state(n: usize) -> PhaseState {
        let pos: Vec<[f64; 2]> = (0..n).map(|i| [(1.3 * i as f64).sin(), (0.7 * (i * i) as f64).cos()]).collect();
        let mom: Vec<[f64; 2]> = (0..n).map(|i| [(2.1 * i as f64).cos(), (0.4 * i as f64 + 0.3).sin()]).collect();
        PhaseState::from_pairs(0.0, &pos, &mom).unwrap()
    }

    #[test]
    fn incommensurate_is_quasiperiodic() {
        // λ1 = 2κ1 + 2κ2 = 1, λ2 = 4κ1 = 2: ratio √2.
        let c = classify(&spec(4, vec![0.5, 0.0]), &generic_state(4), &Tolerances::default()).unwrap();
        assert_eq!(c.category, Category::Quasiperiodic);
        assert!(c.witness_shift.is_none() && c.period.is_none());
    }

    #[test]
    fn hyperbolic_is_unbounded() {
        let c = classify(&spec(4, vec![1.0, -2.0]), &generic_state(4), &Tolerances::default()).unwrap();
        assert_eq!(c.category, Category::Unbounded);
        assert!(c.unbounded_sectors.contains(&1));
    }

    #[test]
    fn free_particles_are_unbounded() {
        let c = classify(&spec(5, vec![0.0, 0.0]), &generic_state(5), &Tolerances::default()).unwrap();
        assert_eq!(c.category, Category::Unbounded);
    }

    #[test]
    fn one_to_four_is_not_equivariant() {
        // λ1 = 2κ1 + 2κ2 = 1, λ2 = 4κ1 = 16.
        let c = classify(&spec(4, vec![4.0, -3.5]), &generic_state(4), &Tolerances::default()).unwrap();
        assert_eq!(c.category, Category::PeriodicNotEquivariant);
        assert_eq!(c.failing_sectors, BTreeSet::from([2]));
        assert!(c.witness_shift.is_none());
        assert!((c.period.unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn rigid_translation_has_no_internal_motion() {
        let s = PhaseState::from_pairs(0.0, &[[1.0, 1.0]; 3], &[[0.5, 0.0]; 3]).unwrap();
        assert_eq!(classify(&spec(3, vec![1.0]), &s, &Tolerances::default()), Err(ClassifyError::NoInternalMotion));
    }

    #[test]
    fn default_step_uses_minimal_period() {
        let dt = default_time_step(&spec(4, vec![1.0, -0.5]), &generic_state(4)).unwrap().unwrap();
        assert!((dt - 2.0 * std::f64::consts::PI / 1e4).abs() < 1e-15);
        assert_eq!(default_time_step(&spec(3, vec![0.0]), &generic_state(3)).unwrap(), None);
    }
}
