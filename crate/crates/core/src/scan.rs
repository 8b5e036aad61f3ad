//! Classification maps over a grid in coupling space.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Convention, Couplings, ModelError, SystemSpec};
use crate::resonance::{classify, detect_commensurability, Category, Tolerances};
use crate::state::PhaseState;

pub const DEFAULT_CELL_CAP: usize = 1_000_000;
/// Commensurability tolerance used on scans so that rational loci have
/// visible width at finite grid resolution.
pub const SCAN_COMMENSURABILITY_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScanError {
    #[error("grid has {cells} cells, above the cap of {cap}")]
    CellCap { cells: usize, cap: usize },
    #[error("expected {expected} axes (one per coupling), found {found}")]
    AxisCount { expected: usize, found: usize },
    #[error("axis {axis}: {message}")]
    BadAxis { axis: usize, message: String },
    #[error("probe state: {0}")]
    BadProbe(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub resolution: usize,
}

impl Axis {
    pub fn value(&self, i: usize) -> f64 {
        self.min + (self.max - self.min) * i as f64 / (self.resolution - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Probe {
    /// `trials` random states per cell, coordinates uniform in `[-1, 1]`.
    RandomSeeded { seed: u64, trials: usize },
    /// One fixed state used in every cell.
    FixedState {
        positions: Vec<[f64; 2]>,
        momenta: Vec<[f64; 2]>,
    },
}

fn default_mass() -> f64 {
    1.0
}

fn default_cell_cap() -> usize {
    DEFAULT_CELL_CAP
}

pub fn scan_tolerances() -> Tolerances {
    Tolerances {
        commensurability_rel: SCAN_COMMENSURABILITY_TOL,
        ..Tolerances::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanRequest {
    pub n: usize,
    #[serde(default = "listed_once")]
    pub convention: Convention,
    #[serde(default = "default_mass")]
    pub mass: f64,
    #[serde(default = "default_mass")]
    pub omega: f64,
    /// One axis per coupling `κ_1..κ_⌊n/2⌋`.
    pub axes: Vec<Axis>,
    pub probe: Probe,
    #[serde(default = "scan_tolerances")]
    pub tolerances: Tolerances,
    #[serde(default = "default_cell_cap")]
    pub cell_cap: usize,
}

fn listed_once() -> Convention {
    Convention::ListedOnce
}

/// Frequency structure of all internal sectors of one cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileSummary {
    pub stable: bool,
    pub commensurate: bool,
    /// Primitive ratios over all internal sectors when stable and commensurate.
    pub integer_ratios: Vec<u64>,
    pub lambdas: Vec<f64>,
    pub degeneracy_groups: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellRecord {
    pub index: usize,
    pub couplings: Vec<f64>,
    /// Most frequent category over the probe trials; `None` if no trial
    /// produced a classification.
    pub category: Option<Category>,
    /// Trial counts per category, in [`Category::ALL`] order.
    pub counts: [usize; 5],
    /// Trials that could not be classified (for example no internal motion).
    pub failed: usize,
    pub profile: ProfileSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub request: ScanRequest,
    pub cells: Vec<CellRecord>,
}

impl ScanRequest {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn cell_count(&self) -> usize {
        self.axes.iter().map(|a| a.resolution).product()
    }

    pub fn validate(&self) -> Result<(), ScanError> {
        let probe_spec = SystemSpec::new(
            self.n,
            self.mass,
            self.omega,
            Couplings::Float(vec![0.0; self.n / 2]),
            self.convention,
        );
        probe_spec?;
        if self.axes.len() != self.n / 2 {
            return Err(ScanError::AxisCount {
                expected: self.n / 2,
                found: self.axes.len(),
            });
        }
        for (i, a) in self.axes.iter().enumerate() {
            let bad = |message: &str| ScanError::BadAxis {
                axis: i + 1,
                message: message.into(),
            };
            if !(a.min.is_finite() && a.max.is_finite()) {
                return Err(bad("bounds must be finite"));
            }
            if a.resolution < 2 {
                return Err(bad("resolution must be at least 2"));
            }
        }
        let cells = self
            .axes
            .iter()
            .try_fold(1usize, |acc, a| acc.checked_mul(a.resolution))
            .unwrap_or(usize::MAX);
        if cells > self.cell_cap {
            return Err(ScanError::CellCap {
                cells,
                cap: self.cell_cap,
            });
        }
        match &self.probe {
            Probe::RandomSeeded { trials, .. } if *trials == 0 => {
                return Err(ScanError::BadProbe("trials must be at least 1".into()))
            }
            Probe::FixedState { positions, momenta } => {
                let s = PhaseState::from_pairs(0.0, positions, momenta).map_err(|e| ScanError::BadProbe(e.to_string()))?;
                s.check_n(self.n).map_err(|e| ScanError::BadProbe(e.to_string()))?;
            }
            _ => {}
        }
        Ok(())
    }

    /// Coupling values of cell `index`; the last axis varies fastest.
    pub fn cell_couplings(&self, index: usize) -> Vec<f64> {
        let mut rest = index;
        let mut out = vec![0.0; self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            out[k] = a.value(rest % a.resolution);
            rest /= a.resolution;
        }
        out
    }
}

/// Samples per period used on scans unless overridden: the least multiple of
/// `lcm(1..=n)` that is at least 360. Coarser than the single-run default but
/// every block shift still lands on the grid.
pub fn scan_samples(n: usize) -> usize {
    use num_integer::Integer;
    let l = (1..=n).fold(1usize, |acc, b| acc.lcm(&b));
    l * 360usize.div_ceil(l)
}

/// Deterministic random state for `(seed, cell, trial)`.
pub fn probe_state(n: usize, seed: u64, cell: usize, trial: usize) -> PhaseState {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(cell as u64).to_le_bytes());
    key[16..24].copy_from_slice(&(trial as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    let mut pair = || [rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)];
    let positions: Vec<[f64; 2]> = (0..n).map(|_| pair()).collect();
    let momenta: Vec<[f64; 2]> = (0..n).map(|_| pair()).collect();
    PhaseState::from_pairs(0.0, &positions, &momenta).expect("finite random state")
}

fn summarize(spec: &SystemSpec, tol: &Tolerances) -> ProfileSummary {
    let spectrum = spec.spectrum();
    let stable = spectrum.is_stable();
    let freqs: Vec<f64> = spectrum.internal().iter().filter_map(|s| s.frequency).collect();
    let profile = detect_commensurability(&freqs, tol.max_denominator, tol.commensurability_rel);
    let commensurate = stable && profile.commensurate;
    ProfileSummary {
        stable,
        commensurate,
        integer_ratios: if commensurate { profile.integer_ratios } else { Vec::new() },
        lambdas: spectrum.internal().iter().map(|s| s.lambda).collect(),
        degeneracy_groups: spectrum.degeneracy_groups.len(),
    }
}

fn modal(counts: &[usize; 5]) -> Option<Category> {
    let best = *counts.iter().max()?;
    (best > 0).then(|| Category::ALL[counts.iter().position(|&c| c == best).expect("max exists")])
}

fn evaluate(request: &ScanRequest, index: usize) -> CellRecord {
    let couplings = request.cell_couplings(index);
    let spec = SystemSpec {
        n: request.n,
        mass: request.mass,
        omega: request.omega,
        couplings: Couplings::Float(couplings.clone()),
        convention: request.convention,
    }
    .to_convention(Convention::ListedOnce);
    let tol = &Tolerances {
        samples: request.tolerances.samples.or(Some(scan_samples(request.n))),
        ..request.tolerances
    };
    let states: Vec<PhaseState> = match &request.probe {
        Probe::RandomSeeded { seed, trials } => (0..*trials).map(|t| probe_state(request.n, *seed, index, t)).collect(),
        Probe::FixedState { positions, momenta } => {
            vec![PhaseState::from_pairs(0.0, positions, momenta).expect("validated probe")]
        }
    };
    let mut counts = [0usize; 5];
    let mut failed = 0;
    for s in &states {
        match classify(&spec, s, tol) {
            Ok(c) => counts[Category::ALL.iter().position(|&k| k == c.category).expect("known category")] += 1,
            Err(_) => failed += 1,
        }
    }
    CellRecord {
        index,
        couplings,
        category: modal(&counts),
        counts,
        failed,
        profile: summarize(&spec, tol),
    }
}

/// Classifies every cell of the grid. Cells are evaluated in parallel and
/// collected in index order, so the result does not depend on scheduling.
pub fn run_scan(request: &ScanRequest) -> Result<ScanResult, ScanError> {
    request.validate()?;
    let cells = (0..request.cell_count())
        .into_par_iter()
        .map(|i| evaluate(request, i))
        .collect();
    Ok(ScanResult {
        request: request.clone(),
        cells,
    })
}

/// Sequential reference evaluation of the same grid.
pub fn run_scan_sequential(request: &ScanRequest) -> Result<ScanResult, ScanError> {
    request.validate()?;
    let cells = (0..request.cell_count()).map(|i| evaluate(request, i)).collect();
    Ok(ScanResult {
        request: request.clone(),
        cells,
    })
}
