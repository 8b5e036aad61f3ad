//! Dihedral-invariant quadratic n-body systems and their stiffness spectrum.
//!
//! The potential couples particle `i` to `i + k` (indices mod n) with strength
//! `κ_k` for `k = 1..=⌊n/2⌋`. Because the coupling pattern is circulant, the
//! stiffness form is diagonalised by the discrete Fourier transform and each
//! Fourier sector `ℓ` carries one eigenvalue `λ_ℓ`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact rational scalar used for couplings and eigenvalues when available.
pub type Exact = BigRational;

/// Relative size below which a floating eigenvalue is treated as a zero mode.
const NEUTRAL_REL_TOL: f64 = 1e-12;

/// Relative frequency tolerance for grouping degenerate sectors.
pub const DEGENERACY_REL_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("n = {0} is too small; at least 3 particles are required")]
    NTooSmall(usize),
    #[error("expected {expected} couplings for n = {n}, found {found}")]
    BadDimension {
        n: usize,
        expected: usize,
        found: usize,
    },
    #[error("{name} must be positive and finite, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error("coupling κ_{index} is not finite")]
    NonFiniteCoupling { index: usize },
}

/// How the opposite-vertex bond (`k = n/2`, even `n`) is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// Each opposite pair appears once in the potential.
    ListedOnce,
    /// The uniform double sum over `i` and `k`; opposite pairs appear twice.
    DoubleSum,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Convention::ListedOnce => f.write_str("listed-once"),
            Convention::DoubleSum => f.write_str("double-sum"),
        }
    }
}

/// Coupling vector `κ_1..κ_⌊n/2⌋`, optionally held as exact rationals.
#[derive(Debug, Clone, PartialEq)]
pub enum Couplings {
    Exact(Vec<Exact>),
    Float(Vec<f64>),
}

impl Couplings {
    pub fn exact_from_ratios(values: &[(i64, i64)]) -> Self {
        Couplings::Exact(
            values
                .iter()
                .map(|&(p, q)| Exact::new(BigInt::from(p), BigInt::from(q)))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        match self {
            Couplings::Exact(v) => v.len(),
            Couplings::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Couplings::Exact(_))
    }

    /// Coupling `κ_k` for 1-based `k`, as a float.
    pub fn get(&self, k: usize) -> f64 {
        match self {
            Couplings::Exact(v) => exact_to_f64(&v[k - 1]),
            Couplings::Float(v) => v[k - 1],
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        (1..=self.len()).map(|k| self.get(k)).collect()
    }

    pub fn as_exact(&self) -> Option<&[Exact]> {
        match self {
            Couplings::Exact(v) => Some(v),
            Couplings::Float(_) => None,
        }
    }

    /// Multiplies every coupling by a positive rational factor `num/den`.
    pub fn scaled(&self, num: i64, den: i64) -> Couplings {
        let factor = Exact::new(BigInt::from(num), BigInt::from(den));
        match self {
            Couplings::Exact(v) => Couplings::Exact(v.iter().map(|x| x * &factor).collect()),
            Couplings::Float(v) => {
                let f = exact_to_f64(&factor);
                Couplings::Float(v.iter().map(|x| x * f).collect())
            }
        }
    }

    /// Multiplies every coupling by a float factor; exact couplings become floats.
    pub fn scaled_f64(&self, factor: f64) -> Couplings {
        Couplings::Float(self.to_f64().into_iter().map(|x| x * factor).collect())
    }

    fn map_last(&self, num: i64, den: i64) -> Couplings {
        let mut out = self.clone();
        match &mut out {
            Couplings::Exact(v) => {
                if let Some(last) = v.last_mut() {
                    *last = &*last * Exact::new(BigInt::from(num), BigInt::from(den));
                }
            }
            Couplings::Float(v) => {
                if let Some(last) = v.last_mut() {
                    *last = *last * num as f64 / den as f64;
                }
            }
        }
        out
    }
}

impl fmt::Display for Couplings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = match self {
            Couplings::Exact(v) => v.iter().map(|x| x.to_string()).collect(),
            Couplings::Float(v) => v.iter().map(|x| x.to_string()).collect(),
        };
        write!(f, "({})", parts.join(", "))
    }
}

pub fn exact_to_f64(x: &Exact) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Parameters of a planar n-body system with dihedral quadratic couplings.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub n: usize,
    pub mass: f64,
    pub omega: f64,
    pub couplings: Couplings,
    pub convention: Convention,
}

impl SystemSpec {
    pub fn new(
        n: usize,
        mass: f64,
        omega: f64,
        couplings: Couplings,
        convention: Convention,
    ) -> Result<Self, ModelError> {
        validate_spec(SystemSpec {
            n,
            mass,
            omega,
            couplings,
            convention,
        })
    }

    /// Number of internal Fourier sectors, `⌊n/2⌋`.
    pub fn sector_count(&self) -> usize {
        self.n / 2
    }

    pub fn has_nyquist(&self) -> bool {
        self.n % 2 == 0
    }

    pub fn to_convention(&self, target: Convention) -> SystemSpec {
        convert_convention(self, target)
    }

    pub fn spectrum(&self) -> Spectrum {
        stiffness_eigenvalues(self)
    }

    /// Same physical system with the coupling vector replaced.
    pub fn with_couplings(&self, couplings: Couplings) -> SystemSpec {
        SystemSpec {
            couplings,
            ..self.clone()
        }
    }

    /// Multiplicity of each bond of class `k` in the potential sum: the
    /// opposite-vertex class is listed once per pair under `ListedOnce` and
    /// twice under `DoubleSum`; every other class appears once.
    pub fn bond_multiplicity(&self, k: usize) -> f64 {
        if self.has_nyquist() && k == self.n / 2 && self.convention == Convention::DoubleSum {
            2.0
        } else {
            1.0
        }
    }

    /// The distinct bonds `(i, j, weight)` with 0-based particle indices, where
    /// `weight = κ_k · multiplicity`. The potential is
    /// `½ m ω² Σ weight · |r_i − r_j|²`.
    pub fn bonds(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * self.sector_count());
        for k in 1..=self.sector_count() {
            let w = self.couplings.get(k) * self.bond_multiplicity(k);
            let count = if self.has_nyquist() && k == n / 2 { n / 2 } else { n };
            for i in 0..count {
                out.push((i, (i + k) % n, w));
            }
        }
        out
    }
}

pub fn validate_spec(spec: SystemSpec) -> Result<SystemSpec, ModelError> {
    if spec.n < 3 {
        return Err(ModelError::NTooSmall(spec.n));
    }
    let expected = spec.n / 2;
    if spec.couplings.len() != expected {
        return Err(ModelError::BadDimension {
            n: spec.n,
            expected,
            found: spec.couplings.len(),
        });
    }
    if !(spec.mass.is_finite() && spec.mass > 0.0) {
        return Err(ModelError::NonPositiveParameter {
            name: "mass",
            value: spec.mass,
        });
    }
    if !(spec.omega.is_finite() && spec.omega > 0.0) {
        return Err(ModelError::NonPositiveParameter {
            name: "omega",
            value: spec.omega,
        });
    }
    if let Couplings::Float(v) = &spec.couplings {
        if let Some(i) = v.iter().position(|x| !x.is_finite()) {
            return Err(ModelError::NonFiniteCoupling { index: i + 1 });
        }
    }
    Ok(spec)
}

/// Re-expresses the opposite-vertex coupling under another bond-counting
/// convention. The physical system, and hence the spectrum, is unchanged.
pub fn convert_convention(spec: &SystemSpec, target: Convention) -> SystemSpec {
    if spec.convention == target || !spec.has_nyquist() {
        return SystemSpec {
            convention: target,
            ..spec.clone()
        };
    }
    let couplings = match (spec.convention, target) {
        (Convention::DoubleSum, Convention::ListedOnce) => spec.couplings.map_last(2, 1),
        (Convention::ListedOnce, Convention::DoubleSum) => spec.couplings.map_last(1, 2),
        _ => unreachable!(),
    };
    SystemSpec {
        couplings,
        convention: target,
        ..spec.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// `λ > 0`: harmonic oscillation at `Ω = ω√λ`.
    Oscillatory,
    /// `λ = 0`: free drift.
    Neutral,
    /// `λ < 0`: exponential escape at rate `ω√(−λ)`.
    Hyperbolic,
}

/// Stiffness data for one Fourier sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorMode {
    pub ell: usize,
    pub lambda: f64,
    pub exact_lambda: Option<Exact>,
    /// `ω√λ` for oscillatory sectors, zero for neutral ones, absent otherwise.
    pub frequency: Option<f64>,
    pub multiplicity: usize,
    pub branch: Branch,
}

impl SectorMode {
    /// Exponential rate `ω√(−λ)` of a hyperbolic sector.
    pub fn growth_rate(&self, omega: f64) -> Option<f64> {
        (self.branch == Branch::Hyperbolic).then(|| omega * (-self.lambda).sqrt())
    }
}

/// Per-sector stiffness eigenvalues, frequencies and degeneracies.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub n: usize,
    pub omega: f64,
    /// Sectors `ℓ = 0..=⌊n/2⌋`, indexed by `ℓ`.
    pub sectors: Vec<SectorMode>,
    /// Partition of `1..=⌊n/2⌋` into groups of equal frequency.
    pub degeneracy_groups: Vec<Vec<usize>>,
}

impl Spectrum {
    pub fn sector(&self, ell: usize) -> &SectorMode {
        &self.sectors[ell]
    }

    pub fn internal(&self) -> &[SectorMode] {
        &self.sectors[1..]
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.sectors.iter().map(|s| s.lambda).collect()
    }

    pub fn exact_lambdas(&self) -> Option<Vec<Exact>> {
        self.sectors.iter().map(|s| s.exact_lambda.clone()).collect()
    }

    pub fn max_frequency(&self) -> f64 {
        self.internal()
            .iter()
            .filter_map(|s| s.frequency)
            .fold(0.0, f64::max)
    }

    pub fn is_stable(&self) -> bool {
        self.internal()
            .iter()
            .all(|s| s.branch == Branch::Oscillatory)
    }

    /// Degeneracy group containing sector `ell`.
    pub fn group_of(&self, ell: usize) -> Option<&[usize]> {
        self.degeneracy_groups
            .iter()
            .find(|g| g.contains(&ell))
            .map(Vec::as_slice)
    }
}

/// `cos(2π j / n)` for `n ∈ {3, 4, 6}`, where it is rational.
fn rational_cos(j: usize, n: usize) -> Option<Exact> {
    if 12 % n != 0 {
        return None;
    }
    let twelfths = (12 / n) * (j % n);
    let (p, q) = match twelfths {
        0 => (1, 1),
        2 | 10 => (1, 2),
        3 | 9 => (0, 1),
        4 | 8 => (-1, 2),
        6 => (-1, 1),
        _ => return None,
    };
    Some(Exact::new(BigInt::from(p), BigInt::from(q)))
}

/// Coefficient of `κ_k` in `λ_ℓ`: `2 − 2cos(2πkℓ/n)` for ordinary bond
/// classes and `(1 − (−1)^ℓ)·multiplicity` for the opposite-vertex class.
pub(crate) fn stiffness_coefficient(n: usize, k: usize, ell: usize, multiplicity: f64) -> f64 {
    if n % 2 == 0 && k == n / 2 {
        if ell % 2 == 1 {
            2.0 * multiplicity
        } else {
            0.0
        }
    } else {
        let s = (std::f64::consts::PI * ((k * ell) % n) as f64 / n as f64).sin();
        4.0 * s * s
    }
}

pub(crate) fn exact_stiffness_coefficient(n: usize, k: usize, ell: usize, multiplicity: u32) -> Option<Exact> {
    if n % 2 == 0 && k == n / 2 {
        let v = if ell % 2 == 1 { 2 * multiplicity as i64 } else { 0 };
        return Some(Exact::from_integer(BigInt::from(v)));
    }
    let c = rational_cos(k * ell, n)?;
    Some(Exact::from_integer(BigInt::from(2)) - c * BigInt::from(2))
}

/// Stiffness eigenvalues and derived frequencies of every Fourier sector.
///
/// Exact rational couplings for `n ∈ {3, 4, 6}` yield exact eigenvalues; all
/// other inputs are evaluated in floating point.
pub fn stiffness_eigenvalues(spec: &SystemSpec) -> Spectrum {
    let n = spec.n;
    let sectors_n = spec.sector_count();
    let scale: f64 = spec.couplings.to_f64().iter().map(|k| 4.0 * k.abs()).sum();
    let mut sectors = Vec::with_capacity(sectors_n + 1);
    sectors.push(SectorMode {
        ell: 0,
        lambda: 0.0,
        exact_lambda: spec.couplings.is_exact().then(Exact::zero),
        frequency: Some(0.0),
        multiplicity: 1,
        branch: Branch::Neutral,
    });
    for ell in 1..=sectors_n {
        let exact = spec.couplings.as_exact().and_then(|kappa| {
            let mut acc = Exact::zero();
            for (i, kk) in kappa.iter().enumerate() {
                let mult = spec.bond_multiplicity(i + 1) as u32;
                acc += kk * exact_stiffness_coefficient(n, i + 1, ell, mult)?;
            }
            Some(acc)
        });
        let (lambda, branch) = match &exact {
            Some(x) => {
                let branch = if x.is_zero() {
                    Branch::Neutral
                } else if x.is_positive() {
                    Branch::Oscillatory
                } else {
                    Branch::Hyperbolic
                };
                (exact_to_f64(x), branch)
            }
            None => {
                let lambda: f64 = (1..=sectors_n)
                    .map(|k| {
                        spec.couplings.get(k)
                            * stiffness_coefficient(n, k, ell, spec.bond_multiplicity(k))
                    })
                    .sum();
                if lambda.abs() <= NEUTRAL_REL_TOL * scale || lambda == 0.0 {
                    (0.0, Branch::Neutral)
                } else if lambda > 0.0 {
                    (lambda, Branch::Oscillatory)
                } else {
                    (lambda, Branch::Hyperbolic)
                }
            }
        };
        let frequency = match branch {
            Branch::Oscillatory => Some(spec.omega * lambda.sqrt()),
            Branch::Neutral => Some(0.0),
            Branch::Hyperbolic => None,
        };
        let multiplicity = if spec.has_nyquist() && ell == n / 2 { 1 } else { 2 };
        sectors.push(SectorMode {
            ell,
            lambda,
            exact_lambda: exact,
            frequency,
            multiplicity,
            branch,
        });
    }
    let degeneracy_groups = degeneracy_groups(&sectors, spec.omega);
    Spectrum {
        n,
        omega: spec.omega,
        sectors,
        degeneracy_groups,
    }
}

fn degeneracy_groups(sectors: &[SectorMode], omega: f64) -> Vec<Vec<usize>> {
    // Signed frequency-like key: ω√λ for λ ≥ 0 and −ω√(−λ) otherwise.
    let key = |s: &SectorMode| s.lambda.signum() * omega * s.lambda.abs().sqrt();
    let internal = &sectors[1..];
    let max_key = internal.iter().map(|s| key(s).abs()).fold(0.0, f64::max);
    let same = |a: &SectorMode, b: &SectorMode| match (&a.exact_lambda, &b.exact_lambda) {
        (Some(x), Some(y)) => x == y,
        _ => (key(a) - key(b)).abs() <= DEGENERACY_REL_TOL * max_key,
    };
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for s in internal {
        match groups
            .iter_mut()
            .find(|g| same(&sectors[g[0]], s))
        {
            Some(g) => g.push(s.ell),
            None => groups.push(vec![s.ell]),
        }
    }
    groups
}
