//! Real symmetry-adapted Fourier coordinates and their exact evolution.
//!
//! Row ordering of the orthonormal transform is: center of mass, then for
//! each `ℓ = 1..⌈n/2⌉−1` the cosine row followed by the sine row, then the
//! alternating Nyquist row when `n` is even. Particle `i` (1-based) sits at
//! angle `θ = 2π(i−1)/n`.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::model::{Branch, SectorMode, Spectrum, SystemSpec};
use crate::state::{PhaseState, StateError, Vec2};

/// Default relative energy below which a sector is considered inactive.
pub const DEFAULT_ACTIVE_REL_TOL: f64 = 1e-8;

/// Planar position and momentum amplitude of one real normal coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NormalCoordinate {
    pub position: Vec2,
    pub momentum: Vec2,
}

/// Cosine and sine coordinates of a two-dimensional sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Doublet {
    pub ell: usize,
    pub cos: NormalCoordinate,
    pub sin: NormalCoordinate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeAmplitudes {
    pub n: usize,
    pub com: NormalCoordinate,
    pub doublets: Vec<Doublet>,
    pub nyquist: Option<NormalCoordinate>,
}

impl ModeAmplitudes {
    pub fn zeros(n: usize) -> Self {
        let doublets = (1..n.div_ceil(2))
            .map(|ell| Doublet {
                ell,
                cos: NormalCoordinate::default(),
                sin: NormalCoordinate::default(),
            })
            .collect();
        ModeAmplitudes {
            n,
            com: NormalCoordinate::default(),
            doublets,
            nyquist: (n % 2 == 0).then(NormalCoordinate::default),
        }
    }

    /// Real coordinates belonging to sector `ell`.
    pub fn sector(&self, ell: usize) -> Vec<NormalCoordinate> {
        if ell == 0 {
            vec![self.com]
        } else if self.n % 2 == 0 && ell == self.n / 2 {
            self.nyquist.into_iter().collect()
        } else {
            let d = &self.doublets[ell - 1];
            vec![d.cos, d.sin]
        }
    }

    /// Coordinates in transform-row order, each tagged with its sector.
    pub fn coordinates(&self) -> Vec<(usize, NormalCoordinate)> {
        let mut out = vec![(0, self.com)];
        for d in &self.doublets {
            out.push((d.ell, d.cos));
            out.push((d.ell, d.sin));
        }
        if let Some(ny) = self.nyquist {
            out.push((self.n / 2, ny));
        }
        out
    }

    fn from_coordinates(n: usize, coords: &[NormalCoordinate]) -> Self {
        let mut m = ModeAmplitudes::zeros(n);
        m.com = coords[0];
        for (k, d) in m.doublets.iter_mut().enumerate() {
            d.cos = coords[1 + 2 * k];
            d.sin = coords[2 + 2 * k];
        }
        if let Some(ny) = m.nyquist.as_mut() {
            *ny = coords[n - 1];
        }
        m
    }

    fn map(&self, mut f: impl FnMut(usize, NormalCoordinate) -> NormalCoordinate) -> Self {
        let coords: Vec<NormalCoordinate> = self.coordinates().into_iter().map(|(l, c)| f(l, c)).collect();
        Self::from_coordinates(self.n, &coords)
    }
}

/// Orthonormal real Fourier basis for `n` particles; row `r` is stored as
/// `rows[r]` with one entry per particle.
#[derive(Debug, Clone)]
pub struct FourierBasis {
    n: usize,
    rows: Vec<Vec<f64>>,
}

impl FourierBasis {
    pub fn new(n: usize) -> Self {
        let mut rows = Vec::with_capacity(n);
        let inv = 1.0 / (n as f64).sqrt();
        rows.push(vec![inv; n]);
        let amp = (2.0 / n as f64).sqrt();
        for ell in 1..n.div_ceil(2) {
            // Reduce the phase index mod n before evaluating the trig functions.
            let angle = |i: usize| 2.0 * PI * ((ell * i) % n) as f64 / n as f64;
            rows.push((0..n).map(|i| amp * angle(i).cos()).collect());
            rows.push((0..n).map(|i| amp * angle(i).sin()).collect());
        }
        if n % 2 == 0 {
            rows.push((0..n).map(|i| if i % 2 == 0 { inv } else { -inv }).collect());
        }
        FourierBasis { n, rows }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The `n × n` transform matrix acting on each planar component.
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |r, c| self.rows[r][c])
    }

    pub fn decompose(&self, state: &PhaseState) -> ModeAmplitudes {
        let coords: Vec<NormalCoordinate> = self
            .rows
            .iter()
            .map(|row| NormalCoordinate {
                position: row.iter().zip(&state.positions).map(|(w, r)| r * *w).sum(),
                momentum: row.iter().zip(&state.momenta).map(|(w, p)| p * *w).sum(),
            })
            .collect();
        ModeAmplitudes::from_coordinates(self.n, &coords)
    }

    pub fn reconstruct(&self, modes: &ModeAmplitudes, t: f64) -> PhaseState {
        let mut positions = vec![Vec2::zeros(); self.n];
        let mut momenta = vec![Vec2::zeros(); self.n];
        for (row, (_, c)) in self.rows.iter().zip(modes.coordinates()) {
            for i in 0..self.n {
                positions[i] += c.position * row[i];
                momenta[i] += c.momentum * row[i];
            }
        }
        PhaseState {
            t,
            positions,
            momenta,
        }
    }
}

pub fn fourier_decompose(state: &PhaseState) -> ModeAmplitudes {
    FourierBasis::new(state.n()).decompose(state)
}

/// Inverse transform; the returned state carries time `t`.
pub fn fourier_reconstruct(modes: &ModeAmplitudes, t: f64) -> PhaseState {
    FourierBasis::new(modes.n).reconstruct(modes, t)
}

/// Exact one-dimensional flow of a single sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SectorFlow {
    Harmonic(f64),
    Free,
    Hyperbolic(f64),
}

impl SectorFlow {
    pub fn of(mode: &SectorMode, omega: f64) -> Self {
        match mode.branch {
            Branch::Oscillatory => SectorFlow::Harmonic(omega * mode.lambda.sqrt()),
            Branch::Neutral => SectorFlow::Free,
            Branch::Hyperbolic => SectorFlow::Hyperbolic(omega * (-mode.lambda).sqrt()),
        }
    }

    pub fn propagate(self, c: NormalCoordinate, mass: f64, dt: f64) -> NormalCoordinate {
        let (a, b) = (c.position, c.momentum);
        match self {
            SectorFlow::Harmonic(w) => {
                let (s, k) = (w * dt).sin_cos();
                NormalCoordinate {
                    position: a * k + b * (s / (mass * w)),
                    momentum: b * k - a * (mass * w * s),
                }
            }
            SectorFlow::Free => NormalCoordinate {
                position: a + b * (dt / mass),
                momentum: b,
            },
            SectorFlow::Hyperbolic(g) => {
                let (s, k) = ((g * dt).sinh(), (g * dt).cosh());
                NormalCoordinate {
                    position: a * k + b * (s / (mass * g)),
                    momentum: b * k + a * (mass * g * s),
                }
            }
        }
    }
}

pub fn evolve_modes(modes: &ModeAmplitudes, spectrum: &Spectrum, mass: f64, dt: f64) -> ModeAmplitudes {
    let flows: Vec<SectorFlow> = spectrum
        .sectors
        .iter()
        .map(|s| SectorFlow::of(s, spectrum.omega))
        .collect();
    modes.map(|ell, c| flows[ell].propagate(c, mass, dt))
}

/// Signed energy of each sector `ℓ = 0..=⌊n/2⌋`; entry 0 is the kinetic
/// energy of the center of mass.
pub fn sector_energies(modes: &ModeAmplitudes, spectrum: &Spectrum, mass: f64) -> Vec<f64> {
    sector_energy_terms(modes, spectrum, mass, false)
}

fn sector_energy_terms(modes: &ModeAmplitudes, spectrum: &Spectrum, mass: f64, magnitude: bool) -> Vec<f64> {
    let w2 = spectrum.omega * spectrum.omega;
    let mut out = vec![0.0; spectrum.sectors.len()];
    for (ell, c) in modes.coordinates() {
        let lambda = spectrum.sectors[ell].lambda;
        let lambda = if magnitude { lambda.abs() } else { lambda };
        out[ell] += c.momentum.norm_squared() / (2.0 * mass)
            + 0.5 * mass * w2 * lambda * c.position.norm_squared();
    }
    out
}

/// Internal sectors whose energy exceeds `rel_tol` times the total internal
/// energy. Magnitudes are used so that unstable sectors still register.
/// Returns the empty set when there is no internal motion.
pub fn active_sectors(modes: &ModeAmplitudes, spectrum: &Spectrum, mass: f64, rel_tol: f64) -> BTreeSet<usize> {
    let e = sector_energy_terms(modes, spectrum, mass, true);
    let total: f64 = e[1..].iter().sum();
    if total <= 0.0 {
        return BTreeSet::new();
    }
    (1..e.len()).filter(|&l| e[l] > rel_tol * total).collect()
}

/// Exact solution of the linear equations of motion from a fixed initial state.
#[derive(Debug, Clone)]
pub struct AnalyticFlow {
    basis: FourierBasis,
    flows: Vec<SectorFlow>,
    mass: f64,
    t0: f64,
    initial: ModeAmplitudes,
    spectrum: Spectrum,
}

impl AnalyticFlow {
    pub fn new(spec: &SystemSpec, initial: &PhaseState) -> Result<Self, StateError> {
        initial.check_n(spec.n)?;
        let spectrum = spec.spectrum();
        let basis = FourierBasis::new(spec.n);
        let flows = spectrum.sectors.iter().map(|s| SectorFlow::of(s, spec.omega)).collect();
        Ok(AnalyticFlow {
            initial: basis.decompose(initial),
            basis,
            flows,
            mass: spec.mass,
            t0: initial.t,
            spectrum,
        })
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn initial_modes(&self) -> &ModeAmplitudes {
        &self.initial
    }

    pub fn modes_at(&self, t: f64) -> ModeAmplitudes {
        let dt = t - self.t0;
        self.initial.map(|ell, c| self.flows[ell].propagate(c, self.mass, dt))
    }

    pub fn state_at(&self, t: f64) -> PhaseState {
        self.basis.reconstruct(&self.modes_at(t), t)
    }
}

/// State at absolute time `t` evolved exactly from `initial` (taken at `initial.t`).
pub fn analytic_state(spec: &SystemSpec, initial: &PhaseState, t: f64) -> Result<PhaseState, StateError> {
    Ok(AnalyticFlow::new(spec, initial)?.state_at(t))
}
