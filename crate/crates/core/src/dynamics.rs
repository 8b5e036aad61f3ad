//! Direct numerical integration of the equations of motion.
//!
//! This path never touches the Fourier machinery: forces are accumulated bond
//! by bond, so it serves as an independent check on the modal solution.

use serde::Serialize;
use thiserror::Error;

use crate::model::SystemSpec;
use crate::state::{PhaseState, StateError, Vec2};

/// Positions beyond this multiple of the initial scale count as divergence.
const DIVERGENCE_FACTOR: f64 = 1e12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("time step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("step count and stride must be at least 1")]
    BadCount,
    #[error("non-finite state at step {0}")]
    NonFinite(usize),
    #[error("trajectory diverged at step {0}")]
    Diverged(usize),
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TrajectorySource {
    Analytic { period: f64, samples: usize },
    Verlet { dt: f64, steps: usize, stride: usize },
}

/// Time-ordered sequence of states.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhaseState>,
    pub spec: SystemSpec,
    pub source: TrajectorySource,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    /// Position of particle `i` (0-based) at every sample.
    pub fn path(&self, i: usize) -> Vec<Vec2> {
        self.states.iter().map(|s| s.positions[i]).collect()
    }
}

/// Conserved quantities of a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Invariants {
    pub energy: f64,
    pub momentum: [f64; 2],
    pub angular_momentum: f64,
}

pub fn force(spec: &SystemSpec, positions: &[Vec2]) -> Vec<Vec2> {
    let c = spec.mass * spec.omega * spec.omega;
    let mut f = vec![Vec2::zeros(); positions.len()];
    for (i, j, w) in spec.bonds() {
        let d = (positions[i] - positions[j]) * (c * w);
        f[i] -= d;
        f[j] += d;
    }
    f
}

pub fn potential_energy(spec: &SystemSpec, positions: &[Vec2]) -> f64 {
    let c = 0.5 * spec.mass * spec.omega * spec.omega;
    spec.bonds()
        .iter()
        .map(|&(i, j, w)| c * w * (positions[i] - positions[j]).norm_squared())
        .sum()
}

pub fn conserved_quantities(spec: &SystemSpec, state: &PhaseState) -> Invariants {
    let kinetic: f64 = state.momenta.iter().map(|p| p.norm_squared()).sum::<f64>() / (2.0 * spec.mass);
    let p = state.total_momentum();
    let l = state
        .positions
        .iter()
        .zip(&state.momenta)
        .map(|(r, p)| r.x * p.y - r.y * p.x)
        .sum();
    Invariants {
        energy: kinetic + potential_energy(spec, &state.positions),
        momentum: [p.x, p.y],
        angular_momentum: l,
    }
}

/// Velocity-Verlet integration for `steps` steps of size `dt`, recording the
/// initial state and then every `stride`-th state. A final partial stride is
/// also recorded so the last step is always present.
pub fn integrate_verlet(
    spec: &SystemSpec,
    initial: &PhaseState,
    dt: f64,
    steps: usize,
    stride: usize,
) -> Result<Trajectory, DynamicsError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(DynamicsError::BadStep(dt));
    }
    if steps == 0 || stride == 0 {
        return Err(DynamicsError::BadCount);
    }
    initial.check_n(spec.n)?;
    let limit = DIVERGENCE_FACTOR * initial.scale().max(f64::MIN_POSITIVE);
    let half = 0.5 * dt;
    let inv_m = 1.0 / spec.mass;

    let mut r = initial.positions.clone();
    let mut p = initial.momenta.clone();
    let mut f = force(spec, &r);
    let capacity = steps / stride + 2;
    let mut times = Vec::with_capacity(capacity);
    let mut states = Vec::with_capacity(capacity);
    times.push(initial.t);
    states.push(initial.clone());

    for step in 1..=steps {
        for (pi, fi) in p.iter_mut().zip(&f) {
            *pi += fi * half;
        }
        for (ri, pi) in r.iter_mut().zip(&p) {
            *ri += pi * (dt * inv_m);
        }
        f = force(spec, &r);
        for (pi, fi) in p.iter_mut().zip(&f) {
            *pi += fi * half;
        }
        if step % stride == 0 || step == steps {
            if r.iter().chain(&p).any(|v| !(v.x.is_finite() && v.y.is_finite())) {
                return Err(DynamicsError::NonFinite(step));
            }
            if r.iter().any(|v| v.norm() > limit) {
                return Err(DynamicsError::Diverged(step));
            }
            let t = initial.t + step as f64 * dt;
            times.push(t);
            states.push(PhaseState {
                t,
                positions: r.clone(),
                momenta: p.clone(),
            });
        }
    }
    Ok(Trajectory {
        times,
        states,
        spec: spec.clone(),
        source: TrajectorySource::Verlet { dt, steps, stride },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Convention, Couplings};
    use nalgebra::DMatrix;

    fn spec(n: usize, kappa: Vec<f64>, convention: Convention) -> SystemSpec {
        SystemSpec::new(n, 1.3, 0.7, Couplings::Float(kappa), convention).unwrap()
    }

    /// Stiffness matrix assembled from the double-sum definition of the
    /// potential, with opposite bonds halved for the listed-once convention.
    fn stiffness(spec: &SystemSpec) -> DMatrix<f64> {
        let n = spec.n;
        let mut k = DMatrix::zeros(n, n);
        for kk in 1..=n / 2 {
            let mut w = spec.couplings.get(kk);
            if n % 2 == 0 && kk == n / 2 && spec.convention == Convention::ListedOnce {
                w *= 0.5;
            }
            for i in 0..n {
                let j = (i + kk) % n;
                k[(i, i)] += w;
                k[(j, j)] += w;
                k[(i, j)] -= w;
                k[(j, i)] -= w;
            }
        }
        k * (spec.mass * spec.omega * spec.omega)
    }

    #[test]
    fn force_matches_stiffness_matrix() {
        for (n, conv) in [(4, Convention::ListedOnce), (6, Convention::DoubleSum), (5, Convention::ListedOnce)] {
            let s = spec(n, (1..=n / 2).map(|k| 0.4 * k as f64 - 0.9).collect(), conv);
            let r: Vec<Vec2> = (0..n).map(|i| Vec2::new((i as f64).sin() * 2.0, (i * i) as f64 * 0.1)).collect();
            let f = force(&s, &r);
            let k = stiffness(&s);
            for i in 0..n {
                let mut expect = Vec2::zeros();
                for j in 0..n {
                    expect -= r[j] * k[(i, j)];
                }
                assert!((f[i] - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn coincident_particles_feel_no_force() {
        let s = spec(5, vec![1.0, -0.3], Convention::ListedOnce);
        let f = force(&s, &[Vec2::new(0.3, 0.2); 5]);
        assert!(f.iter().all(|v| *v == Vec2::zeros()));
    }

    #[test]
    fn translation_leaves_force_unchanged() {
        let s = spec(4, vec![1.0, -0.5], Convention::ListedOnce);
        let r: Vec<Vec2> = vec![Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0), Vec2::new(-1.0, 0.2), Vec2::new(0.3, -1.0)];
        let shifted: Vec<Vec2> = r.iter().map(|v| v + Vec2::new(5.0, -3.0)).collect();
        let (a, b) = (force(&s, &r), force(&s, &shifted));
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-12);
        }
        let total: Vec2 = a.iter().sum();
        assert!(total.norm() < 1e-14);
    }

    #[test]
    fn free_motion_is_exact() {
        let s = spec(3, vec![0.0], Convention::ListedOnce);
        let init = PhaseState::from_pairs(0.0, &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], &[[1.3, 0.0], [0.0, 2.6], [-1.3, 1.3]]).unwrap();
        let traj = integrate_verlet(&s, &init, 0.25, 8, 4).unwrap();
        assert_eq!(traj.times, vec![0.0, 1.0, 2.0]);
        let last = &traj.states[2];
        assert_eq!(last.positions[0], Vec2::new(2.0, 0.0));
        assert_eq!(last.positions[2], Vec2::new(-2.0, 3.0));
    }

    #[test]
    fn zero_momenta_energy_is_potential() {
        let s = spec(4, vec![1.0, -0.5], Convention::ListedOnce);
        let init = PhaseState::from_pairs(0.0, &[[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]], &[[0.0, 0.0]; 4]).unwrap();
        let q = conserved_quantities(&s, &init);
        assert_eq!(q.energy, potential_energy(&s, &init.positions));
        let rotated = conserved_quantities(&s, &init.rotated(0.7));
        assert!((rotated.energy - q.energy).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_settings() {
        let s = spec(3, vec![1.0], Convention::ListedOnce);
        let init = PhaseState::zeros(3);
        assert_eq!(integrate_verlet(&s, &init, 0.0, 1, 1).unwrap_err(), DynamicsError::BadStep(0.0));
        assert_eq!(integrate_verlet(&s, &init, 0.1, 0, 1).unwrap_err(), DynamicsError::BadCount);
    }

    #[test]
    fn unstable_spec_diverges() {
        let s = spec(4, vec![1.0, -2.0], Convention::ListedOnce);
        let init = PhaseState::from_pairs(0.0, &[[1.0, 0.0], [0.0, 0.0], [-1.0, 0.0], [0.0, 0.0]], &[[0.0, 0.0]; 4]).unwrap();
        let err = integrate_verlet(&s, &init, 0.05, 100_000, 1).unwrap_err();
        assert!(matches!(err, DynamicsError::Diverged(_)));
    }
}
