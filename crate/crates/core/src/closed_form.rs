//! Hand-derived trajectories for the superintegrable four- and five-body
//! couplings, kept independent of the general Fourier pipeline so the two can
//! be compared.
//!
//! Both formulas hold in the center-of-mass frame. The center of mass is
//! removed before evaluation and its free drift is added back afterwards.

use thiserror::Error;

use crate::state::{mean, PhaseState, Vec2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClosedFormError {
    #[error("closed form requires {expected} particles, got {found}")]
    WrongN { expected: usize, found: usize },
}

fn split_com(initial: &PhaseState, mass: f64, t: f64) -> (PhaseState, Vec2, Vec2) {
    let p = mean(&initial.momenta);
    let c = initial.center_of_mass() + p * ((t - initial.t) / mass);
    (initial.without_center_of_mass(), c, p)
}

/// Four bodies with `(κ1, κ2) = (1, −½)`: frequencies `ω` and `2ω`.
///
/// `r_1` and `r_2` follow the explicit formula; `r_3(t) = r_1(t + 2τ)` and
/// `r_4(t) = r_2(t + 2τ)` with `τ = π/(2ω)`.
pub fn closed_form_n4(initial: &PhaseState, omega: f64, mass: f64, t: f64) -> Result<PhaseState, ClosedFormError> {
    n4_branch(initial, omega, mass, t, 1.0)
}

/// Same as [`closed_form_n4`] but with the other sign branch, `r_3(t) = r_1(t − 2τ)`.
pub fn closed_form_n4_minus(initial: &PhaseState, omega: f64, mass: f64, t: f64) -> Result<PhaseState, ClosedFormError> {
    n4_branch(initial, omega, mass, t, -1.0)
}

fn n4_branch(initial: &PhaseState, omega: f64, mass: f64, t: f64, sign: f64) -> Result<PhaseState, ClosedFormError> {
    if initial.n() != 4 {
        return Err(ClosedFormError::WrongN {
            expected: 4,
            found: initial.n(),
        });
    }
    let (rel, c, p_mean) = split_com(initial, mass, t);
    let (r, p) = (&rel.positions, &rel.momenta);
    let tau = std::f64::consts::PI / (2.0 * omega);

    // `a` and `b` are the particle pairs (1, 3) and (2, 4), 0-based.
    let pair = |a: usize, b: usize, s: f64| -> (Vec2, Vec2) {
        let (w, w2) = (omega * s, 2.0 * omega * s);
        let r_diff = r[a] - r[b];
        let r_sum = r[a] + r[b];
        let p_diff = p[a] - p[b];
        let p_sum = p[a] + p[b];
        let pos = (r_diff * w.cos() + r_sum * w2.cos()) * 0.5
            + (p_diff * (2.0 * w.sin()) + p_sum * w2.sin()) / (4.0 * mass * omega);
        let mom = (r_diff * (-omega * w.sin()) + r_sum * (-2.0 * omega * w2.sin())) * (0.5 * mass)
            + (p_diff * (2.0 * omega * w.cos()) + p_sum * (2.0 * omega * w2.cos())) / (4.0 * omega);
        (pos, mom)
    };
    let dt = t - initial.t;
    let states = [pair(0, 2, dt), pair(1, 3, dt), pair(0, 2, dt + sign * 2.0 * tau), pair(1, 3, dt + sign * 2.0 * tau)];
    Ok(PhaseState {
        t,
        positions: states.iter().map(|s| s.0 + c).collect(),
        momenta: states.iter().map(|s| s.1 + p_mean).collect(),
    })
}

/// Five bodies with `κ1 = (3/√5 + 1)/2`, `κ2 = −(3/√5 − 1)/2`: frequencies `ω` and `2ω`.
///
/// With `c± = (√5 ± 1)/4`, the neighbor sums `r_{i±1}` enter the `ω` term with
/// `cos(2π/5) = c−` and the `2ω` term with `cos(4π/5) = −c+`; second-neighbor
/// sums take the complementary coefficients.
pub fn closed_form_n5(initial: &PhaseState, omega: f64, mass: f64, t: f64) -> Result<PhaseState, ClosedFormError> {
    if initial.n() != 5 {
        return Err(ClosedFormError::WrongN {
            expected: 5,
            found: initial.n(),
        });
    }
    let (rel, c, p_mean) = split_com(initial, mass, t);
    let (r, p) = (&rel.positions, &rel.momenta);
    let s5 = 5f64.sqrt();
    let cp = (s5 + 1.0) / 4.0;
    let cm = (s5 - 1.0) / 4.0;
    let dt = t - initial.t;
    let (w, w2) = (omega * dt, 2.0 * omega * dt);

    let mut positions = Vec::with_capacity(5);
    let mut momenta = Vec::with_capacity(5);
    for i in 0..5 {
        let near = |v: &[Vec2]| v[(i + 1) % 5] + v[(i + 4) % 5];
        let far = |v: &[Vec2]| v[(i + 2) % 5] + v[(i + 3) % 5];
        let slow = |v: &[Vec2]| (v[i] + near(v) * cm - far(v) * cp) * 0.4;
        let fast = |v: &[Vec2]| (v[i] - near(v) * cp + far(v) * cm) * 0.4;
        let (r1, r2, p1, p2) = (slow(r), fast(r), slow(p), fast(p));
        positions.push(
            r1 * w.cos() + r2 * w2.cos() + p1 * (w.sin() / (mass * omega)) + p2 * (w2.sin() / (2.0 * mass * omega)) + c,
        );
        momenta.push(
            r1 * (-mass * omega * w.sin()) + r2 * (-2.0 * mass * omega * w2.sin()) + p1 * w.cos() + p2 * w2.cos() + p_mean,
        );
    }
    Ok(PhaseState {
        t,
        positions,
        momenta,
    })
}
