//! Planar phase-space states of n particles.

use nalgebra::{Rotation2, Vector2};
use thiserror::Error;

pub type Vec2 = Vector2<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("state has {positions} positions but {momenta} momenta")]
    LengthMismatch { positions: usize, momenta: usize },
    #[error("state has {0} particles; expected {1}")]
    WrongCount(usize, usize),
    #[error("state contains a non-finite coordinate")]
    NonFinite,
}

/// Positions and momenta of all particles at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub t: f64,
    pub positions: Vec<Vec2>,
    pub momenta: Vec<Vec2>,
}

impl PhaseState {
    pub fn new(t: f64, positions: Vec<Vec2>, momenta: Vec<Vec2>) -> Result<Self, StateError> {
        let s = PhaseState {
            t,
            positions,
            momenta,
        };
        s.check()?;
        Ok(s)
    }

    /// Builds a state from `(x, y)` pairs.
    pub fn from_pairs(t: f64, positions: &[[f64; 2]], momenta: &[[f64; 2]]) -> Result<Self, StateError> {
        Self::new(
            t,
            positions.iter().map(|p| Vec2::new(p[0], p[1])).collect(),
            momenta.iter().map(|p| Vec2::new(p[0], p[1])).collect(),
        )
    }

    pub fn zeros(n: usize) -> Self {
        PhaseState {
            t: 0.0,
            positions: vec![Vec2::zeros(); n],
            momenta: vec![Vec2::zeros(); n],
        }
    }

    pub fn check(&self) -> Result<(), StateError> {
        if self.positions.len() != self.momenta.len() {
            return Err(StateError::LengthMismatch {
                positions: self.positions.len(),
                momenta: self.momenta.len(),
            });
        }
        let finite = self
            .positions
            .iter()
            .chain(&self.momenta)
            .all(|v| v.x.is_finite() && v.y.is_finite());
        if !finite || !self.t.is_finite() {
            return Err(StateError::NonFinite);
        }
        Ok(())
    }

    pub fn check_n(&self, n: usize) -> Result<(), StateError> {
        self.check()?;
        if self.n() != n {
            return Err(StateError::WrongCount(self.n(), n));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn center_of_mass(&self) -> Vec2 {
        mean(&self.positions)
    }

    pub fn total_momentum(&self) -> Vec2 {
        self.momenta.iter().sum()
    }

    /// Same state in the frame where the center of mass sits at the origin
    /// with zero total momentum.
    pub fn without_center_of_mass(&self) -> PhaseState {
        let c = self.center_of_mass();
        let p = mean(&self.momenta);
        PhaseState {
            t: self.t,
            positions: self.positions.iter().map(|r| r - c).collect(),
            momenta: self.momenta.iter().map(|q| q - p).collect(),
        }
    }

    pub fn rotated(&self, angle: f64) -> PhaseState {
        let rot = Rotation2::new(angle);
        PhaseState {
            t: self.t,
            positions: self.positions.iter().map(|r| rot * r).collect(),
            momenta: self.momenta.iter().map(|p| rot * p).collect(),
        }
    }

    pub fn scaled(&self, factor: f64) -> PhaseState {
        PhaseState {
            t: self.t,
            positions: self.positions.iter().map(|r| r * factor).collect(),
            momenta: self.momenta.iter().map(|p| p * factor).collect(),
        }
    }

    /// Relabels particles so that new particle `i` is old particle `i + shift`
    /// (indices mod n).
    pub fn relabeled(&self, shift: usize) -> PhaseState {
        let n = self.n();
        PhaseState {
            t: self.t,
            positions: (0..n).map(|i| self.positions[(i + shift) % n]).collect(),
            momenta: (0..n).map(|i| self.momenta[(i + shift) % n]).collect(),
        }
    }

    /// Particle-wise sum; the time of `self` is kept.
    pub fn plus(&self, other: &PhaseState) -> PhaseState {
        PhaseState {
            t: self.t,
            positions: self.positions.iter().zip(&other.positions).map(|(a, b)| a + b).collect(),
            momenta: self.momenta.iter().zip(&other.momenta).map(|(a, b)| a + b).collect(),
        }
    }

    /// Largest coordinate difference to `other` over positions only.
    pub fn max_position_distance(&self, other: &PhaseState) -> f64 {
        self.positions
            .iter()
            .zip(&other.positions)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest difference to `other` over positions and momenta.
    pub fn max_distance(&self, other: &PhaseState) -> f64 {
        let dp = self
            .momenta
            .iter()
            .zip(&other.momenta)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        self.max_position_distance(other).max(dp)
    }

    /// Largest position or momentum norm.
    pub fn scale(&self) -> f64 {
        self.positions
            .iter()
            .chain(&self.momenta)
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn mean(v: &[Vec2]) -> Vec2 {
    if v.is_empty() {
        return Vec2::zeros();
    }
    v.iter().sum::<Vec2>() / v.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_mismatch_and_nan() {
        assert!(matches!(
            PhaseState::from_pairs(0.0, &[[0.0, 0.0]], &[]),
            Err(StateError::LengthMismatch { .. })
        ));
        assert_eq!(
            PhaseState::from_pairs(0.0, &[[f64::NAN, 0.0]], &[[0.0, 0.0]]),
            Err(StateError::NonFinite)
        );
    }

    #[test]
    fn center_of_mass_removal() {
        let s = PhaseState::from_pairs(0.0, &[[1.0, 1.0], [3.0, 1.0]], &[[1.0, 0.0], [1.0, 2.0]]).unwrap();
        let c = s.without_center_of_mass();
        assert_eq!(c.center_of_mass(), Vec2::zeros());
        assert_eq!(c.total_momentum(), Vec2::zeros());
        assert_eq!(c.positions[0], Vec2::new(-1.0, 0.0));
    }

    #[test]
    fn relabel_is_cyclic() {
        let s = PhaseState::from_pairs(0.0, &[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], &[[0.0, 0.0]; 3]).unwrap();
        let r = s.relabeled(1);
        assert_eq!(r.positions[0].x, 1.0);
        assert_eq!(r.positions[2].x, 0.0);
        assert_eq!(s.relabeled(3), s);
    }
}
