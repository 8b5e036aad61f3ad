//! Inverse problem: couplings whose sector frequencies have prescribed ratios.
//!
//! Unknowns are `κ_1..κ_K` and a scale `c`; the equations are the linear
//! relations `λ_ℓ(κ) = m_ℓ² c`, `ℓ = 1..K`. The solution space is computed as
//! a nullspace, in exact rationals when the stiffness coefficients are
//! rational and in floating point otherwise.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::model::{
    exact_stiffness_coefficient, stiffness_coefficient, Convention, Couplings, Exact, SystemSpec,
};

/// Pivots below this magnitude are treated as zero in floating-point mode.
const FLOAT_PIVOT_TOL: f64 = 1e-10;
/// Relative tolerance for family membership in floating-point mode.
const FLOAT_MEMBER_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DesignError {
    #[error("n = {0} is too small; at least 3 particles are required")]
    NTooSmall(usize),
    #[error("expected {expected} target ratios for n = {n}, found {found}")]
    BadDimension { n: usize, expected: usize, found: usize },
    #[error("target ratio {index} must be a positive integer")]
    InvalidTarget { index: usize },
    #[error("no couplings realize the target ratios with positive frequencies")]
    Infeasible,
}

/// Couplings `κ = c·unit + Σ t_i·homogeneous_i` with `c > 0`, all expressed
/// in `convention`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingFamily {
    pub n: usize,
    pub convention: Convention,
    pub targets: Vec<u64>,
    /// Couplings with `λ_ℓ = m_ℓ²` exactly.
    pub unit: Couplings,
    /// Couplings with every internal `λ_ℓ = 0`.
    pub homogeneous: Vec<Couplings>,
    /// Member of the family whose lowest frequency equals `ω`.
    pub sample: Couplings,
}

impl CouplingFamily {
    /// Whether `kappa` (in the family's convention) yields `λ_ℓ = c·m_ℓ²`
    /// for one common `c > 0`.
    pub fn contains(&self, kappa: &Couplings) -> bool {
        let Ok(spec) = SystemSpec::new(self.n, 1.0, 1.0, kappa.clone(), self.convention) else {
            return false;
        };
        let spectrum = spec.spectrum();
        if let Some(exact) = spectrum.exact_lambdas() {
            let m2 = |l: usize| Exact::from_integer(BigInt::from(self.targets[l - 1] * self.targets[l - 1]));
            let c = &exact[1] / m2(1);
            return c.is_positive() && (1..exact.len()).all(|l| exact[l] == &c * m2(l));
        }
        let lambdas = spectrum.lambdas();
        let c = lambdas[1] / (self.targets[0] * self.targets[0]) as f64;
        let scale = lambdas.iter().map(|l| l.abs()).fold(0.0, f64::max);
        c > 0.0
            && (1..lambdas.len()).all(|l| {
                let m = self.targets[l - 1] as f64;
                (lambdas[l] - c * m * m).abs() <= FLOAT_MEMBER_TOL * scale
            })
    }

    /// The sample couplings as a system with the given mass and base frequency.
    pub fn sample_spec(&self, mass: f64, omega: f64) -> SystemSpec {
        SystemSpec {
            n: self.n,
            mass,
            omega,
            couplings: self.sample.clone(),
            convention: self.convention,
        }
    }
}

/// Minimal field interface for the elimination below.
trait Field: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn magnitude(&self) -> f64;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
}

impl Field for Exact {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn magnitude(&self) -> f64 {
        crate::model::exact_to_f64(&self.abs())
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
}

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        self.abs() < FLOAT_PIVOT_TOL
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
}

/// Basis of `{x : A x = 0}` by reduced row echelon form.
fn nullspace<F: Field>(mut a: Vec<Vec<F>>, cols: usize) -> Vec<Vec<F>> {
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let p = (r..rows)
            .max_by(|&x, &y| a[x][c].magnitude().total_cmp(&a[y][c].magnitude()))
            .expect("non-empty range");
        if a[p][c].is_zero() {
            continue;
        }
        a.swap(r, p);
        let pivot = a[r][c].clone();
        for v in a[r].iter_mut() {
            *v = v.div(&pivot);
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in 0..cols {
                    let t = f.mul(&a[r][k]);
                    a[i][k] = a[i][k].sub(&t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![F::zero(); cols];
            v[free] = F::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = F::zero().sub(&a[i][free]);
            }
            v
        })
        .collect()
}

/// Splits a nullspace of `(κ, c)` into the `c = 1` member and a basis of the
/// `c = 0` subspace. `None` when `c` vanishes on the whole space.
fn split_scale<F: Field>(basis: Vec<Vec<F>>, k: usize) -> Option<(Vec<F>, Vec<Vec<F>>)> {
    let lead = basis
        .iter()
        .enumerate()
        .filter(|(_, v)| !v[k].is_zero())
        .max_by(|a, b| a.1[k].magnitude().total_cmp(&b.1[k].magnitude()))?
        .0;
    let c = basis[lead][k].clone();
    let unit: Vec<F> = basis[lead].iter().map(|x| x.div(&c)).collect();
    let homogeneous = basis
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != lead)
        .map(|(_, v)| {
            let f = v[k].clone();
            v.iter().zip(&unit).map(|(x, u)| x.sub(&f.mul(u))).collect::<Vec<F>>()
        })
        .collect();
    Some((unit, homogeneous))
}

fn to_convention(n: usize, couplings: Couplings, convention: Convention) -> Couplings {
    SystemSpec {
        n,
        mass: 1.0,
        omega: 1.0,
        couplings,
        convention: Convention::ListedOnce,
    }
    .to_convention(convention)
    .couplings
}

pub fn design_couplings(n: usize, convention: Convention, targets: &[u64]) -> Result<CouplingFamily, DesignError> {
    if n < 3 {
        return Err(DesignError::NTooSmall(n));
    }
    let k = n / 2;
    if targets.len() != k {
        return Err(DesignError::BadDimension {
            n,
            expected: k,
            found: targets.len(),
        });
    }
    if let Some(i) = targets.iter().position(|&m| m == 0) {
        return Err(DesignError::InvalidTarget { index: i + 1 });
    }
    let min = *targets.iter().min().expect("k ≥ 1");
    let sample_scale = (1i64, (min * min) as i64);

    let exact_rows: Option<Vec<Vec<Exact>>> = (1..=k)
        .map(|l| {
            let mut row = (1..=k)
                .map(|kk| exact_stiffness_coefficient(n, kk, l, 1))
                .collect::<Option<Vec<_>>>()?;
            let m = targets[l - 1];
            row.push(-Exact::from_integer(BigInt::from(m * m)));
            Some(row)
        })
        .collect();

    let (unit, homogeneous) = match exact_rows {
        Some(rows) => {
            let (u, h) = split_scale(nullspace(rows, k + 1), k).ok_or(DesignError::Infeasible)?;
            let wrap = |v: Vec<Exact>| Couplings::Exact(v[..k].to_vec());
            (wrap(u), h.into_iter().map(wrap).collect::<Vec<_>>())
        }
        None => {
            let rows: Vec<Vec<f64>> = (1..=k)
                .map(|l| {
                    let m = targets[l - 1] as f64;
                    let mut row: Vec<f64> = (1..=k).map(|kk| stiffness_coefficient(n, kk, l, 1.0)).collect();
                    row.push(-m * m);
                    row
                })
                .collect();
            let (u, h) = split_scale(nullspace(rows, k + 1), k).ok_or(DesignError::Infeasible)?;
            let wrap = |v: Vec<f64>| Couplings::Float(v[..k].to_vec());
            (wrap(u), h.into_iter().map(wrap).collect::<Vec<_>>())
        }
    };
    let sample = unit.scaled(sample_scale.0, sample_scale.1);
    Ok(CouplingFamily {
        n,
        convention,
        targets: targets.to_vec(),
        unit: to_convention(n, unit, convention),
        homogeneous: homogeneous.into_iter().map(|h| to_convention(n, h, convention)).collect(),
        sample: to_convention(n, sample, convention),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_body_line() {
        let f = design_couplings(4, Convention::ListedOnce, &[1, 2]).unwrap();
        assert_eq!(f.sample, Couplings::exact_from_ratios(&[(1, 1), (-1, 2)]));
        assert!(f.homogeneous.is_empty());
        assert!(f.contains(&Couplings::exact_from_ratios(&[(3, 1), (-3, 2)])));
        assert!(!f.contains(&Couplings::exact_from_ratios(&[(1, 1), (-1, 4)])));
        assert!(!f.contains(&Couplings::exact_from_ratios(&[(-1, 1), (1, 2)])));
    }

    #[test]
    fn double_sum_output() {
        let f = design_couplings(4, Convention::DoubleSum, &[1, 2]).unwrap();
        assert_eq!(f.sample, Couplings::exact_from_ratios(&[(1, 1), (-1, 4)]));
        assert!(f.contains(&Couplings::exact_from_ratios(&[(2, 1), (-1, 2)])));
    }

    #[test]
    fn sample_has_unit_lowest_frequency() {
        let f = design_couplings(6, Convention::ListedOnce, &[2, 4, 6]).unwrap();
        let sp = f.sample_spec(1.0, 1.0).spectrum();
        assert_eq!(sp.sector(1).frequency, Some(1.0));
    }

    #[test]
    fn five_body_float() {
        let f = design_couplings(5, Convention::ListedOnce, &[1, 2]).unwrap();
        let k = f.sample.to_f64();
        let r5 = 5f64.sqrt();
        assert!((k[0] - (3.0 / r5 + 1.0) / 2.0).abs() < 1e-12);
        assert!((k[1] + (3.0 / r5 - 1.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_requests() {
        assert_eq!(design_couplings(2, Convention::ListedOnce, &[1]), Err(DesignError::NTooSmall(2)));
        assert!(matches!(design_couplings(6, Convention::ListedOnce, &[1, 2]), Err(DesignError::BadDimension { .. })));
        assert_eq!(design_couplings(4, Convention::ListedOnce, &[1, 0]), Err(DesignError::InvalidTarget { index: 2 }));
    }

    #[test]
    fn nullspace_detects_infeasible_scale() {
        // c appears with a zero column and the κ block is invertible: c is free
        // but κ = 0. A zero κ block forces c = 0 instead.
        let rows = vec![vec![0.0, 0.0, -1.0], vec![0.0, 0.0, -4.0]];
        let (u, h) = split_scale(nullspace(rows, 3), 2).unwrap_or((vec![], vec![]));
        assert!(u.is_empty() && h.is_empty());
        let rows = vec![vec![1.0, 0.0, -1.0], vec![0.0, 0.0, 0.0]];
        let (u, h) = split_scale(nullspace(rows, 3), 2).unwrap();
        assert_eq!(u, vec![1.0, 0.0, 1.0]);
        assert_eq!(h, vec![vec![0.0, 1.0, 0.0]]);
    }
}
