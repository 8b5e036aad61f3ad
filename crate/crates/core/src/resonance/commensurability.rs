//! Rational detection of frequency ratios.

use std::f64::consts::PI;

use num_integer::Integer;
use serde::Serialize;

pub const DEFAULT_MAX_DENOMINATOR: u64 = 64;
pub const DEFAULT_COMMENSURABILITY_TOL: f64 = 1e-9;

/// Integer frequency structure of a set of active sectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonanceProfile {
    pub commensurate: bool,
    /// Sector labels the frequencies belong to, in input order (may be empty
    /// when the profile was computed from bare frequencies).
    pub sectors: Vec<usize>,
    pub frequencies: Vec<f64>,
    /// `Ω_0` with `Ω_ℓ = m_ℓ Ω_0`; absent unless commensurate.
    pub base_frequency: Option<f64>,
    /// Primitive integer ratios `m_ℓ`, aligned with `frequencies`.
    pub integer_ratios: Vec<u64>,
    /// `2π / Ω_0`.
    pub t_min: Option<f64>,
}

impl ResonanceProfile {
    fn incommensurate(frequencies: &[f64]) -> Self {
        ResonanceProfile {
            commensurate: false,
            sectors: Vec::new(),
            frequencies: frequencies.to_vec(),
            base_frequency: None,
            integer_ratios: Vec::new(),
            t_min: None,
        }
    }

    /// Attaches sector labels to the frequencies, in order.
    pub fn with_sectors(mut self, sectors: Vec<usize>) -> Self {
        assert_eq!(sectors.len(), self.frequencies.len());
        self.sectors = sectors;
        self
    }

    /// Integer ratio of sector `ell`, if the profile is commensurate and covers it.
    pub fn ratio_of(&self, ell: usize) -> Option<u64> {
        if !self.commensurate {
            return None;
        }
        let i = self.sectors.iter().position(|&s| s == ell)?;
        self.integer_ratios.get(i).copied()
    }
}

/// Best rational approximation `p/q` of `x ≥ 0` with `q ≤ max_den`.
pub fn best_rational(x: f64, max_den: u64) -> (u64, u64) {
    assert!(x >= 0.0 && x.is_finite() && max_den >= 1);
    let max_den = max_den as u128;
    let (mut p0, mut q0, mut p1, mut q1): (u128, u128, u128, u128) = (0, 1, 1, 0);
    let mut y = x;
    loop {
        let a = y.floor();
        if a > 1e18 {
            break;
        }
        let a_int = a as u128;
        let q2 = q0 + a_int * q1;
        if q2 > max_den {
            // Largest admissible semiconvergent against the last convergent.
            let k = (max_den - q0) / q1;
            let (ps, qs) = (p0 + k * p1, q0 + k * q1);
            let err_s = (x - ps as f64 / qs as f64).abs();
            let err_c = (x - p1 as f64 / q1 as f64).abs();
            if err_s < err_c {
                return (ps as u64, qs as u64);
            }
            break;
        }
        let p2 = p0 + a_int * p1;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = y - a;
        if frac <= 0.0 || p1 as f64 / q1 as f64 == x {
            break;
        }
        y = 1.0 / frac;
    }
    (p1 as u64, q1 as u64)
}

/// Finds primitive integers `m_i` and `Ω_0` with `Ω_i ≈ m_i Ω_0`.
///
/// Every ratio to the smallest frequency must be matched by a fraction with
/// denominator at most `max_denominator` to relative accuracy `rel_tol`.
pub fn detect_commensurability(frequencies: &[f64], max_denominator: u64, rel_tol: f64) -> ResonanceProfile {
    if frequencies.is_empty() || frequencies.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
        return ResonanceProfile::incommensurate(frequencies);
    }
    let reference = frequencies.iter().copied().fold(f64::INFINITY, f64::min);
    let mut fractions = Vec::with_capacity(frequencies.len());
    for &f in frequencies {
        let x = f / reference;
        let (p, q) = best_rational(x, max_denominator);
        if p == 0 || (x - p as f64 / q as f64).abs() > rel_tol * x {
            return ResonanceProfile::incommensurate(frequencies);
        }
        fractions.push((p, q));
    }
    let l = fractions.iter().fold(1u64, |acc, &(_, q)| acc.lcm(&q));
    let numerators: Vec<u64> = fractions.iter().map(|&(p, q)| p * (l / q)).collect();
    let g = numerators.iter().fold(0u64, |acc, &a| acc.gcd(&a));
    let ratios: Vec<u64> = numerators.iter().map(|a| a / g).collect();
    // Least-squares fit of Ω_0 over all sectors.
    let num: f64 = frequencies.iter().zip(&ratios).map(|(f, &m)| f * m as f64).sum();
    let den: f64 = ratios.iter().map(|&m| (m * m) as f64).sum();
    let base = num / den;
    ResonanceProfile {
        commensurate: true,
        sectors: Vec::new(),
        frequencies: frequencies.to_vec(),
        base_frequency: Some(base),
        integer_ratios: ratios,
        t_min: Some(2.0 * PI / base),
    }
}
