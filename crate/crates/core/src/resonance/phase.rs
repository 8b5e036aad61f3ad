//! Sectorwise phase matching in exact integer arithmetic.
//!
//! A sector `ℓ` with integer frequency ratio `m` is compatible with the
//! cyclic time shift `T/n` at candidate period `T = s·T_min` when
//! `m·s ≡ ℓ (mod n)`. Degenerate sectors are merged and the merged group
//! passes if any of its labels satisfies the congruence.

use std::collections::BTreeSet;

use serde::Serialize;

use super::commensurability::ResonanceProfile;
use super::ResonanceError;
use crate::model::Spectrum;

/// Active sectors sharing one frequency, with their common integer ratio.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MergedGroup {
    pub labels: Vec<usize>,
    pub ratio: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseMatch {
    pub pass: bool,
    /// Least `s ∈ 1..=n` satisfying every group.
    pub witness_shift: Option<usize>,
    /// `s · T_min` when a witness exists.
    pub period: Option<f64>,
    /// Labels of the groups that fail at the best candidate shift.
    pub failing_sectors: BTreeSet<usize>,
    /// For each group (in order), the label that satisfied the congruence.
    pub labels_used: Vec<Option<usize>>,
}

/// Degeneracy groups of `spectrum` restricted to `active`, ordered by their
/// smallest label. Sectors absent from every group become singletons.
pub fn merge_degenerate(spectrum: &Spectrum, active: &BTreeSet<usize>) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = spectrum
        .degeneracy_groups
        .iter()
        .map(|g| g.iter().copied().filter(|l| active.contains(l)).collect::<Vec<_>>())
        .filter(|g| !g.is_empty())
        .collect();
    for &l in active {
        if !groups.iter().any(|g| g.contains(&l)) {
            groups.push(vec![l]);
        }
    }
    groups.sort();
    groups
}

fn satisfied_label(group: &MergedGroup, s: u64, n: u64) -> Option<usize> {
    let residue = (group.ratio % n) * (s % n) % n;
    group.labels.iter().copied().find(|&l| l as u64 % n == residue)
}

/// Integer form of the phase-matching test.
pub fn phase_matching_integer(groups: &[MergedGroup], n: usize) -> PhaseMatch {
    let nn = n as u64;
    let mut best: Option<(usize, usize)> = None;
    for s in 1..=n {
        let used: Vec<Option<usize>> = groups.iter().map(|g| satisfied_label(g, s as u64, nn)).collect();
        let count = used.iter().filter(|u| u.is_some()).count();
        if count == groups.len() {
            return PhaseMatch {
                pass: true,
                witness_shift: Some(s),
                period: None,
                failing_sectors: BTreeSet::new(),
                labels_used: used,
            };
        }
        if best.is_none_or(|(_, c)| count > c) {
            best = Some((s, count));
        }
    }
    let s = best.map_or(1, |b| b.0) as u64;
    let used: Vec<Option<usize>> = groups.iter().map(|g| satisfied_label(g, s, nn)).collect();
    let failing = groups
        .iter()
        .zip(&used)
        .filter(|(_, u)| u.is_none())
        .flat_map(|(g, _)| g.labels.iter().copied())
        .collect();
    PhaseMatch {
        pass: false,
        witness_shift: None,
        period: None,
        failing_sectors: failing,
        labels_used: used,
    }
}

/// Phase matching for merged groups of sector labels, reading each group's
/// integer ratio from `profile`.
pub fn phase_matching(profile: &ResonanceProfile, merged_groups: &[Vec<usize>], n: usize) -> Result<PhaseMatch, ResonanceError> {
    if !profile.commensurate {
        return Err(ResonanceError::NotCommensurate);
    }
    let groups = merged_groups
        .iter()
        .map(|labels| {
            let ratio = labels
                .iter()
                .find_map(|&l| profile.ratio_of(l))
                .ok_or(ResonanceError::MissingSector(labels[0]))?;
            Ok(MergedGroup {
                labels: labels.clone(),
                ratio,
            })
        })
        .collect::<Result<Vec<_>, ResonanceError>>()?;
    let mut out = phase_matching_integer(&groups, n);
    out.period = out
        .witness_shift
        .zip(profile.t_min)
        .map(|(s, t)| s as f64 * t);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Convention, Couplings, SystemSpec};
    use crate::resonance::detect_commensurability;

    fn groups(spec: &[(&[usize], u64)]) -> Vec<MergedGroup> {
        spec.iter()
            .map(|(l, m)| MergedGroup {
                labels: l.to_vec(),
                ratio: *m,
            })
            .collect()
    }

    #[test]
    fn four_body_nyquist() {
        let r = phase_matching_integer(&groups(&[(&[1], 1), (&[2], 2)]), 4);
        assert!(r.pass);
        assert_eq!(r.witness_shift, Some(1));
        let r = phase_matching_integer(&groups(&[(&[1], 1), (&[2], 4)]), 4);
        assert!(!r.pass);
        assert_eq!(r.failing_sectors, BTreeSet::from([2]));
    }

    #[test]
    fn six_body_cases() {
        let r = phase_matching_integer(&groups(&[(&[1], 1), (&[2], 2), (&[3], 3)]), 6);
        assert_eq!((r.pass, r.witness_shift), (true, Some(1)));
        let r = phase_matching_integer(&groups(&[(&[1], 1), (&[2, 3], 2)]), 6);
        assert_eq!((r.pass, r.witness_shift), (true, Some(1)));
        assert_eq!(r.labels_used, vec![Some(1), Some(2)]);
        let r = phase_matching_integer(&groups(&[(&[1], 1), (&[2], 2), (&[3], 4)]), 6);
        assert!(!r.pass);
        assert_eq!(r.failing_sectors, BTreeSet::from([3]));
    }

    #[test]
    fn lone_second_sector_needs_double_period() {
        let r = phase_matching_integer(&groups(&[(&[2], 1)]), 6);
        assert_eq!(r.witness_shift, Some(2));
    }

    #[test]
    fn merge_restricts_to_active() {
        let spec = SystemSpec::new(6, 1.0, 1.0, Couplings::exact_from_ratios(&[(7, 2), (1, 2), (-1, 1)]), Convention::ListedOnce).unwrap();
        let sp = spec.spectrum();
        assert_eq!(merge_degenerate(&sp, &BTreeSet::from([1, 2, 3])), vec![vec![1], vec![2, 3]]);
        assert_eq!(merge_degenerate(&sp, &BTreeSet::from([3])), vec![vec![3]]);
    }

    #[test]
    fn requires_commensurate_profile() {
        let p = detect_commensurability(&[1.0, 2f64.sqrt()], 64, 1e-9).with_sectors(vec![1, 2]);
        assert_eq!(phase_matching(&p, &[vec![1], vec![2]], 4), Err(ResonanceError::NotCommensurate));
        let p = detect_commensurability(&[1.0, 2.0], 64, 1e-9).with_sectors(vec![1, 2]);
        let r = phase_matching(&p, &[vec![1], vec![2]], 4).unwrap();
        assert!((r.period.unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-15);
    }
}
