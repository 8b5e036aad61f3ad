//! Geometric comparison of sampled periodic trajectories.
//!
//! Two particles are synchronized when one retraces the other's path after a
//! time shift that lands on the sample grid. Synchronized particles are
//! grouped into blocks; a single block with a uniform shift between
//! consecutive labels is a choreography.

use serde::Serialize;
use thiserror::Error;

use crate::dynamics::{Trajectory, TrajectorySource};
use crate::model::SystemSpec;
use crate::modes::AnalyticFlow;
use crate::state::{mean, PhaseState, StateError, Vec2};

/// Relative residual tolerance for data known to machine precision.
pub const DEFAULT_EPS_REL: f64 = 1e-6;
/// Relative residual tolerance for data transcribed to a few decimals.
pub const PRINTED_EPS_REL: f64 = 1e-3;
/// Inter-block distances below this multiple of `eps_rel · diameter` mean
/// the blocks share one geometric trace.
pub const DISTINCT_TRACE_FACTOR: f64 = 10.0;
const DIAMETER_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("particle index {index} out of range for n = {n}")]
    BadIndex { index: usize, n: usize },
    #[error("shift index {shift} out of range for {samples} samples")]
    BadShift { shift: usize, samples: usize },
    #[error("configuration diameter {0:e} is below the resolution floor")]
    DegenerateDiameter(f64),
    #[error("at least 4 samples are required, got {0}")]
    TooFewSamples(usize),
    #[error("period must be positive and finite, got {0}")]
    BadPeriod(f64),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Samples per period: `2520·⌈n/7⌉`, rounded up to a multiple of `n`.
pub fn default_samples(n: usize) -> usize {
    let base = 2520 * n.div_ceil(7);
    base.div_ceil(n) * n
}

/// Exact states on the uniform grid `t_0 + kT/samples`, `k = 0..samples`,
/// with the center of mass removed from each.
pub fn sample_period(spec: &SystemSpec, initial: &PhaseState, period: f64, samples: usize) -> Result<Trajectory, TraceError> {
    if !(period.is_finite() && period > 0.0) {
        return Err(TraceError::BadPeriod(period));
    }
    if samples < 4 {
        return Err(TraceError::TooFewSamples(samples));
    }
    let flow = AnalyticFlow::new(spec, &initial.without_center_of_mass())?;
    let times: Vec<f64> = (0..samples).map(|k| initial.t + period * k as f64 / samples as f64).collect();
    let states = times
        .iter()
        .map(|&t| {
            let s = flow.state_at(t);
            let c = mean(&s.positions);
            PhaseState {
                positions: s.positions.iter().map(|r| r - c).collect(),
                ..s
            }
        })
        .collect();
    Ok(Trajectory {
        times,
        states,
        spec: spec.clone(),
        source: TrajectorySource::Analytic { period, samples },
    })
}

/// Particle paths of a trajectory laid out for repeated shift comparisons.
struct Paths {
    paths: Vec<Vec<Vec2>>,
    samples: usize,
}

impl Paths {
    fn new(traj: &Trajectory) -> Self {
        let n = traj.states.first().map_or(0, |s| s.n());
        Paths {
            paths: (0..n).map(|i| traj.path(i)).collect(),
            samples: traj.len(),
        }
    }

    /// `max_k |r_j(t_k) − r_i(t_{k+shift})|`, abandoning the scan once the
    /// running maximum exceeds `bound`.
    fn residual(&self, i: usize, j: usize, shift: usize, bound: f64) -> Option<f64> {
        let (a, b) = (&self.paths[i], &self.paths[j]);
        let s = self.samples;
        let mut worst = 0.0f64;
        for k in 0..s {
            let d = (b[k] - a[(k + shift) % s]).norm();
            if d > worst {
                worst = d;
                if worst > bound {
                    return None;
                }
            }
        }
        Some(worst)
    }

    fn residual_exact(&self, i: usize, j: usize, shift: usize) -> f64 {
        self.residual(i, j, shift, f64::INFINITY).unwrap_or(f64::INFINITY)
    }

    /// Discrete Hausdorff distance between the point sets of two paths.
    fn hausdorff(&self, i: usize, j: usize) -> f64 {
        directed_hausdorff(&self.paths[i], &self.paths[j]).max(directed_hausdorff(&self.paths[j], &self.paths[i]))
    }

    fn diameter(&self) -> f64 {
        2.0 * self
            .paths
            .iter()
            .flatten()
            .map(|r| r.norm())
            .fold(0.0, f64::max)
    }
}

/// Early-break directed Hausdorff distance. Consecutive samples have nearby
/// nearest neighbours, so each search starts at the previous match.
fn directed_hausdorff(a: &[Vec2], b: &[Vec2]) -> f64 {
    let m = b.len();
    let mut worst = 0.0f64;
    let mut start = 0;
    for p in a {
        let mut best = f64::INFINITY;
        let mut best_idx = start;
        for k in 0..m {
            let idx = (start + k) % m;
            let d = (p - b[idx]).norm_squared();
            if d < best {
                best = d;
                best_idx = idx;
                if best <= worst {
                    break;
                }
            }
        }
        start = best_idx;
        worst = worst.max(best);
    }
    worst.sqrt()
}

/// `max_k |r_j(t_k) − r_i(t_{k+shift})|` over the sample grid, 0-based
/// particle indices. Zero means `r_j(t) = r_i(t + shift·T/samples)`.
pub fn timeshift_residual(traj: &Trajectory, i: usize, j: usize, shift: usize) -> Result<f64, TraceError> {
    let n = traj.states.first().map_or(0, |s| s.n());
    for index in [i, j] {
        if index >= n {
            return Err(TraceError::BadIndex { index, n });
        }
    }
    if shift >= traj.len() {
        return Err(TraceError::BadShift {
            shift,
            samples: traj.len(),
        });
    }
    Ok(Paths::new(traj).residual_exact(i, j, shift))
}

/// One group of mutually synchronized particles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Block {
    /// 1-based labels ordered by their time shift relative to the first.
    pub members: Vec<usize>,
    /// Shift of each member relative to the first member, in time units.
    pub shifts: Vec<f64>,
    /// The same shifts in sample-grid steps.
    pub shift_steps: Vec<usize>,
    /// Largest residual of any member against the first member.
    pub max_residual: f64,
    /// The shifts are exactly the multiples of `T/|block|`.
    pub uniform_shifts: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceReport {
    pub n: usize,
    pub period: f64,
    pub samples: usize,
    pub eps_rel: f64,
    pub diameter: f64,
    pub blocks: Vec<Block>,
    /// Hausdorff distances between block representatives, indexed like `blocks`.
    pub distances: Vec<Vec<f64>>,
    /// Every pair of blocks lies on clearly different curves.
    pub distinct_traces: bool,
    pub single_trace: bool,
    pub global_shift_consistent: bool,
    /// `c` such that particle `j+1` follows particle `j` by `c·T/n`.
    pub global_shift_step: Option<usize>,
}

impl TraceReport {
    /// Block sizes in decreasing order, e.g. `[2, 2, 1]`.
    pub fn shape(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.blocks.iter().map(|b| b.members.len()).collect();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }

    /// Blocks as sorted 1-based label sets.
    pub fn block_sets(&self) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| {
                let mut m = b.members.clone();
                m.sort_unstable();
                m
            })
            .collect()
    }

    /// Some pair of blocks shares a geometric trace.
    pub fn phase_split(&self) -> bool {
        self.blocks.len() > 1 && !self.distinct_traces
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Groups particles of a periodic sample into synchronized blocks.
///
/// Candidate shifts are the grid points `k·samples/b` for every `b ≤ n`
/// dividing `samples`. Particles `i` and `j` are linked when some candidate
/// shift brings the residual within `eps_rel · diameter`.
pub fn partition(traj: &Trajectory, period: f64, eps_rel: f64) -> Result<TraceReport, TraceError> {
    let samples = traj.len();
    if samples < 4 {
        return Err(TraceError::TooFewSamples(samples));
    }
    let paths = Paths::new(traj);
    let n = paths.paths.len();
    let diameter = paths.diameter();
    if !(diameter >= DIAMETER_FLOOR) {
        return Err(TraceError::DegenerateDiameter(diameter));
    }
    let threshold = eps_rel * diameter;

    let mut candidates: Vec<usize> = (1..=n)
        .filter(|b| samples % b == 0)
        .flat_map(|b| (0..b).map(move |k| k * (samples / b)))
        .collect();
    candidates.sort_unstable();
    candidates.dedup();

    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if find(&mut parent, i) == find(&mut parent, j) {
                continue;
            }
            if candidates.iter().any(|&s| paths.residual(i, j, s, threshold).is_some()) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[rj.max(ri)] = ri.min(rj);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        match groups.iter_mut().find(|g| find(&mut parent, g[0]) == root) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }

    let dt = period / samples as f64;
    let blocks: Vec<Block> = groups
        .iter()
        .map(|g| {
            let first = g[0];
            let b = g.len();
            let mut entries: Vec<(usize, usize, f64)> = g
                .iter()
                .map(|&j| {
                    let (shift, res) = candidates
                        .iter()
                        .map(|&s| (s, paths.residual_exact(first, j, s)))
                        .fold((0, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best });
                    (j, shift, res)
                })
                .collect();
            entries.sort_by_key(|e| (e.1, e.0));
            let steps: Vec<usize> = entries.iter().map(|e| e.1).collect();
            let uniform = samples % b == 0 && steps.iter().enumerate().all(|(k, &s)| s == k * (samples / b));
            Block {
                members: entries.iter().map(|e| e.0 + 1).collect(),
                shifts: steps.iter().map(|&s| s as f64 * dt).collect(),
                shift_steps: steps,
                max_residual: entries.iter().map(|e| e.2).fold(0.0, f64::max),
                uniform_shifts: uniform,
            }
        })
        .collect();

    let reps: Vec<usize> = groups.iter().map(|g| g[0]).collect();
    let mut distances = vec![vec![0.0; reps.len()]; reps.len()];
    for a in 0..reps.len() {
        for b in a + 1..reps.len() {
            let d = paths.hausdorff(reps[a], reps[b]);
            distances[a][b] = d;
            distances[b][a] = d;
        }
    }
    let distinct_threshold = DISTINCT_TRACE_FACTOR * threshold;
    let distinct_traces = (0..reps.len()).all(|a| (0..reps.len()).all(|b| a == b || distances[a][b] > distinct_threshold));

    let global_shift_step = if groups.len() == 1 && samples % n == 0 {
        (1..n).find(|c| {
            let shift = c * samples / n;
            (0..n).all(|j| paths.residual(j, (j + 1) % n, shift, threshold).is_some())
        })
    } else {
        None
    };
    let global_shift_consistent = global_shift_step.is_some();
    Ok(TraceReport {
        n,
        period,
        samples,
        eps_rel,
        diameter,
        single_trace: blocks.len() == 1 && blocks[0].members.len() == n && global_shift_consistent,
        blocks,
        distances,
        distinct_traces,
        global_shift_consistent,
        global_shift_step,
    })
}

/// Discrete Hausdorff distance between the traces of two blocks, using the
/// first listed member of each as representative.
pub fn curve_distance(traj: &Trajectory, block_a: &[usize], block_b: &[usize]) -> Result<f64, TraceError> {
    let n = traj.states.first().map_or(0, |s| s.n());
    let (a, b) = match (block_a.first(), block_b.first()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(TraceError::BadIndex { index: 0, n }),
    };
    for index in [a, b] {
        if index == 0 || index > n {
            return Err(TraceError::BadIndex { index, n });
        }
    }
    Ok(Paths::new(traj).hausdorff(a - 1, b - 1))
}
