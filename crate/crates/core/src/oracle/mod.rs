//! Independent lower-bound machinery for the closed-form surface.
//!
//! Three routes, none of which trusts the closed form:
//!
//! * [`dp_value_iteration`] — finite-depth value iteration over a
//!   `(ω, A)` grid driven by the Bellman-point recursion: a cell may
//!   select the root (`γ = 1`, renormalizing the level) or not, then
//!   split its mean and mass budget between two children evaluated in the
//!   previous table. Every iterate is a certified lower bound and must
//!   stay below the closed form.
//! * [`enumerate_lower_bound`] (see [`enumerate`]) — exhaustive
//!   enumeration of truncated selections at small depth with coordinate
//!   ascent over step functions.
//! * [`build_vertex_extremizer`] (see [`extremizer`]) — exact
//!   configurations attaining the surface at its vertices.
//!
//! The mass coordinate `A` is treated as a *budget* (children may receive
//! less): this keeps the iteration well defined at zero remaining depth
//! and, by monotonicity of the target surface in `A`, keeps every iterate
//! a valid lower bound.

mod enumerate;
mod extremizer;

pub use enumerate::{enumerate_lower_bound, AscentOptions};
pub use extremizer::{build_vertex_extremizer, replay_vertex_extremizer, ExtremizerReplay};

use rayon::prelude::*;
use serde::Serialize;
use std::io::{self, Write};
use thiserror::Error;

use crate::closedform::{bellman_m, omega_seq_unchecked};

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("parameter {name} = {value} outside its domain")]
    BadParameter { name: &'static str, value: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("enumeration depth {0} exceeds the supported maximum 4")]
    EnumerationTooDeep(u32),
    #[error("extremizer index {0} needs tree depth {1}, beyond the supported maximum")]
    ExtremizerTooDeep(u32, u32),
}

/// Grid and schedule for the value iteration.
///
/// `omega_points` is any strictly increasing grid starting at 0 with the
/// points `ω_n(r)`, `n ≤ n_snap`, snapped onto it (nearest points are
/// replaced, preserving the count). `a_points` must be uniform on `[0, 2]`
/// with an even number of intervals so mass budgets stay exact in index
/// arithmetic. `split_stride` coarsens the split enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    omega_points: Vec<f64>,
    a_points: Vec<f64>,
    depth: usize,
    split_stride: usize,
    snap_indices: Vec<usize>,
}

impl GridSpec {
    pub fn new(
        r: f64,
        mut omega_points: Vec<f64>,
        a_points: Vec<f64>,
        depth: usize,
        split_stride: usize,
        n_snap: u32,
    ) -> Result<Self, OracleError> {
        if !r.is_finite() || r <= 0.0 {
            return Err(OracleError::BadParameter {
                name: "r",
                value: r,
            });
        }
        if depth == 0 {
            return Err(OracleError::InvalidGrid("depth must be positive".into()));
        }
        if split_stride == 0 {
            return Err(OracleError::InvalidGrid(
                "split_stride must be positive".into(),
            ));
        }
        if omega_points.len() < 2 || a_points.len() < 3 {
            return Err(OracleError::InvalidGrid(
                "grids need at least 2 ω and 3 A points".into(),
            ));
        }
        if omega_points[0] != 0.0 {
            return Err(OracleError::InvalidGrid("ω grid must start at 0".into()));
        }
        if !strictly_increasing(&omega_points) {
            return Err(OracleError::InvalidGrid(
                "ω grid must be strictly increasing".into(),
            ));
        }

        // A grid: uniform on [0, 2], even interval count, normalized to
        // exact index values.
        let half = a_points.len() - 1;
        if !half.is_multiple_of(2) {
            return Err(OracleError::InvalidGrid(
                "A grid needs an even interval count".into(),
            ));
        }
        let mut normalized_a = Vec::with_capacity(a_points.len());
        for (j, &a) in a_points.iter().enumerate() {
            let exact = 2.0 * j as f64 / half as f64;
            if (a - exact).abs() > 1e-9 {
                return Err(OracleError::InvalidGrid(format!(
                    "A grid must be uniform on [0,2]: point {j} is {a}, expected {exact}"
                )));
            }
            normalized_a.push(exact);
        }

        // Snap ω_n(r), n ≤ n_snap, onto the grid by replacing the nearest
        // interior point; exact matches are left alone.
        let mut targets = Vec::new();
        for n in 0..=n_snap {
            let target = omega_seq_unchecked(r, n);
            if target >= *omega_points.last().expect("nonempty") || target <= 0.0 {
                continue;
            }
            let idx = nearest_index(&omega_points, target).clamp(1, omega_points.len() - 2);
            omega_points[idx] = target;
            targets.push(target);
        }
        omega_points.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
        omega_points.dedup();
        if !strictly_increasing(&omega_points) {
            return Err(OracleError::InvalidGrid(
                "ω grid degenerate after snapping".into(),
            ));
        }
        let snap_indices = targets
            .iter()
            .map(|t| {
                omega_points
                    .binary_search_by(|x| x.partial_cmp(t).expect("finite"))
                    .map_err(|_| {
                        OracleError::InvalidGrid(format!("snap point {t} lost; grid too coarse"))
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;

        Ok(GridSpec {
            omega_points,
            a_points: normalized_a,
            depth,
            split_stride,
            snap_indices,
        })
    }

    /// The reference schedule: 401 mixed linear/log ω points on [0, 2]
    /// with `ω_n(r)`, n ≤ 6, snapped in; 101 uniform A points; depth 12;
    /// split stride 4.
    pub fn reference(r: f64) -> Result<Self, OracleError> {
        Self::with_resolution(r, 401, 101, 12, 4)
    }

    /// Like [`GridSpec::reference`] with custom sizes. `n_omega ≥ 81` is
    /// split 4:1 between a linear and a log section.
    pub fn with_resolution(
        r: f64,
        n_omega: usize,
        n_a: usize,
        depth: usize,
        split_stride: usize,
    ) -> Result<Self, OracleError> {
        if n_omega < 81 {
            return Err(OracleError::InvalidGrid("need at least 81 ω points".into()));
        }
        let n_log = n_omega / 5;
        let n_linear = n_omega - n_log;
        let mut omega: Vec<f64> = (0..n_linear)
            .map(|i| 2.0 * i as f64 / (n_linear - 1) as f64)
            .collect();
        let (lo, hi) = ((1e-6f64).ln(), (2f64).ln());
        omega.extend((1..=n_log).map(|i| (lo + (hi - lo) * i as f64 / (n_log + 1) as f64).exp()));
        omega.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        omega.dedup();
        let a: Vec<f64> = (0..n_a)
            .map(|j| 2.0 * j as f64 / (n_a - 1) as f64)
            .collect();
        Self::new(r, omega, a, depth, split_stride, 6)
    }

    pub fn omega_points(&self) -> &[f64] {
        &self.omega_points
    }

    pub fn a_points(&self) -> &[f64] {
        &self.a_points
    }

    pub fn omega_max(&self) -> f64 {
        *self.omega_points.last().expect("nonempty")
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn split_stride(&self) -> usize {
        self.split_stride
    }
}

fn strictly_increasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[0] < w[1]) && values.iter().all(|v| v.is_finite())
}

fn nearest_index(sorted: &[f64], target: f64) -> usize {
    let pos = sorted.partition_point(|&x| x < target);
    if pos == 0 {
        0
    } else if pos >= sorted.len() {
        sorted.len() - 1
    } else if (sorted[pos] - target).abs() < (target - sorted[pos - 1]).abs() {
        pos
    } else {
        pos - 1
    }
}

/// Value-iteration results: `iterations[k]` is `W_k` over
/// `omega_points × a_points`, row-major in ω.
#[derive(Debug, Clone)]
pub struct ValueTable {
    grid: GridSpec,
    iterations: Vec<Vec<f64>>,
}

impl ValueTable {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn iterations(&self) -> &[Vec<f64>] {
        &self.iterations
    }

    pub fn value(&self, k: usize, omega_idx: usize, a_idx: usize) -> f64 {
        self.iterations[k][omega_idx * self.grid.a_points.len() + a_idx]
    }

    pub fn final_values(&self) -> &[f64] {
        self.iterations.last().expect("at least W_0")
    }

    /// Largest cellwise decrease between consecutive iterations
    /// (nonpositive when the iteration is monotone, as it must be).
    pub fn max_iteration_decrease(&self) -> f64 {
        self.iterations
            .windows(2)
            .flat_map(|w| w[0].iter().zip(w[1].iter()).map(|(a, b)| a - b))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// CSV export `omega,A,W_k,M,gap` of the final iterate against the
    /// closed form.
    pub fn write_csv<W: Write>(&self, r: f64, mut out: W) -> io::Result<()> {
        writeln!(out, "omega,A,W_k,M,gap")?;
        let n_a = self.grid.a_points.len();
        let w = self.final_values();
        for (i, &omega) in self.grid.omega_points.iter().enumerate() {
            for (j, &a) in self.grid.a_points.iter().enumerate() {
                let value = w[i * n_a + j];
                let m = bellman_m(r, omega, a).expect("grid point in domain");
                writeln!(
                    out,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    omega,
                    a,
                    value,
                    m,
                    m - value
                )?;
            }
        }
        Ok(())
    }
}

/// Bracketing interpolation coefficients for an off-grid ω query:
/// `(index, t)` with the value `(1-t)·v[index] + t·v[index+1]`.
/// Arguments above the grid are clamped to the top point (sound for a
/// lower bound because the target surface is nondecreasing in ω).
fn interp_coeff(omega_points: &[f64], q: f64) -> (usize, f64) {
    let last = omega_points.len() - 1;
    if q >= omega_points[last] {
        return (last - 1, 1.0);
    }
    if q <= 0.0 {
        return (0, 0.0);
    }
    let hi = omega_points.partition_point(|&x| x <= q);
    let lo = hi - 1;
    let t = (q - omega_points[lo]) / (omega_points[hi] - omega_points[lo]);
    (lo, t)
}

#[inline]
fn interp_value(prev: &[f64], n_a: usize, coeff: (usize, f64), a_idx: usize) -> f64 {
    let (lo, t) = coeff;
    let a = prev[lo * n_a + a_idx];
    let b = prev[(lo + 1) * n_a + a_idx];
    a + t * (b - a)
}

/// Candidate split indices for one mass budget `b = j1 + j2` (in grid
/// index units): the strided range plus the splits that matter — the
/// endpoints, the symmetric split, and the splits placing `A = 1` or
/// `A = 2` on a child (those enable the jump chain).
fn a_split_candidates(budget: usize, half: usize, stride: usize) -> Vec<usize> {
    let lo = budget.saturating_sub(half);
    let hi = half.min(budget);
    let mut out: Vec<usize> = (lo..=hi).step_by(stride).collect();
    out.extend([hi, budget / 2, budget - budget / 2]);
    for special in [half / 2, half] {
        if (lo..=hi).contains(&special) {
            out.push(special);
        }
        if special <= budget && (lo..=hi).contains(&(budget - special)) {
            out.push(budget - special);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// One Bellman update of a single cell from the previous table.
#[allow(clippy::too_many_arguments)]
fn cell_update(
    prev: &[f64],
    grid: &GridSpec,
    r: f64,
    i: usize,
    j: usize,
    omega_candidates: &[usize],
    a_candidates: &[Vec<usize>],
    floor: f64,
) -> f64 {
    let omega_points = &grid.omega_points;
    let n_a = grid.a_points.len();
    let half = n_a - 1;
    let w = omega_points[i];
    let mut best = floor;

    for gamma in 0..=1usize {
        // selecting the root alone contributes mass 1
        if gamma == 1 && 2 * j < half {
            continue;
        }
        let scale = if gamma == 1 {
            let wr = w.powf(r);
            if wr >= 1.0 {
                // the level is cleared by the root jump alone
                best = best.max(1.0);
                continue;
            }
            (1.0 - wr).powf(1.0 / r)
        } else {
            1.0
        };
        let budget = 2 * j - gamma * half;
        let splits = &a_candidates[budget];

        // symmetric ω split first (also makes the update monotone in k)
        let sym = interp_coeff(omega_points, w / scale);
        for &j1 in splits {
            let v = 0.5
                * (interp_value(prev, n_a, sym, j1) + interp_value(prev, n_a, sym, budget - j1));
            if v > best {
                best = v;
            }
        }

        for &i1 in omega_candidates {
            let w1 = omega_points[i1];
            if w1 > 2.0 * w {
                break;
            }
            let c1 = interp_coeff(omega_points, w1 / scale);
            let c2 = interp_coeff(omega_points, (2.0 * w - w1) / scale);
            for &j1 in splits {
                let v = 0.5
                    * (interp_value(prev, n_a, c1, j1) + interp_value(prev, n_a, c2, budget - j1));
                if v > best {
                    best = v;
                }
            }
        }
    }
    best
}

/// Finite-depth value iteration: `W_0 ≡ 0` and
///
/// ```text
/// W_{k+1}(ω, A) = max over γ ∈ {0,1}, γ ≤ 1_{A≥1}, of
///     1                                   if γ = 1 and ω^r ≥ 1,
///     max over splits ω_1 + ω_2 = 2ω, A_1 + A_2 = 2(A-γ) of
///         (W_k(ω_1/s, A_1) + W_k(ω_2/s, A_2)) / 2,  s = (1 - γ ω^r)^{1/r}.
/// ```
///
/// Off-grid ω arguments are linearly interpolated and clamped at
/// `omega_max`; mass splits use exact index arithmetic. Each iterate is
/// nondecreasing in `k`, `ω` and `A`, stays within `[0, 1]`, and is a
/// lower bound for the closed-form surface.
pub fn dp_value_iteration(r: f64, grid: &GridSpec) -> Result<ValueTable, OracleError> {
    if !r.is_finite() || r <= 0.0 {
        return Err(OracleError::BadParameter {
            name: "r",
            value: r,
        });
    }
    let n_w = grid.omega_points.len();
    let n_a = grid.a_points.len();
    let half = n_a - 1;

    // ω split candidates shared by all cells: strided, endpoints, snap
    // points, and the point ω = 1 (obstacle edge).
    let mut omega_candidates: Vec<usize> = (0..n_w).step_by(grid.split_stride).collect();
    omega_candidates.push(n_w - 1);
    omega_candidates.extend_from_slice(&grid.snap_indices);
    if let Ok(one) = grid
        .omega_points
        .binary_search_by(|x| x.partial_cmp(&1.0).unwrap())
    {
        omega_candidates.push(one);
    }
    omega_candidates.sort_unstable();
    omega_candidates.dedup();

    let a_candidates: Vec<Vec<usize>> = (0..=2 * half)
        .map(|b| a_split_candidates(b, half, grid.split_stride))
        .collect();

    let mut iterations = vec![vec![0.0f64; n_w * n_a]];
    for _ in 0..grid.depth {
        let prev = iterations.last().expect("seeded with W_0");
        let mut next: Vec<f64> = (0..n_w * n_a)
            .into_par_iter()
            .map(|cell| {
                let (i, j) = (cell / n_a, cell % n_a);
                cell_update(
                    prev,
                    grid,
                    r,
                    i,
                    j,
                    &omega_candidates,
                    &a_candidates,
                    prev[cell],
                )
            })
            .collect();
        // monotone envelope in ω and A: sound because the target surface
        // is nondecreasing in both, and it sharpens the lower bound
        for i in 1..n_w {
            for j in 0..n_a {
                let below = next[(i - 1) * n_a + j];
                let v = &mut next[i * n_a + j];
                if below > *v {
                    *v = below;
                }
            }
        }
        for i in 0..n_w {
            for j in 1..n_a {
                let left = next[i * n_a + j - 1];
                let v = &mut next[i * n_a + j];
                if left > *v {
                    *v = left;
                }
            }
        }
        iterations.push(next);
    }
    Ok(ValueTable {
        grid: grid.clone(),
        iterations,
    })
}

/// Per-checkpoint gap between the closed form and the final iterate.
#[derive(Debug, Clone, Serialize)]
pub struct CheckpointGap {
    pub omega: f64,
    pub a: f64,
    pub value: f64,
    pub closed_form: f64,
    pub gap: f64,
}

/// Soundness and convergence report for a finished value iteration.
#[derive(Debug, Clone, Serialize)]
pub struct DpReport {
    /// Largest `W - M` over all cells; must stay within interpolation noise.
    pub max_excess: f64,
    pub worst_cell: (f64, f64),
    pub interp_tol: f64,
    pub gap_tol: f64,
    pub checkpoints: Vec<CheckpointGap>,
    pub passed: bool,
}

pub const DEFAULT_INTERP_TOL: f64 = 1e-9;
pub const DEFAULT_GAP_TOL: f64 = 0.03;

/// Compares the final iterate against the closed form: upper soundness
/// everywhere (`W ≤ M + interp_tol`) and convergence at the requested
/// checkpoints (`M - W ≤ gap_tol`, checkpoints mapped to nearest cells).
pub fn dp_compare(
    table: &ValueTable,
    r: f64,
    checkpoints: &[(f64, f64)],
    interp_tol: f64,
    gap_tol: f64,
) -> DpReport {
    let grid = &table.grid;
    let n_a = grid.a_points.len();
    let w = table.final_values();

    let mut max_excess = f64::NEG_INFINITY;
    let mut worst_cell = (0.0, 0.0);
    for (i, &omega) in grid.omega_points.iter().enumerate() {
        for (j, &a) in grid.a_points.iter().enumerate() {
            let m = bellman_m(r, omega, a).expect("grid point in domain");
            let excess = w[i * n_a + j] - m;
            if excess > max_excess {
                max_excess = excess;
                worst_cell = (omega, a);
            }
        }
    }

    let gaps: Vec<CheckpointGap> = checkpoints
        .iter()
        .map(|&(omega, a)| {
            let i = nearest_index(&grid.omega_points, omega);
            let j = nearest_index(&grid.a_points, a);
            let (omega, a) = (grid.omega_points[i], grid.a_points[j]);
            let value = w[i * n_a + j];
            let closed_form = bellman_m(r, omega, a).expect("grid point in domain");
            CheckpointGap {
                omega,
                a,
                value,
                closed_form,
                gap: closed_form - value,
            }
        })
        .collect();

    let passed = max_excess <= interp_tol && gaps.iter().all(|g| g.gap <= gap_tol);
    DpReport {
        max_excess,
        worst_cell,
        interp_tol,
        gap_tol,
        checkpoints: gaps,
        passed,
    }
}

/// The standard convergence checkpoints: the vertices `F_0..F_3` on the
/// `A = 2` edge and the corner `G_0 = (1, 1)`.
pub fn standard_checkpoints(r: f64) -> Vec<(f64, f64)> {
    let mut points: Vec<(f64, f64)> = (0..=3u32)
        .map(|n| (omega_seq_unchecked(r, n), 2.0))
        .collect();
    points.push((1.0, 1.0));
    points
}
