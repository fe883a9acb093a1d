//! Exhaustive small-depth enumeration: every 2-Carleson truncated
//! selection within a root-mass budget, each paired with a coordinate
//! ascent over step functions of the prescribed mean. The best level-set
//! fraction found is a certified lower bound for the Bellman surface.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::OracleError;
use crate::dyadic::{CarlesonSequence, NodeId, StepFunction};
use crate::operators::{apply_sparse_power, level_set_fraction};

/// Knobs for the per-selection f-optimizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscentOptions {
    pub random_restarts: usize,
    pub max_sweeps: usize,
    pub seed: u64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        AscentOptions {
            random_restarts: 3,
            max_sweeps: 40,
            seed: 7,
        }
    }
}

/// Best level-set fraction at λ = 1 over all 2-Carleson selections of
/// depth ≤ `depth` with root mass ≤ `a_budget`, maximized over step
/// functions with mean `omega`. Deterministic given the options' seed.
///
/// Only selections that are maximal under bit-adding are optimized:
/// adding a selected interval never shrinks the operator, so the supremum
/// over all selections is attained on the maximal ones.
pub fn enumerate_lower_bound(
    r: f64,
    depth: u32,
    omega: f64,
    a_budget: f64,
    opts: &AscentOptions,
) -> Result<f64, OracleError> {
    if !r.is_finite() || r <= 0.0 {
        return Err(OracleError::BadParameter {
            name: "r",
            value: r,
        });
    }
    if depth == 0 || depth > 4 {
        return Err(OracleError::EnumerationTooDeep(depth));
    }
    if !omega.is_finite() || omega < 0.0 {
        return Err(OracleError::BadParameter {
            name: "omega",
            value: omega,
        });
    }
    if !(0.0..=2.0).contains(&a_budget) {
        return Err(OracleError::BadParameter {
            name: "a_budget",
            value: a_budget,
        });
    }

    let node_count = (1usize << depth) - 1;
    let mut best = 0.0f64;
    for mask in 0u32..(1u32 << node_count) {
        let Some(seq) = admissible(mask, depth, a_budget) else {
            continue;
        };
        if !is_maximal(&seq, mask, depth, a_budget) {
            continue;
        }
        let value = optimize_level_set(&seq, r, omega, opts);
        if value > best {
            best = value;
        }
        if best == 1.0 {
            break;
        }
    }
    Ok(best)
}

fn nodes_of_mask(mask: u32, depth: u32) -> Vec<NodeId> {
    let mut nodes = Vec::new();
    let mut bit = 0;
    for d in 0..depth {
        for k in 0..(1u64 << d) {
            if mask & (1 << bit) != 0 {
                nodes.push(NodeId::new(d, k).expect("in tree"));
            }
            bit += 1;
        }
    }
    nodes
}

fn admissible(mask: u32, depth: u32, a_budget: f64) -> Option<CarlesonSequence> {
    let seq = CarlesonSequence::new(depth, &nodes_of_mask(mask, depth)).ok()?;
    // masses are dyadic-exact, so a bare ≤ suffices
    (seq.carleson_mass(&NodeId::root()).expect("root in tree") <= a_budget).then_some(seq)
}

fn is_maximal(seq: &CarlesonSequence, mask: u32, depth: u32, a_budget: f64) -> bool {
    let node_count = (1usize << depth) - 1;
    for bit in 0..node_count {
        if mask & (1 << bit) == 0 && admissible(mask | (1 << bit), depth, a_budget).is_some() {
            return false;
        }
    }
    let _ = seq;
    true
}

/// Lexicographic ascent score: the level-set fraction first, then the
/// clipped total coverage `Σ min(A^r f, 1)` to climb plateaus.
fn score(seq: &CarlesonSequence, r: f64, f: &StepFunction) -> (f64, f64) {
    let out = apply_sparse_power(seq, f, r).expect("depths match");
    let fraction = level_set_fraction(&out, 1.0);
    let soft = out.values().iter().map(|&v| v.min(1.0)).sum();
    (fraction, soft)
}

fn optimize_level_set(seq: &CarlesonSequence, r: f64, omega: f64, opts: &AscentOptions) -> f64 {
    let depth = seq.tree_depth();
    let leaves = 1usize << depth;
    let mut best = 0.0f64;

    let mut starts: Vec<Vec<f64>> = Vec::new();
    // constant start
    starts.push(vec![omega; leaves]);
    // all mass concentrated on one node, uniformly
    for d in 0..=depth {
        for k in 0..(1u64 << d) {
            let width = leaves >> d;
            let mut values = vec![0.0; leaves];
            let start = k as usize * width;
            values[start..start + width].fill(omega * (1u64 << d) as f64);
            starts.push(values);
        }
    }
    // seeded random starts normalized to the mean
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.random_restarts {
        let raw: Vec<f64> = (0..leaves).map(|_| rng.gen::<f64>()).collect();
        let sum: f64 = raw.iter().sum();
        if sum > 0.0 {
            let scale = omega * leaves as f64 / sum;
            starts.push(raw.iter().map(|&v| v * scale).collect());
        }
    }

    for start in starts {
        let value = ascend(seq, r, start, opts.max_sweeps);
        if value > best {
            best = value;
        }
        if best == 1.0 {
            break;
        }
    }
    best
}

/// Greedy hill climb over mean-preserving mass transfers between leaves.
/// Transfer fractions are inverse powers of two so the moves stay exact.
fn ascend(seq: &CarlesonSequence, r: f64, start: Vec<f64>, max_sweeps: usize) -> f64 {
    const TRANSFERS: [f64; 4] = [1.0, 0.5, 0.25, 0.125];
    let depth = seq.tree_depth();
    let leaves = start.len();
    let mut values = start;
    let mut current = score(
        seq,
        r,
        &StepFunction::new(depth, values.clone()).expect("valid"),
    );

    for _ in 0..max_sweeps {
        let mut improved = false;
        for src in 0..leaves {
            if values[src] <= 0.0 {
                continue;
            }
            for dst in 0..leaves {
                if dst == src {
                    continue;
                }
                for t in TRANSFERS {
                    let delta = t * values[src];
                    let mut candidate = values.clone();
                    candidate[src] -= delta;
                    candidate[dst] += delta;
                    let f = StepFunction::new(depth, candidate.clone()).expect("valid");
                    let s = score(seq, r, &f);
                    if s > current {
                        current = s;
                        values = candidate;
                        improved = true;
                    }
                }
            }
        }
        if !improved || current.0 == 1.0 {
            break;
        }
    }
    current.0
}
