//! Evaluation of the sparse operator family on step functions: the
//! `r`-power sparse operator, the power-mean operator, the adapted maximal
//! operator, and level-set measures.
//!
//! All node averages are computed in one bottom-up pass and accumulated
//! top-down, so applying an operator is `O(2^N)` total. Empty sums are `0`
//! and `0^r = 0` for `r > 0`, so every output vanishes off the union of
//! generation-0 selected intervals.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dyadic::{CarlesonSequence, NodeId, StepFunction};

#[derive(Debug, Error, PartialEq)]
pub enum OperatorError {
    #[error("sequence depth {seq_depth} and function depth {f_depth} differ")]
    DepthMismatch { seq_depth: u32, f_depth: u32 },
    #[error("exponent {name} = {value} outside its domain")]
    BadExponent { name: &'static str, value: f64 },
    #[error("level λ = {0} must be positive")]
    BadLevel(f64),
    #[error("f has zero mean")]
    ZeroMean,
}

/// Leafwise operator values, constant on each terminal interval.
///
/// For [`apply_sparse_power`] the stored values are the `r`-th power form
/// `Σ α_J ⟨f⟩_J^r 1_J`; use [`OperatorOutput::root`] for the operator
/// itself. The other operators store their values directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorOutput {
    depth: u32,
    values: Vec<f64>,
}

impl OperatorOutput {
    pub fn tree_depth(&self) -> u32 {
        self.depth
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Leafwise `1/r`-th root: turns the `r`-power form into `A_{α,r} f`.
    pub fn root(&self, r: f64) -> OperatorOutput {
        OperatorOutput {
            depth: self.depth,
            values: self.values.iter().map(|&v| v.powf(1.0 / r)).collect(),
        }
    }
}

fn check_depths(seq: &CarlesonSequence, f: &StepFunction) -> Result<u32, OperatorError> {
    if seq.tree_depth() != f.tree_depth() {
        return Err(OperatorError::DepthMismatch {
            seq_depth: seq.tree_depth(),
            f_depth: f.tree_depth(),
        });
    }
    Ok(seq.tree_depth())
}

/// Top-down accumulation of a per-node term over selected ancestors:
/// `leaf ↦ fold over selected J ⊇ leaf of term(J)`.
fn accumulate(
    seq: &CarlesonSequence,
    node_term: &[f64],
    init: f64,
    fold: impl Fn(f64, f64) -> f64,
) -> Vec<f64> {
    let n = seq.tree_depth();
    let mut acc = vec![init];
    for d in 0..n {
        let mut next = vec![0.0; 1 << (d + 1)];
        for (k, slot) in next.iter_mut().enumerate() {
            let parent = NodeId::new(d, (k / 2) as u64).expect("in tree");
            *slot = if seq.is_selected(&parent) {
                fold(acc[k / 2], node_term[parent.heap_index()])
            } else {
                acc[k / 2]
            };
        }
        acc = next;
    }
    acc
}

/// The `r`-power form `A^r_{α,r} f = Σ_J α_J ⟨f⟩_J^r 1_J`.
pub fn apply_sparse_power(
    seq: &CarlesonSequence,
    f: &StepFunction,
    r: f64,
) -> Result<OperatorOutput, OperatorError> {
    if !r.is_finite() || r <= 0.0 {
        return Err(OperatorError::BadExponent {
            name: "r",
            value: r,
        });
    }
    let depth = check_depths(seq, f)?;
    let terms: Vec<f64> = f.node_averages().iter().map(|&a| a.powf(r)).collect();
    let values = accumulate(seq, &terms, 0.0, |acc, t| acc + t);
    Ok(OperatorOutput { depth, values })
}

/// The power-mean operator `Q_{α,p} f = Σ_J α_J ⟨f^p⟩_J^{1/p} 1_J`, `p ≥ 1`.
pub fn apply_power_mean(
    seq: &CarlesonSequence,
    f: &StepFunction,
    p: f64,
) -> Result<OperatorOutput, OperatorError> {
    if !p.is_finite() || p < 1.0 {
        return Err(OperatorError::BadExponent {
            name: "p",
            value: p,
        });
    }
    let depth = check_depths(seq, f)?;
    let f_pow = f
        .map(|v| v.powf(p))
        .expect("powers of nonnegative values are valid");
    let terms: Vec<f64> = f_pow
        .node_averages()
        .iter()
        .map(|&a| a.powf(1.0 / p))
        .collect();
    let values = accumulate(seq, &terms, 0.0, |acc, t| acc + t);
    Ok(OperatorOutput { depth, values })
}

/// The adapted maximal operator `A_{α,∞} f = sup_K ⟨f⟩_K 1_K` over
/// selected `K`; zero where no selected interval covers.
pub fn apply_maximal(
    seq: &CarlesonSequence,
    f: &StepFunction,
) -> Result<OperatorOutput, OperatorError> {
    let depth = check_depths(seq, f)?;
    let terms = f.node_averages();
    let values = accumulate(seq, &terms, 0.0, f64::max);
    Ok(OperatorOutput { depth, values })
}

/// Normalized level-set measure `2^{-N} · #{leaves with value ≥ λ}`.
/// The inequality is closed, so `λ` equal to a leaf value counts it in.
pub fn level_set_fraction(g: &OperatorOutput, lambda: f64) -> f64 {
    let hits = g.values.iter().filter(|&&v| v >= lambda).count();
    hits as f64 / g.values.len() as f64
}

/// The weak-type quotient `λ^{1/r} |{A^r_{α,r} f ≥ λ}| / ⟨f⟩_I` whose
/// supremum over admissible data is the sharp constant `C(r)`.
pub fn weak_quotient(
    seq: &CarlesonSequence,
    f: &StepFunction,
    r: f64,
    lambda: f64,
) -> Result<f64, OperatorError> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(OperatorError::BadLevel(lambda));
    }
    let mean = f.mean();
    if mean <= 0.0 {
        return Err(OperatorError::ZeroMean);
    }
    let output = apply_sparse_power(seq, f, r)?;
    Ok(lambda.powf(1.0 / r) * level_set_fraction(&output, lambda) / mean)
}
