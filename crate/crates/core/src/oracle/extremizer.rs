//! Exact extremal configurations for the vertices `F_n = (ω_n(r), 2, 2^{-n})`.
//!
//! The selection is the all-right chain `I ⊃ I_+ ⊃ ... ⊃ I_{+^n}` plus
//! both halves of the last link, and the function is flat mass `2^n ω_n`
//! on `I_{+^n}`. Telescoping gives `A^r f ≡ 1` exactly on `I_{+^n}`:
//!
//! ```text
//! ω_n^r (1 + 2^r + ... + 2^{nr} + 2^{nr}) = 1,
//! ```
//!
//! so the level set at λ = 1 is exactly `I_{+^n}` and the fraction is the
//! dyadic number `2^{-n}`, while the root mass telescopes to exactly 2.

use serde::Serialize;

use super::OracleError;
use crate::closedform::omega_seq_unchecked;
use crate::dyadic::{CarlesonSequence, NodeId, StepFunction, MAX_TREE_DEPTH};
use crate::operators::{apply_sparse_power, level_set_fraction, weak_quotient};

/// Replay diagnostics for one vertex extremizer.
#[derive(Debug, Clone, Serialize)]
pub struct ExtremizerReplay {
    pub n: u32,
    pub r: f64,
    pub omega_n: f64,
    pub mean: f64,
    pub root_mass: f64,
    pub two_carleson: bool,
    pub fraction: f64,
    pub quotient: f64,
}

/// Builds the pair `(α_n, f_n)` attaining `F_n` at tree depth `n + 2`.
///
/// The flat value on `I_{+^n}` starts at `2^n ω_n(r)` and is nudged up by
/// single ulps (at most a handful) until the replayed operator clears the
/// level `1` on all of `I_{+^n}`, compensating for floating-point rounding
/// in the power sums; the mean stays within a few ulps of `ω_n(r)`.
pub fn build_vertex_extremizer(
    r: f64,
    n: u32,
) -> Result<(CarlesonSequence, StepFunction), OracleError> {
    if !r.is_finite() || r <= 0.0 {
        return Err(OracleError::BadParameter {
            name: "r",
            value: r,
        });
    }
    let depth = n + 2;
    if depth > MAX_TREE_DEPTH {
        return Err(OracleError::ExtremizerTooDeep(n, depth));
    }

    let mut selected: Vec<NodeId> = (0..=n)
        .map(|k| NodeId::new(k, (1u64 << k) - 1).expect("all-right chain"))
        .collect();
    let tail = (1u64 << n) - 1;
    selected.push(NodeId::new(n + 1, 2 * tail).expect("left half of chain end"));
    selected.push(NodeId::new(n + 1, 2 * tail + 1).expect("right half of chain end"));
    let seq = CarlesonSequence::new(depth, &selected).expect("chain masses telescope to 2");

    let leaves = 1usize << depth;
    let support_start = tail as usize * 4;
    let target = 2f64.powi(-(n as i32));
    let mut value = (1u64 << n) as f64 * omega_seq_unchecked(r, n);
    for _ in 0..256 {
        let mut leaf_values = vec![0.0; leaves];
        leaf_values[support_start..support_start + 4].fill(value);
        let f = StepFunction::new(depth, leaf_values).expect("valid leaves");
        let out = apply_sparse_power(&seq, &f, r).expect("depths match");
        if level_set_fraction(&out, 1.0) >= target {
            return Ok((seq, f));
        }
        value = f64::from_bits(value.to_bits() + 1);
    }
    unreachable!("the power sum is 1 up to rounding; 256 ulps always suffice")
}

/// Builds the extremizer and replays it through the operator stack.
pub fn replay_vertex_extremizer(r: f64, n: u32) -> Result<ExtremizerReplay, OracleError> {
    let (seq, f) = build_vertex_extremizer(r, n)?;
    let out = apply_sparse_power(&seq, &f, r).expect("depths match");
    let fraction = level_set_fraction(&out, 1.0);
    Ok(ExtremizerReplay {
        n,
        r,
        omega_n: omega_seq_unchecked(r, n),
        mean: f.mean(),
        root_mass: seq.carleson_mass(&NodeId::root()).expect("root in tree"),
        two_carleson: seq.is_two_carleson(),
        fraction,
        quotient: weak_quotient(&seq, &f, r, 1.0).expect("positive mean"),
    })
}
