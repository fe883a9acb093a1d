//! Finite-depth dyadic trees over the unit interval, binary Carleson
//! selection sequences, and step functions on the terminal intervals.
//!
//! Everything is normalized to `|I| = 1`. A tree of depth `N` has nodes
//! `(d, k)` with `0 ≤ d ≤ N` and `0 ≤ k < 2^d`; the node `(d, k)` is the
//! interval `[k 2^{-d}, (k+1) 2^{-d})`. Selection bits are stored for
//! `d < N` in implicit heap order; nodes at depth `≥ N` are implicitly
//! unselected. Dyadic rationals with denominators up to `2^N` are exactly
//! representable in an `f64` for moderate depth (`N ≤ 40`), so all mass
//! and averaging arithmetic below is exact in floating point rather than
//! requiring rational arithmetic.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard cap on tree depth: keeps `2^N` allocations sane and dyadic
/// arithmetic exact in `f64`.
pub const MAX_TREE_DEPTH: u32 = 30;

#[derive(Debug, Error, PartialEq)]
pub enum DyadicError {
    #[error("position {position} out of range at depth {depth} (need < 2^depth)")]
    PositionOutOfRange { depth: u32, position: u64 },
    #[error("tree depth {0} outside supported range 1..={MAX_TREE_DEPTH}")]
    InvalidDepth(u32),
    #[error("node at depth {node_depth} outside tree of depth {tree_depth}")]
    NodeOutsideTree { node_depth: u32, tree_depth: u32 },
    #[error("selection violates the 2-Carleson condition: mass {mass} at ({depth},{position})")]
    NotCarleson {
        depth: u32,
        position: u64,
        mass: f64,
    },
    #[error("expected {expected} leaf values, got {got}")]
    LeafCountMismatch { expected: usize, got: usize },
    #[error("leaf value at index {index} is negative or non-finite: {value}")]
    BadLeafValue { index: usize, value: f64 },
}

/// Address of a dyadic subinterval: depth and left-to-right position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId {
    depth: u32,
    position: u64,
}

impl NodeId {
    pub fn new(depth: u32, position: u64) -> Result<Self, DyadicError> {
        if depth > 63 || position >= 1u64 << depth {
            return Err(DyadicError::PositionOutOfRange { depth, position });
        }
        Ok(NodeId { depth, position })
    }

    /// The whole interval `I`.
    pub const fn root() -> Self {
        NodeId {
            depth: 0,
            position: 0,
        }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn position(&self) -> u64 {
        self.position
    }

    /// Left half `J_-`.
    pub fn left_child(&self) -> Self {
        NodeId {
            depth: self.depth + 1,
            position: 2 * self.position,
        }
    }

    /// Right half `J_+`.
    pub fn right_child(&self) -> Self {
        NodeId {
            depth: self.depth + 1,
            position: 2 * self.position + 1,
        }
    }

    pub fn parent(&self) -> Option<Self> {
        (self.depth > 0).then(|| NodeId {
            depth: self.depth - 1,
            position: self.position / 2,
        })
    }

    /// Interval length `|J| = 2^{-depth}`.
    pub fn length(&self) -> f64 {
        2f64.powi(-(self.depth as i32))
    }

    /// True iff `other ⊆ self` (ancestor-or-self containment).
    pub fn contains(&self, other: &NodeId) -> bool {
        other.depth >= self.depth && (other.position >> (other.depth - self.depth)) == self.position
    }

    /// Heap-order index among all nodes of depth `< N`: `2^d - 1 + k`.
    pub(crate) fn heap_index(&self) -> usize {
        ((1u64 << self.depth) - 1 + self.position) as usize
    }
}

/// A binary selection sequence on a depth-truncated dyadic tree.
///
/// Bits are stored for every node of depth `< tree_depth`; deeper nodes are
/// implicitly `0`. [`CarlesonSequence::new`] enforces the 2-Carleson
/// condition (mass at most 2 inside every node); [`CarlesonSequence::new_unchecked`]
/// skips that check so that non-Carleson selections can be represented,
/// e.g. to exercise [`CarlesonSequence::is_two_carleson`] itself or to
/// enumerate raw bit patterns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SequenceRepr", into = "SequenceRepr")]
pub struct CarlesonSequence {
    tree_depth: u32,
    bits: Vec<bool>,
}

/// Wire format: `{"depth": N, "selected": [[d, k], ...]}`.
#[derive(Serialize, Deserialize)]
struct SequenceRepr {
    depth: u32,
    selected: Vec<(u32, u64)>,
}

impl From<CarlesonSequence> for SequenceRepr {
    fn from(seq: CarlesonSequence) -> Self {
        SequenceRepr {
            depth: seq.tree_depth,
            selected: seq
                .selected_nodes()
                .iter()
                .map(|n| (n.depth, n.position))
                .collect(),
        }
    }
}

impl TryFrom<SequenceRepr> for CarlesonSequence {
    type Error = DyadicError;

    fn try_from(repr: SequenceRepr) -> Result<Self, DyadicError> {
        let nodes = repr
            .selected
            .iter()
            .map(|&(d, k)| NodeId::new(d, k))
            .collect::<Result<Vec<_>, _>>()?;
        CarlesonSequence::new(repr.depth, &nodes)
    }
}

impl CarlesonSequence {
    /// Builds a sequence and verifies the 2-Carleson condition.
    pub fn new(tree_depth: u32, selected: &[NodeId]) -> Result<Self, DyadicError> {
        let seq = Self::new_unchecked(tree_depth, selected)?;
        if let Some((node, mass)) = seq.first_mass_violation() {
            return Err(DyadicError::NotCarleson {
                depth: node.depth,
                position: node.position,
                mass,
            });
        }
        Ok(seq)
    }

    /// Builds a sequence without the Carleson check. Node addresses are
    /// still validated against the tree. Intended for enumeration and for
    /// testing the check itself; most callers want [`CarlesonSequence::new`].
    pub fn new_unchecked(tree_depth: u32, selected: &[NodeId]) -> Result<Self, DyadicError> {
        if tree_depth == 0 || tree_depth > MAX_TREE_DEPTH {
            return Err(DyadicError::InvalidDepth(tree_depth));
        }
        let mut bits = vec![false; (1usize << tree_depth) - 1];
        for node in selected {
            if node.depth >= tree_depth {
                return Err(DyadicError::NodeOutsideTree {
                    node_depth: node.depth,
                    tree_depth,
                });
            }
            bits[node.heap_index()] = true;
        }
        Ok(CarlesonSequence { tree_depth, bits })
    }

    /// Empty selection (all masses zero).
    pub fn empty(tree_depth: u32) -> Result<Self, DyadicError> {
        Self::new_unchecked(tree_depth, &[])
    }

    /// Random 2-Carleson sequence, drawn by propagating a mass budget down
    /// the tree so the condition holds by construction.
    pub fn random<R: rand::Rng>(tree_depth: u32, select_prob: f64, rng: &mut R) -> Self {
        let mut seq = Self::empty(tree_depth).expect("depth validated by caller");
        // (node, budget): mass below this node must stay ≤ budget ≤ 2.
        let mut stack = vec![(NodeId::root(), 2.0f64)];
        while let Some((node, budget)) = stack.pop() {
            if node.depth >= tree_depth {
                continue;
            }
            let take = budget >= 1.0 && rng.gen_bool(select_prob);
            if take {
                seq.bits[node.heap_index()] = true;
            }
            let remaining = 2.0 * (budget - if take { 1.0 } else { 0.0 });
            let lo = (remaining - 2.0).max(0.0);
            let hi = remaining.min(2.0);
            let left = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
            stack.push((node.left_child(), left));
            stack.push((node.right_child(), remaining - left));
        }
        debug_assert!(seq.is_two_carleson());
        seq
    }

    pub fn tree_depth(&self) -> u32 {
        self.tree_depth
    }

    pub fn is_selected(&self, node: &NodeId) -> bool {
        node.depth < self.tree_depth && self.bits[node.heap_index()]
    }

    /// Selected nodes in heap order (by depth, then position).
    pub fn selected_nodes(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        for d in 0..self.tree_depth {
            for k in 0..(1u64 << d) {
                let node = NodeId {
                    depth: d,
                    position: k,
                };
                if self.bits[node.heap_index()] {
                    out.push(node);
                }
            }
        }
        out
    }

    /// Copy with one bit cleared.
    pub fn with_bit_cleared(&self, node: &NodeId) -> Self {
        let mut out = self.clone();
        if node.depth < self.tree_depth {
            out.bits[node.heap_index()] = false;
        }
        out
    }

    /// Carleson mass `A(α; J) = (1/|J|) Σ_{K ⊆ J} α_K |K|`, computed
    /// bottom-up via `A_J = α_J + (A_{J-} + A_{J+})/2` with `A = 0` at
    /// terminal depth. Exact in `f64` (dyadic rationals).
    pub fn carleson_mass(&self, node: &NodeId) -> Result<f64, DyadicError> {
        if node.depth > self.tree_depth {
            return Err(DyadicError::NodeOutsideTree {
                node_depth: node.depth,
                tree_depth: self.tree_depth,
            });
        }
        Ok(self.mass_recursive(node))
    }

    fn mass_recursive(&self, node: &NodeId) -> f64 {
        if node.depth >= self.tree_depth {
            return 0.0;
        }
        let own = if self.bits[node.heap_index()] {
            1.0
        } else {
            0.0
        };
        own + 0.5
            * (self.mass_recursive(&node.left_child()) + self.mass_recursive(&node.right_child()))
    }

    /// Masses of all stored nodes in heap order, one bottom-up pass.
    fn mass_table(&self) -> Vec<f64> {
        let n = self.tree_depth;
        let mut table = vec![0.0f64; self.bits.len()];
        for d in (0..n).rev() {
            for k in 0..(1u64 << d) {
                let node = NodeId {
                    depth: d,
                    position: k,
                };
                let idx = node.heap_index();
                let own = if self.bits[idx] { 1.0 } else { 0.0 };
                let below = if d + 1 < n {
                    let l = table[node.left_child().heap_index()];
                    let r = table[node.right_child().heap_index()];
                    0.5 * (l + r)
                } else {
                    0.0
                };
                table[idx] = own + below;
            }
        }
        table
    }

    fn first_mass_violation(&self) -> Option<(NodeId, f64)> {
        let table = self.mass_table();
        for d in 0..self.tree_depth {
            for k in 0..(1u64 << d) {
                let node = NodeId {
                    depth: d,
                    position: k,
                };
                let mass = table[node.heap_index()];
                if mass > 2.0 {
                    return Some((node, mass));
                }
            }
        }
        None
    }

    /// True iff the mass is ≤ 2 at every node (single bottom-up pass).
    pub fn is_two_carleson(&self) -> bool {
        self.first_mass_violation().is_none()
    }

    /// Maximal selected strict descendants of `node`, ordered by position.
    pub fn alpha_children(&self, node: &NodeId) -> Result<Vec<NodeId>, DyadicError> {
        if node.depth > self.tree_depth {
            return Err(DyadicError::NodeOutsideTree {
                node_depth: node.depth,
                tree_depth: self.tree_depth,
            });
        }
        let mut out = Vec::new();
        if node.depth < self.tree_depth {
            self.collect_maximal(&node.left_child(), &mut out);
            self.collect_maximal(&node.right_child(), &mut out);
        }
        Ok(out)
    }

    /// Depth-first: a selected node is collected and not descended into.
    fn collect_maximal(&self, node: &NodeId, out: &mut Vec<NodeId>) {
        if node.depth >= self.tree_depth {
            return;
        }
        if self.bits[node.heap_index()] {
            out.push(*node);
            return;
        }
        self.collect_maximal(&node.left_child(), out);
        self.collect_maximal(&node.right_child(), out);
    }

    /// Sparse generations: generation 0 holds the maximal selected nodes,
    /// generation m the α-children of generation m-1. Each generation is a
    /// disjoint collection, and together they partition the selected set.
    pub fn sparse_generations(&self) -> Vec<Vec<NodeId>> {
        let mut generations = Vec::new();
        let mut current = Vec::new();
        if self.is_selected(&NodeId::root()) {
            current.push(NodeId::root());
        } else {
            self.collect_maximal(&NodeId::root().left_child(), &mut current);
            self.collect_maximal(&NodeId::root().right_child(), &mut current);
        }
        while !current.is_empty() {
            let next = current
                .iter()
                .flat_map(|n| self.alpha_children(n).expect("node is in tree"))
                .collect();
            generations.push(current);
            current = next;
        }
        generations
    }

    /// The counting function `Σ_{K selected} 1_K`: each leaf value is the
    /// number of selected nodes containing that terminal interval.
    pub fn counting_function(&self) -> StepFunction {
        let n = self.tree_depth;
        let mut counts = vec![0u32; 1];
        for d in 0..n {
            let mut next = vec![0u32; 1 << (d + 1)];
            for (k, item) in next.iter_mut().enumerate() {
                let parent = NodeId {
                    depth: d,
                    position: (k / 2) as u64,
                };
                let own = if self.bits[parent.heap_index()] { 1 } else { 0 };
                *item = counts[k / 2] + own;
            }
            counts = next;
        }
        StepFunction::new(n, counts.iter().map(|&c| c as f64).collect()).expect("counts are finite")
    }
}

/// A nonnegative function constant on each of the `2^N` terminal intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepFunctionRepr", into = "StepFunctionRepr")]
pub struct StepFunction {
    tree_depth: u32,
    leaf_values: Vec<f64>,
}

/// Wire format: `{"depth": N, "values": [...]}`.
#[derive(Serialize, Deserialize)]
struct StepFunctionRepr {
    depth: u32,
    values: Vec<f64>,
}

impl From<StepFunction> for StepFunctionRepr {
    fn from(f: StepFunction) -> Self {
        StepFunctionRepr {
            depth: f.tree_depth,
            values: f.leaf_values,
        }
    }
}

impl TryFrom<StepFunctionRepr> for StepFunction {
    type Error = DyadicError;

    fn try_from(repr: StepFunctionRepr) -> Result<Self, DyadicError> {
        StepFunction::new(repr.depth, repr.values)
    }
}

impl StepFunction {
    pub fn new(tree_depth: u32, leaf_values: Vec<f64>) -> Result<Self, DyadicError> {
        if tree_depth == 0 || tree_depth > MAX_TREE_DEPTH {
            return Err(DyadicError::InvalidDepth(tree_depth));
        }
        let expected = 1usize << tree_depth;
        if leaf_values.len() != expected {
            return Err(DyadicError::LeafCountMismatch {
                expected,
                got: leaf_values.len(),
            });
        }
        for (index, &value) in leaf_values.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(DyadicError::BadLeafValue { index, value });
            }
        }
        Ok(StepFunction {
            tree_depth,
            leaf_values,
        })
    }

    pub fn constant(tree_depth: u32, value: f64) -> Result<Self, DyadicError> {
        if tree_depth == 0 || tree_depth > MAX_TREE_DEPTH {
            return Err(DyadicError::InvalidDepth(tree_depth));
        }
        Self::new(tree_depth, vec![value; 1 << tree_depth])
    }

    pub fn tree_depth(&self) -> u32 {
        self.tree_depth
    }

    pub fn leaf_values(&self) -> &[f64] {
        &self.leaf_values
    }

    /// Mean over the unit interval, `2^{-N} Σ leaf values`.
    pub fn mean(&self) -> f64 {
        self.average(&NodeId::root())
            .expect("root is always in tree")
    }

    /// Average `⟨f⟩_J` over any node of depth ≤ N, by recursive halving.
    pub fn average(&self, node: &NodeId) -> Result<f64, DyadicError> {
        if node.depth > self.tree_depth {
            return Err(DyadicError::NodeOutsideTree {
                node_depth: node.depth,
                tree_depth: self.tree_depth,
            });
        }
        let width = 1usize << (self.tree_depth - node.depth);
        let start = node.position as usize * width;
        let sum: f64 = self.leaf_values[start..start + width].iter().sum();
        Ok(sum / width as f64)
    }

    /// Averages of all nodes of depth < N in heap order; one bottom-up pass.
    pub(crate) fn node_averages(&self) -> Vec<f64> {
        let n = self.tree_depth;
        let mut avgs = vec![0.0f64; (1usize << n) - 1];
        for d in (0..n).rev() {
            for k in 0..(1u64 << d) {
                let node = NodeId {
                    depth: d,
                    position: k,
                };
                let below = if d + 1 < n {
                    let l = avgs[node.left_child().heap_index()];
                    let r = avgs[node.right_child().heap_index()];
                    0.5 * (l + r)
                } else {
                    let base = (k as usize) * 2;
                    0.5 * (self.leaf_values[base] + self.leaf_values[base + 1])
                };
                avgs[node.heap_index()] = below;
            }
        }
        avgs
    }

    /// Leafwise map; the result must remain a valid step function.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self, DyadicError> {
        Self::new(
            self.tree_depth,
            self.leaf_values.iter().map(|&v| f(v)).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(d: u32, k: u64) -> NodeId {
        NodeId::new(d, k).unwrap()
    }

    /// Independent mass oracle: direct containment sum Σ_{K ⊆ J} |K|/|J|,
    /// no bottom-up recursion.
    fn naive_mass(seq: &CarlesonSequence, j: &NodeId) -> f64 {
        seq.selected_nodes()
            .iter()
            .filter(|k| j.contains(k))
            .map(|k| k.length() / j.length())
            .sum()
    }

    #[test]
    fn node_navigation() {
        let root = NodeId::root();
        assert_eq!(root.left_child(), node(1, 0));
        assert_eq!(root.right_child(), node(1, 1));
        assert_eq!(node(2, 3).parent(), Some(node(1, 1)));
        assert_eq!(root.parent(), None);
        assert!(node(1, 1).contains(&node(3, 5)));
        assert!(!node(1, 0).contains(&node(3, 5)));
        assert!(NodeId::new(2, 4).is_err());
    }

    #[test]
    fn mass_single_root() {
        let seq = CarlesonSequence::new(2, &[NodeId::root()]).unwrap();
        assert_eq!(seq.carleson_mass(&NodeId::root()).unwrap(), 1.0);
        assert_eq!(naive_mass(&seq, &NodeId::root()), 1.0);
    }

    #[test]
    fn mass_root_and_halves() {
        let seq = CarlesonSequence::new(2, &[NodeId::root(), node(1, 0), node(1, 1)]).unwrap();
        // 1 + (1 + 1)/2 = 2
        assert_eq!(seq.carleson_mass(&NodeId::root()).unwrap(), 2.0);
        assert_eq!(naive_mass(&seq, &NodeId::root()), 2.0);
        assert!(seq.is_two_carleson());
    }

    #[test]
    fn mass_right_chain() {
        let seq = CarlesonSequence::new(3, &[NodeId::root(), node(1, 1), node(2, 2), node(2, 3)])
            .unwrap();
        assert_eq!(seq.carleson_mass(&NodeId::root()).unwrap(), 2.0);
        assert_eq!(seq.carleson_mass(&node(1, 1)).unwrap(), 2.0);
        assert_eq!(naive_mass(&seq, &node(1, 1)), 2.0);
    }

    #[test]
    fn mass_out_of_tree_is_error() {
        let seq = CarlesonSequence::empty(2).unwrap();
        assert!(seq.carleson_mass(&node(3, 0)).is_err());
        assert_eq!(seq.carleson_mass(&node(2, 1)).unwrap(), 0.0);
    }

    #[test]
    fn carleson_check() {
        assert!(CarlesonSequence::empty(3).unwrap().is_two_carleson());
        // {I, I-, I+, I--, I-+}: A(I) = 1 + (2 + 1)/2 = 2.5 > 2
        let over = CarlesonSequence::new_unchecked(
            3,
            &[
                NodeId::root(),
                node(1, 0),
                node(1, 1),
                node(2, 0),
                node(2, 1),
            ],
        )
        .unwrap();
        assert!(!over.is_two_carleson());
        assert_eq!(naive_mass(&over, &NodeId::root()), 2.5);
        assert!(matches!(
            CarlesonSequence::new(
                3,
                &[
                    NodeId::root(),
                    node(1, 0),
                    node(1, 1),
                    node(2, 0),
                    node(2, 1)
                ]
            ),
            Err(DyadicError::NotCarleson { .. })
        ));
    }

    #[test]
    fn carleson_is_monotone_under_clearing() {
        let seq = CarlesonSequence::new(3, &[NodeId::root(), node(1, 1), node(2, 2), node(2, 3)])
            .unwrap();
        for n in seq.selected_nodes() {
            assert!(seq.with_bit_cleared(&n).is_two_carleson());
        }
    }

    #[test]
    fn alpha_children_maximal() {
        let seq = CarlesonSequence::new(3, &[NodeId::root(), node(2, 2), node(2, 3)]).unwrap();
        assert_eq!(
            seq.alpha_children(&NodeId::root()).unwrap(),
            vec![node(2, 2), node(2, 3)]
        );
        assert!(CarlesonSequence::empty(3)
            .unwrap()
            .alpha_children(&NodeId::root())
            .unwrap()
            .is_empty());
        let seq2 = CarlesonSequence::new(2, &[NodeId::root(), node(1, 1)]).unwrap();
        assert_eq!(
            seq2.alpha_children(&NodeId::root()).unwrap(),
            vec![node(1, 1)]
        );
    }

    #[test]
    fn generations_partition() {
        let seq = CarlesonSequence::new(3, &[NodeId::root(), node(1, 1), node(2, 2), node(2, 3)])
            .unwrap();
        let gens = seq.sparse_generations();
        assert_eq!(
            gens,
            vec![
                vec![NodeId::root()],
                vec![node(1, 1)],
                vec![node(2, 2), node(2, 3)]
            ]
        );
        let total: usize = gens.iter().map(Vec::len).sum();
        assert_eq!(total, seq.selected_nodes().len());

        let disjoint = CarlesonSequence::new(2, &[node(1, 0), node(1, 1)]).unwrap();
        assert_eq!(
            disjoint.sparse_generations(),
            vec![vec![node(1, 0), node(1, 1)]]
        );
        assert!(CarlesonSequence::empty(2)
            .unwrap()
            .sparse_generations()
            .is_empty());
    }

    #[test]
    fn counting_function_examples() {
        let seq = CarlesonSequence::new(2, &[NodeId::root()]).unwrap();
        assert_eq!(seq.counting_function().leaf_values(), &[1.0, 1.0, 1.0, 1.0]);

        let seq = CarlesonSequence::new(2, &[NodeId::root(), node(1, 0), node(1, 1)]).unwrap();
        assert_eq!(seq.counting_function().leaf_values(), &[2.0, 2.0, 2.0, 2.0]);

        let seq = CarlesonSequence::new(3, &[NodeId::root(), node(1, 1), node(2, 2), node(2, 3)])
            .unwrap();
        // 1 on I-, 3 on I+
        assert_eq!(
            seq.counting_function().leaf_values(),
            &[1.0, 1.0, 1.0, 1.0, 3.0, 3.0, 3.0, 3.0]
        );
    }

    #[test]
    fn counting_average_equals_root_mass() {
        let mut rng = rand_chacha_rng(17);
        for _ in 0..50 {
            let seq = CarlesonSequence::random(5, 0.5, &mut rng);
            let mass = seq.carleson_mass(&NodeId::root()).unwrap();
            assert_eq!(seq.counting_function().mean(), mass);
        }
    }

    #[test]
    fn mass_recursion_identity() {
        let mut rng = rand_chacha_rng(3);
        let seq = CarlesonSequence::random(6, 0.5, &mut rng);
        for d in 0..6 {
            for k in 0..(1u64 << d) {
                let j = node(d, k);
                let own = if seq.is_selected(&j) { 1.0 } else { 0.0 };
                let left = seq.carleson_mass(&j.left_child()).unwrap();
                let right = seq.carleson_mass(&j.right_child()).unwrap();
                assert_eq!(seq.carleson_mass(&j).unwrap(), own + 0.5 * (left + right));
            }
        }
    }

    #[test]
    fn step_function_basics() {
        let f = StepFunction::new(2, vec![1.0, 0.0, 3.0, 0.0]).unwrap();
        assert_eq!(f.mean(), 1.0);
        assert_eq!(f.average(&node(1, 0)).unwrap(), 0.5);
        assert_eq!(f.average(&node(2, 2)).unwrap(), 3.0);
        assert!(f.average(&node(3, 0)).is_err());
        assert!(StepFunction::new(2, vec![1.0, -0.5, 0.0, 0.0]).is_err());
        assert!(StepFunction::new(2, vec![1.0]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let seq = CarlesonSequence::new(3, &[NodeId::root(), node(1, 1), node(2, 2), node(2, 3)])
            .unwrap();
        let text = serde_json::to_string(&seq).unwrap();
        assert!(text.contains("\"selected\":[[0,0],[1,1],[2,2],[2,3]]"));
        let back: CarlesonSequence = serde_json::from_str(&text).unwrap();
        assert_eq!(back, seq);

        let f = StepFunction::new(1, vec![0.25, 1.75]).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        let back: StepFunction = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);

        // Non-Carleson payloads are rejected at the boundary.
        let bad = r#"{"depth":3,"selected":[[0,0],[1,0],[1,1],[2,0],[2,1]]}"#;
        assert!(serde_json::from_str::<CarlesonSequence>(bad).is_err());
    }

    fn rand_chacha_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
        use rand::SeedableRng;
        rand_chacha::ChaCha8Rng::seed_from_u64(seed)
    }
}
