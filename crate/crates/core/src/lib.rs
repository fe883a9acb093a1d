//! Localized dyadic sparse operators and their exact weak-(1,1) level-set
//! Bellman surface.
//!
//! The crate is organized around one object: for a 2-Carleson selection
//! `α` of dyadic subintervals of the unit interval and a nonnegative step
//! function `f`, the sparse operator
//!
//! ```text
//! A_{α,r} f = ( Σ_J α_J ⟨f⟩_J^r 1_J )^{1/r},   r > 0,
//! ```
//!
//! has level sets whose normalized measure, maximized over all admissible
//! `(f, α)` with prescribed mean `⟨f⟩ = x` and root Carleson mass `A`, is a
//! known piecewise-linear surface `M_r(ω, A)` in the reduced variable
//! `ω = x λ^{-1/r}`. The crate evaluates that surface and everything around
//! it in closed form ([`closedform`]), applies the operators themselves to
//! concrete dyadic data ([`dyadic`], [`operators`]), certifies the closed
//! form against its defining axioms by randomized property checks
//! ([`supersolution`]), and independently re-derives it from below by value
//! iteration, exhaustive enumeration, and exact extremal configurations
//! ([`oracle`]).
//!
//! Everything is deterministic given a seed, and all types are immutable
//! after construction, so values can be shared freely across threads.
//!
//! ```
//! use sparse_bellman_core::closedform::{bellman_m, weak_norm_constant};
//! use sparse_bellman_core::operators::{apply_sparse_power, level_set_fraction};
//! use sparse_bellman_core::{CarlesonSequence, NodeId, StepFunction};
//!
//! // the sharp weak-(1,1) constant of the classical sparse operator
//! assert_eq!(weak_norm_constant(1.0).unwrap(), 3.0);
//!
//! // α = {I, I₋, I₊} with f ≡ 1/2 fills the whole level set at λ = 1,
//! // attaining the surface value M₁(1/2, 2) = 1
//! let root = NodeId::root();
//! let seq = CarlesonSequence::new(2, &[root, root.left_child(), root.right_child()]).unwrap();
//! let f = StepFunction::constant(2, 0.5).unwrap();
//! let out = apply_sparse_power(&seq, &f, 1.0).unwrap();
//! assert_eq!(level_set_fraction(&out, 1.0), 1.0);
//! assert_eq!(bellman_m(1.0, 0.5, 2.0).unwrap(), 1.0);
//! ```

pub mod closedform;
pub mod dyadic;
pub mod operators;
pub mod oracle;
pub mod supersolution;

pub use closedform::{BellmanPoint, RegionLabel};
pub use dyadic::{CarlesonSequence, NodeId, StepFunction};
pub use operators::OperatorOutput;
pub use oracle::{AscentOptions, CheckpointGap, DpReport, ExtremizerReplay, GridSpec, ValueTable};
pub use supersolution::{PropertyReport, SampleSpec};
