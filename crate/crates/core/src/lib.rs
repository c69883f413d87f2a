//! Constraint-based structure learning for LWF chain graphs.
//!
//! The learner recovers a skeleton by conditional-independence tests, orients
//! complex arrows, and returns the pattern (skeleton plus minimal-complex
//! arrows) of the Markov equivalence class. Skeleton recovery comes in an
//! order-dependent original form and an order-independent stable form;
//! orientation is plain, conservative or majority-rule.
//!
//! ```
//! use lwfcg::fixtures;
//! use lwfcg::{learn_pattern, LearnOptions, SkeletonMode, Variant};
//!
//! let fx = fixtures::figure4();
//! let out = learn_pattern(&fx.oracle, &fx.orders[0], Variant::plain(SkeletonMode::Stable), LearnOptions::default())
//!     .unwrap();
//! assert_eq!(out.pattern.graph, fixtures::figure4_pattern());
//! ```
//!
//! Numeric code (data, partial correlations, sampling) is generic over
//! [`Scalar`]; the aliases below fix it to `f64` or `f32`.

pub mod ci;
pub mod complex;
pub mod fixtures;
pub mod graph;
pub mod learn;
pub mod linalg;
pub mod scalar;
pub mod separation;
pub mod skeleton;
pub mod synth;

pub use ci::{CiError, CiOracle, CiResult, GaussCiTest, GaussianData, GraphOracle, ScriptedOracle};
pub use complex::{extract_pattern, true_pattern, AmbiguityPolicy, Pattern};
pub use graph::{ChainGraph, Edge, GraphError, MixedGraph, VertexId, VertexSet};
pub use learn::{learn_pattern, LearnError, LearnOptions, LearnOutput, OrientationRule, Variant};
pub use scalar::Scalar;
pub use separation::{c_separated, minimal_separator, SeparationQuery};
pub use skeleton::{learn_skeleton, SkeletonMode, SkeletonOptions, SkeletonResult, VariableOrdering};
pub use synth::{GaussianParams, GenSpec};

pub type GaussianData64 = GaussianData<f64>;
pub type GaussianData32 = GaussianData<f32>;
pub type GaussCiTest64 = GaussCiTest<f64>;
pub type GaussCiTest32 = GaussCiTest<f32>;
pub type GaussianParams64 = GaussianParams<f64>;
pub type GaussianParams32 = GaussianParams<f32>;
