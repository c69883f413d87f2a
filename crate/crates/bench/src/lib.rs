//! Benchmark harness for `lwfcg`: skeleton and pattern metrics, and a
//! seeded grid runner that writes one CSV row per learner run.

pub mod experiment;
pub mod metrics;

pub use experiment::{read_records, run_experiment, write_records, ConfigError, ExperimentConfig, Ordering, RunRecord};
pub use metrics::{score_skeleton, shd, SkeletonScore, VertexMismatch};
