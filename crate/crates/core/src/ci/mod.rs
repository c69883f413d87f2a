//! Conditional-independence queries `u ⊥ v | S`.
//!
//! Every learner in this crate talks to the data (or to a known graph) only
//! through [`CiOracle`]. Three backends are provided: [`GraphOracle`] answers
//! by c-separation in a known chain graph, [`ScriptedOracle`] does the same
//! but lets individual answers be overridden, and [`GaussCiTest`] runs a
//! Fisher-z test of zero partial correlation on Gaussian data.

mod gauss;

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::graph::{ChainGraph, VertexId};
use crate::separation::{c_separated, SeparationError, SeparationQuery};

pub use gauss::{fisher_z_p_value, partial_correlation, GaussCiTest, GaussianData, DataError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CiError {
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("correlation submatrix over {0:?} is singular")]
    SingularSubmatrix(Vec<VertexId>),
    #[error("{n} samples cannot support a conditioning set of size {cond}")]
    InsufficientSamples { n: usize, cond: usize },
    #[error(transparent)]
    Separation(#[from] SeparationError),
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct CiResult {
    pub independent: bool,
    /// Present for statistical backends only.
    pub p_value: Option<f64>,
}

impl CiResult {
    pub fn exact(independent: bool) -> Self {
        CiResult {
            independent,
            p_value: None,
        }
    }
}

/// Source of conditional-independence decisions over variables `0..num_vars()`.
///
/// Implementations must be symmetric in `(u, v)`, deterministic, and bump
/// their query counter exactly once per call to [`CiOracle::query`].
pub trait CiOracle: Send + Sync {
    fn num_vars(&self) -> usize;

    fn query(&self, u: VertexId, v: VertexId, s: &[VertexId]) -> Result<CiResult, CiError>;

    /// Total number of queries issued so far.
    fn test_count(&self) -> u64;
}

impl<T: CiOracle + ?Sized> CiOracle for &T {
    fn num_vars(&self) -> usize {
        (**self).num_vars()
    }

    fn query(&self, u: VertexId, v: VertexId, s: &[VertexId]) -> Result<CiResult, CiError> {
        (**self).query(u, v, s)
    }

    fn test_count(&self) -> u64 {
        (**self).test_count()
    }
}

/// Atomic query counter shared by the backends.
#[derive(Debug, Default)]
pub struct QueryCounter(AtomicU64);

impl QueryCounter {
    pub fn bump(&self) {
        self.0.fetch_add(1, Ordering::Relaxed);
    }

    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }
}

pub(crate) fn validate_query(
    p: usize,
    u: VertexId,
    v: VertexId,
    s: &[VertexId],
) -> Result<(), CiError> {
    if u.0 >= p || v.0 >= p {
        return Err(CiError::InvalidQuery(format!(
            "pair ({u}, {v}) out of range (p = {p})"
        )));
    }
    if u == v {
        return Err(CiError::InvalidQuery(format!("u and v are both {u}")));
    }
    let mut seen = vec![false; p];
    for &x in s {
        if x.0 >= p {
            return Err(CiError::InvalidQuery(format!("conditioning vertex {x} out of range")));
        }
        if x == u || x == v {
            return Err(CiError::InvalidQuery(format!(
                "conditioning set contains query vertex {x}"
            )));
        }
        if std::mem::replace(&mut seen[x.0], true) {
            return Err(CiError::InvalidQuery(format!("vertex {x} repeated in conditioning set")));
        }
    }
    Ok(())
}

/// Exact answers from c-separation in a known chain graph.
#[derive(Debug)]
pub struct GraphOracle {
    graph: ChainGraph,
    count: QueryCounter,
}

impl GraphOracle {
    pub fn new(graph: ChainGraph) -> Self {
        GraphOracle {
            graph,
            count: QueryCounter::default(),
        }
    }

    pub fn graph(&self) -> &ChainGraph {
        &self.graph
    }
}

impl CiOracle for GraphOracle {
    fn num_vars(&self) -> usize {
        self.graph.p()
    }

    fn query(&self, u: VertexId, v: VertexId, s: &[VertexId]) -> Result<CiResult, CiError> {
        self.count.bump();
        validate_query(self.graph.p(), u, v, s)?;
        let q = SeparationQuery::pair(u, v, s.iter().copied());
        Ok(CiResult::exact(c_separated(&self.graph, &q)?))
    }

    fn test_count(&self) -> u64 {
        self.count.get()
    }
}

type OverrideKey = (VertexId, VertexId, Vec<VertexId>);

fn override_key(u: VertexId, v: VertexId, s: &[VertexId]) -> OverrideKey {
    let mut set = s.to_vec();
    set.sort();
    (u.min(v), u.max(v), set)
}

/// Exact oracle on `base` with a table of forced answers, for reproducing
/// hand-constructed error scenarios.
#[derive(Debug)]
pub struct ScriptedOracle {
    base: GraphOracle,
    overrides: HashMap<OverrideKey, bool>,
}

impl ScriptedOracle {
    pub fn new(base: ChainGraph) -> Self {
        ScriptedOracle {
            base: GraphOracle::new(base),
            overrides: HashMap::new(),
        }
    }

    /// Forces the answer for `u ⊥ v | s` (and `v ⊥ u | s`).
    pub fn set(&mut self, u: VertexId, v: VertexId, s: &[VertexId], independent: bool) {
        self.overrides.insert(override_key(u, v, s), independent);
    }

    pub fn with(mut self, u: VertexId, v: VertexId, s: &[VertexId], independent: bool) -> Self {
        self.set(u, v, s, independent);
        self
    }

    pub fn base(&self) -> &ChainGraph {
        self.base.graph()
    }

    pub fn override_count(&self) -> usize {
        self.overrides.len()
    }
}

impl CiOracle for ScriptedOracle {
    fn num_vars(&self) -> usize {
        self.base.num_vars()
    }

    fn query(&self, u: VertexId, v: VertexId, s: &[VertexId]) -> Result<CiResult, CiError> {
        validate_query(self.num_vars(), u, v, s)?;
        match self.overrides.get(&override_key(u, v, s)) {
            Some(&independent) => {
                self.base.count.bump();
                Ok(CiResult::exact(independent))
            }
            None => self.base.query(u, v, s),
        }
    }

    fn test_count(&self) -> u64 {
        self.base.test_count()
    }
}
