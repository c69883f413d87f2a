//! Skeleton recovery: start from the complete undirected graph and, level by
//! level, delete `u -- v` as soon as some conditioning set of the current
//! size drawn from the adjacency of `u` renders `u` and `v` independent.
//!
//! [`SkeletonMode::Original`] conditions on the live adjacency sets, so an
//! edge removal immediately changes which sets are tried for later pairs at
//! the same level. [`SkeletonMode::Stable`] freezes the adjacency sets at the
//! start of every level, which makes the resulting skeleton independent of
//! the variable ordering.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ci::CiOracle;
use crate::graph::{MixedGraph, VertexId};
use crate::learn::LearnError;

/// A permutation of the variables; the only degree of freedom in how pairs
/// and conditioning sets are visited.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableOrdering {
    order: Vec<VertexId>,
    position: Vec<usize>,
}

impl VariableOrdering {
    pub fn natural(p: usize) -> Self {
        VariableOrdering {
            order: (0..p).map(VertexId).collect(),
            position: (0..p).collect(),
        }
    }

    pub fn new(order: Vec<VertexId>) -> Result<Self, LearnError> {
        let p = order.len();
        let mut position = vec![usize::MAX; p];
        for (i, v) in order.iter().enumerate() {
            if v.0 >= p || position[v.0] != usize::MAX {
                return Err(LearnError::InvalidOrdering(format!(
                    "{:?} is not a permutation of 0..{p}",
                    order.iter().map(|v| v.0).collect::<Vec<_>>()
                )));
            }
            position[v.0] = i;
        }
        Ok(VariableOrdering { order, position })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.order
    }

    #[inline]
    pub fn position(&self, v: VertexId) -> usize {
        self.position[v.0]
    }

    pub fn sort(&self, vs: &mut [VertexId]) {
        vs.sort_by_key(|&v| self.position(v));
    }

    pub fn reversed(&self) -> Self {
        let mut order = self.order.clone();
        order.reverse();
        VariableOrdering::new(order).expect("reverse of a permutation")
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SkeletonMode {
    Original,
    Stable,
}

/// Separating sets keyed by unordered pair; one entry per removed edge.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SeparationSets {
    map: BTreeMap<(VertexId, VertexId), Vec<VertexId>>,
}

impl SeparationSets {
    fn key(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
        (u.min(v), u.max(v))
    }

    pub fn insert(&mut self, u: VertexId, v: VertexId, mut set: Vec<VertexId>) {
        set.sort();
        self.map.insert(Self::key(u, v), set);
    }

    pub fn get(&self, u: VertexId, v: VertexId) -> Option<&[VertexId]> {
        self.map.get(&Self::key(u, v)).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, VertexId, &[VertexId])> {
        self.map.iter().map(|(&(u, v), s)| (u, v, s.as_slice()))
    }
}

/// One visited ordered pair. `adjacency` is `ad_H(u)` as seen when the pair
/// was visited (the frozen level snapshot in stable mode).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRow {
    pub level: usize,
    pub u: VertexId,
    pub v: VertexId,
    pub adjacency: Vec<VertexId>,
    pub eligible: bool,
    pub tests: usize,
    pub sepset: Option<Vec<VertexId>>,
    pub removed: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct SkeletonOptions {
    pub mode: SkeletonMode,
    pub trace: bool,
    /// Evaluate each level's queries concurrently (stable mode only).
    pub parallel: bool,
}

impl SkeletonOptions {
    pub fn new(mode: SkeletonMode) -> Self {
        SkeletonOptions {
            mode,
            trace: false,
            parallel: false,
        }
    }

    pub fn traced(mut self) -> Self {
        self.trace = true;
        self
    }

    pub fn parallel(mut self, on: bool) -> Self {
        self.parallel = on;
        self
    }
}

#[derive(Clone, Debug)]
pub struct SkeletonResult {
    pub graph: MixedGraph,
    pub sepsets: SeparationSets,
    pub trace: Vec<TraceRow>,
    /// Queries issued during skeleton recovery.
    pub ci_queries: u64,
    /// Highest level at which at least one pair was eligible.
    pub max_level: Option<usize>,
    /// Adjacency sets at the start of each level, ascending by id.
    pub level_adjacency: Vec<Vec<Vec<VertexId>>>,
    pub order: VariableOrdering,
    pub mode: SkeletonMode,
}

/// Eligible ordered pairs at `level`, `u` ascending by position and then `v`
/// ascending by position. `adjacency[x]` is the adjacency set used for `x`.
pub fn enumerate_pairs(
    graph: &MixedGraph,
    adjacency: &[Vec<VertexId>],
    order: &VariableOrdering,
    level: usize,
) -> Vec<(VertexId, VertexId)> {
    let mut out = Vec::new();
    for &u in order.as_slice() {
        for &v in order.as_slice() {
            if u != v
                && graph.is_adjacent(u, v)
                && adjacency[u.0].contains(&v)
                && adjacency[u.0].len() > level
            {
                out.push((u, v));
            }
        }
    }
    out
}

/// All `size`-subsets of `base` in lexicographic order of ordering
/// positions; each subset is listed in position order.
pub fn enumerate_subsets(
    base: &[VertexId],
    size: usize,
    order: &VariableOrdering,
) -> impl Iterator<Item = Vec<VertexId>> {
    let mut sorted = base.to_vec();
    order.sort(&mut sorted);
    sorted.into_iter().combinations(size)
}

fn adjacency_lists(graph: &MixedGraph, order: &VariableOrdering) -> Vec<Vec<VertexId>> {
    graph
        .vertices()
        .map(|x| {
            let mut adj = graph.adjacent(x);
            order.sort(&mut adj);
            adj
        })
        .collect()
}

struct PairOutcome {
    tests: usize,
    sepset: Option<Vec<VertexId>>,
}

fn search_pair<O: CiOracle + ?Sized>(
    oracle: &O,
    order: &VariableOrdering,
    u: VertexId,
    v: VertexId,
    base: &[VertexId],
    level: usize,
) -> Result<PairOutcome, LearnError> {
    let mut tests = 0;
    for s in enumerate_subsets(base, level, order) {
        tests += 1;
        let res = oracle.query(u, v, &s).map_err(|e| LearnError::oracle(u, v, &s, e))?;
        if res.independent {
            return Ok(PairOutcome {
                tests,
                sepset: Some(s),
            });
        }
    }
    Ok(PairOutcome { tests, sepset: None })
}

pub fn learn_skeleton<O: CiOracle + ?Sized>(
    oracle: &O,
    order: &VariableOrdering,
    opts: &SkeletonOptions,
) -> Result<SkeletonResult, LearnError> {
    let p = oracle.num_vars();
    if order.len() != p {
        return Err(LearnError::InvalidOrdering(format!(
            "ordering has {} variables, oracle has {p}",
            order.len()
        )));
    }
    let start = oracle.test_count();
    let stable = opts.mode == SkeletonMode::Stable;
    let mut h = MixedGraph::complete(p);
    let mut sepsets = SeparationSets::default();
    let mut trace = Vec::new();
    let mut max_level = None;
    let mut level_adjacency = Vec::new();

    for level in 0..p.saturating_sub(1) {
        level_adjacency.push(h.vertices().map(|x| h.adjacent(x)).collect());
        let snapshot = stable.then(|| adjacency_lists(&h, order));
        let precomputed = match (&snapshot, opts.parallel) {
            (Some(adj), true) => Some(evaluate_level(oracle, &h, adj, order, level)?),
            _ => None,
        };
        let mut any_eligible = false;

        for &u in order.as_slice() {
            for &v in order.as_slice() {
                if u == v || !h.is_adjacent(u, v) {
                    continue;
                }
                let adjacency = match &snapshot {
                    Some(adj) => adj[u.0].clone(),
                    None => {
                        let mut adj = h.adjacent(u);
                        order.sort(&mut adj);
                        adj
                    }
                };
                let base: Vec<VertexId> = adjacency.iter().copied().filter(|&x| x != v).collect();
                let eligible = base.len() >= level;
                let outcome = if !eligible {
                    PairOutcome { tests: 0, sepset: None }
                } else if let Some(results) = &precomputed {
                    let (tests, sepset) = results[&(u, v)].clone();
                    PairOutcome { tests, sepset }
                } else {
                    search_pair(oracle, order, u, v, &base, level)?
                };
                any_eligible |= eligible;
                let removed = outcome.sepset.is_some();
                if let Some(s) = &outcome.sepset {
                    h.remove_edge(u, v);
                    sepsets.insert(u, v, s.clone());
                }
                if opts.trace {
                    let mut adjacency = adjacency;
                    adjacency.sort();
                    trace.push(TraceRow {
                        level,
                        u,
                        v,
                        adjacency,
                        eligible,
                        tests: outcome.tests,
                        sepset: outcome.sepset.map(|mut s| {
                            s.sort();
                            s
                        }),
                        removed,
                    });
                }
            }
        }
        if !any_eligible {
            break;
        }
        max_level = Some(level);
    }

    Ok(SkeletonResult {
        graph: h,
        sepsets,
        trace,
        ci_queries: oracle.test_count() - start,
        max_level,
        level_adjacency,
        order: order.clone(),
        mode: opts.mode,
    })
}

type LevelResults = BTreeMap<(VertexId, VertexId), (usize, Option<Vec<VertexId>>)>;

/// Runs every eligible pair of a stable level against the frozen snapshot
/// concurrently. Results are committed by the caller in pair order.
fn evaluate_level<O: CiOracle + ?Sized>(
    oracle: &O,
    h: &MixedGraph,
    snapshot: &[Vec<VertexId>],
    order: &VariableOrdering,
    level: usize,
) -> Result<LevelResults, LearnError> {
    let pairs = enumerate_pairs(h, snapshot, order, level);
    let results: Vec<_> = pairs
        .par_iter()
        .map(|&(u, v)| {
            let base: Vec<VertexId> = snapshot[u.0].iter().copied().filter(|&x| x != v).collect();
            search_pair(oracle, order, u, v, &base, level).map(|o| ((u, v), (o.tests, o.sepset)))
        })
        .collect();
    results.into_iter().collect()
}

fn fmt_set(g: &MixedGraph, set: &[VertexId]) -> String {
    format!("{{{}}}", set.iter().map(|&v| g.label(v)).join(","))
}

/// Writes the trace as CSV with columns `level,u,v,ad_H(u),S,removed`.
/// `labels` supplies vertex names.
pub fn write_trace_csv<W: Write>(
    trace: &[TraceRow],
    labels: &MixedGraph,
    writer: W,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["level", "u", "v", "ad_H(u)", "S", "removed"])?;
    for r in trace {
        w.write_record([
            r.level.to_string(),
            labels.label(r.u),
            labels.label(r.v),
            fmt_set(labels, &r.adjacency),
            r.sepset.as_deref().map(|s| fmt_set(labels, s)).unwrap_or_default(),
            r.removed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// A conditional independence asserted for a fixture, used to lay out a
/// trace the way a hand-written walkthrough would.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Claim {
    pub u: VertexId,
    pub v: VertexId,
    pub set: Vec<VertexId>,
}

/// Row of a walkthrough table: a visited pair for which a claimed separating
/// set of the current size exists, whether that set was available inside
/// `ad_H(u) \ {v}`, and whether the edge went.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceTableRow {
    pub u: VertexId,
    pub v: VertexId,
    pub adjacency: Vec<VertexId>,
    pub claimed: Vec<VertexId>,
    pub available: bool,
    pub removed: bool,
}

pub fn trace_table(trace: &[TraceRow], level: usize, claims: &[Claim]) -> Vec<TraceTableRow> {
    let mut rows = Vec::new();
    for r in trace.iter().filter(|r| r.level == level) {
        let claim = claims.iter().find(|c| {
            c.set.len() == level
                && ((c.u == r.u && c.v == r.v) || (c.u == r.v && c.v == r.u))
        });
        if let Some(c) = claim {
            let mut claimed = c.set.clone();
            claimed.sort();
            let available = claimed.iter().all(|x| *x != r.v && r.adjacency.contains(x));
            rows.push(TraceTableRow {
                u: r.u,
                v: r.v,
                adjacency: r.adjacency.clone(),
                claimed,
                available,
                removed: r.removed,
            });
        }
    }
    rows
}

pub fn write_trace_table_csv<W: Write>(
    rows: &[TraceTableRow],
    labels: &MixedGraph,
    writer: W,
) -> Result<(), csv::Error> {
    let yes_no = |b: bool| if b { "Yes" } else { "No" }.to_string();
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["pair", "ad_H(u)", "S_uv", "S_uv in ad_H(u)\\{v}", "removed"])?;
    for r in rows {
        let mut pair = String::new();
        write!(pair, "({},{})", labels.label(r.u), labels.label(r.v)).unwrap();
        w.write_record([
            pair,
            fmt_set(labels, &r.adjacency),
            fmt_set(labels, &r.claimed),
            yes_no(r.available),
            yes_no(r.removed),
        ])?;
    }
    w.flush()?;
    Ok(())
}
