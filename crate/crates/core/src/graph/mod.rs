//! Mixed graphs with directed (`u -> v`) and undirected (`u -- v`) edges, and
//! the chain-graph primitives built on top of them: chain components,
//! boundaries, ancestral sets, moral graphs and skeletons.
//!
//! Edge marks live in a dense `p x p` table so adjacency and orientation
//! queries are O(1). Every iteration (vertices, neighbours, edges) runs in
//! ascending [`VertexId`] order so that algorithm runs are reproducible.

mod io;

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use io::{parse_graph, parse_labels, write_graph, write_labels};

/// Dense vertex index in `[0, p)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub usize);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for VertexId {
    fn from(i: usize) -> Self {
        VertexId(i)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Ordered set of vertices.
pub type VertexSet = BTreeSet<VertexId>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph contains a partially directed cycle")]
    NotAChainGraph,
    #[error("vertex {vertex} out of range for a graph with {p} vertices")]
    OutOfRange { vertex: usize, p: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),
    #[error("pair {0}, {1} already carries an edge")]
    ConflictingEdge(VertexId, VertexId),
    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// How a pair `(u, v)` is connected, read from `u`'s side.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Default)]
pub enum EdgeMark {
    #[default]
    None,
    /// `u -- v`
    Undirected,
    /// `u -> v`
    Forward,
    /// `v -> u`
    Backward,
}

impl EdgeMark {
    fn reversed(self) -> Self {
        match self {
            EdgeMark::Forward => EdgeMark::Backward,
            EdgeMark::Backward => EdgeMark::Forward,
            m => m,
        }
    }

    pub fn is_edge(self) -> bool {
        self != EdgeMark::None
    }
}

/// A single edge. Undirected edges are stored with the smaller id first.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Edge {
    Directed(VertexId, VertexId),
    Undirected(VertexId, VertexId),
}

impl Edge {
    pub fn endpoints(self) -> (VertexId, VertexId) {
        match self {
            Edge::Directed(u, v) | Edge::Undirected(u, v) => (u, v),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MixedGraph {
    p: usize,
    marks: Vec<EdgeMark>,
    labels: Option<Vec<String>>,
}

impl PartialEq for MixedGraph {
    /// Structural equality; labels are presentation only.
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.marks == other.marks
    }
}

impl Eq for MixedGraph {}

impl MixedGraph {
    /// Edgeless graph on `p` vertices.
    pub fn new(p: usize) -> Self {
        MixedGraph {
            p,
            marks: vec![EdgeMark::None; p * p],
            labels: None,
        }
    }

    /// Complete undirected graph on `p` vertices.
    pub fn complete(p: usize) -> Self {
        let mut g = MixedGraph::new(p);
        for u in 0..p {
            for v in (u + 1)..p {
                g.set(VertexId(u), VertexId(v), EdgeMark::Undirected);
            }
        }
        g
    }

    pub fn with_labels<S: Into<String>>(
        mut self,
        labels: impl IntoIterator<Item = S>,
    ) -> Result<Self, GraphError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() != self.p {
            return Err(GraphError::LabelCount {
                expected: self.p,
                got: labels.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(GraphError::DuplicateLabel(l.clone()));
            }
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of `v`, falling back to its index.
    pub fn label(&self, v: VertexId) -> String {
        match &self.labels {
            Some(l) => l[v.0].clone(),
            None => v.0.to_string(),
        }
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<VertexId> {
        self.labels
            .as_ref()?
            .iter()
            .position(|l| l == label)
            .map(VertexId)
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.p).map(VertexId)
    }

    #[inline]
    fn cell(&self, u: VertexId, v: VertexId) -> usize {
        u.0 * self.p + v.0
    }

    fn set(&mut self, u: VertexId, v: VertexId, mark: EdgeMark) {
        let a = self.cell(u, v);
        let b = self.cell(v, u);
        self.marks[a] = mark;
        self.marks[b] = mark.reversed();
    }

    fn check(&self, v: VertexId) -> Result<(), GraphError> {
        if v.0 >= self.p {
            Err(GraphError::OutOfRange {
                vertex: v.0,
                p: self.p,
            })
        } else {
            Ok(())
        }
    }

    fn check_new_pair(&self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.is_adjacent(u, v) {
            return Err(GraphError::ConflictingEdge(u.min(v), u.max(v)));
        }
        Ok(())
    }

    /// Adds `u -> v`. Fails on self-loops or if the pair is already connected.
    pub fn add_directed(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        self.check_new_pair(u, v)?;
        self.set(u, v, EdgeMark::Forward);
        Ok(())
    }

    /// Adds `u -- v`. Fails on self-loops or if the pair is already connected.
    pub fn add_undirected(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        self.check_new_pair(u, v)?;
        self.set(u, v, EdgeMark::Undirected);
        Ok(())
    }

    pub fn add_edge(&mut self, e: Edge) -> Result<(), GraphError> {
        match e {
            Edge::Directed(u, v) => self.add_directed(u, v),
            Edge::Undirected(u, v) => self.add_undirected(u, v),
        }
    }

    /// Removes whatever edge joins `u` and `v`; returns whether one existed.
    pub fn remove_edge(&mut self, u: VertexId, v: VertexId) -> bool {
        let had = self.is_adjacent(u, v);
        self.set(u, v, EdgeMark::None);
        had
    }

    /// Turns `u -- v` into `u -> v`. Returns `false` (and leaves the graph
    /// untouched) if the pair is not joined by an undirected edge.
    pub fn orient(&mut self, u: VertexId, v: VertexId) -> bool {
        if self.mark(u, v) != EdgeMark::Undirected {
            return false;
        }
        self.set(u, v, EdgeMark::Forward);
        true
    }

    /// Drops the direction of the edge between `u` and `v`, if any.
    pub fn make_undirected(&mut self, u: VertexId, v: VertexId) -> bool {
        if !self.is_adjacent(u, v) {
            return false;
        }
        self.set(u, v, EdgeMark::Undirected);
        true
    }

    #[inline]
    pub fn mark(&self, u: VertexId, v: VertexId) -> EdgeMark {
        self.marks[self.cell(u, v)]
    }

    #[inline]
    pub fn is_adjacent(&self, u: VertexId, v: VertexId) -> bool {
        self.mark(u, v).is_edge()
    }

    #[inline]
    pub fn has_directed(&self, u: VertexId, v: VertexId) -> bool {
        self.mark(u, v) == EdgeMark::Forward
    }

    #[inline]
    pub fn has_undirected(&self, u: VertexId, v: VertexId) -> bool {
        self.mark(u, v) == EdgeMark::Undirected
    }

    fn row(&self, u: VertexId, pred: impl Fn(EdgeMark) -> bool) -> Vec<VertexId> {
        let start = u.0 * self.p;
        self.marks[start..start + self.p]
            .iter()
            .enumerate()
            .filter(|(_, m)| pred(**m))
            .map(|(i, _)| VertexId(i))
            .collect()
    }

    /// All vertices joined to `u` by any edge.
    pub fn adjacent(&self, u: VertexId) -> Vec<VertexId> {
        self.row(u, EdgeMark::is_edge)
    }

    /// Vertices joined to `u` by an undirected edge.
    pub fn neighbors(&self, u: VertexId) -> Vec<VertexId> {
        self.row(u, |m| m == EdgeMark::Undirected)
    }

    pub fn parents(&self, u: VertexId) -> Vec<VertexId> {
        self.row(u, |m| m == EdgeMark::Backward)
    }

    pub fn children(&self, u: VertexId) -> Vec<VertexId> {
        self.row(u, |m| m == EdgeMark::Forward)
    }

    pub fn degree(&self, u: VertexId) -> usize {
        let start = u.0 * self.p;
        self.marks[start..start + self.p]
            .iter()
            .filter(|m| m.is_edge())
            .count()
    }

    pub fn max_degree(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Directed edges, ascending by `(tail, head)`.
    pub fn directed_edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for u in self.vertices() {
            for v in self.children(u) {
                out.push((u, v));
            }
        }
        out
    }

    /// Undirected edges as `(min, max)` pairs in ascending order.
    pub fn undirected_edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for u in self.vertices() {
            for v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Every edge, ascending by unordered endpoint pair.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for u in self.vertices() {
            for v in ((u.0 + 1)..self.p).map(VertexId) {
                match self.mark(u, v) {
                    EdgeMark::None => {}
                    EdgeMark::Undirected => out.push(Edge::Undirected(u, v)),
                    EdgeMark::Forward => out.push(Edge::Directed(u, v)),
                    EdgeMark::Backward => out.push(Edge::Directed(v, u)),
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.marks.iter().filter(|m| m.is_edge()).count() / 2
    }

    /// Same adjacencies, every edge undirected.
    pub fn skeleton(&self) -> MixedGraph {
        let mut g = self.clone();
        for m in g.marks.iter_mut() {
            if m.is_edge() {
                *m = EdgeMark::Undirected;
            }
        }
        g
    }

    /// Subgraph induced by `keep`, renumbered densely in ascending order of
    /// the original ids. The second element maps new ids to old ones.
    pub fn induced_subgraph(&self, keep: &VertexSet) -> (MixedGraph, Vec<VertexId>) {
        let map: Vec<VertexId> = keep.iter().copied().filter(|v| v.0 < self.p).collect();
        let mut g = MixedGraph::new(map.len());
        for (i, &a) in map.iter().enumerate() {
            for (j, &b) in map.iter().enumerate().skip(i + 1) {
                g.set(VertexId(i), VertexId(j), self.mark(a, b));
            }
        }
        if let Some(labels) = &self.labels {
            g.labels = Some(map.iter().map(|v| labels[v.0].clone()).collect());
        }
        (g, map)
    }

    /// Connected components of the undirected part, without validating that
    /// the graph is a chain graph.
    fn undirected_components(&self) -> ChainComponentPartition {
        let mut component_of = vec![usize::MAX; self.p];
        let mut components = Vec::new();
        for s in self.vertices() {
            if component_of[s.0] != usize::MAX {
                continue;
            }
            let idx = components.len();
            let mut members = vec![s];
            component_of[s.0] = idx;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for y in self.neighbors(x) {
                    if component_of[y.0] == usize::MAX {
                        component_of[y.0] = idx;
                        members.push(y);
                        queue.push_back(y);
                    }
                }
            }
            members.sort();
            components.push(members);
        }
        ChainComponentPartition {
            components,
            component_of,
        }
    }

    /// Topological order of the undirected components under the directed
    /// edges, or `None` if that component digraph has a cycle or a directed
    /// edge runs inside a component.
    fn component_order(&self, part: &ChainComponentPartition) -> Option<Vec<usize>> {
        let k = part.components.len();
        let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
        for (u, v) in self.directed_edges() {
            let (cu, cv) = (part.component_of[u.0], part.component_of[v.0]);
            if cu == cv {
                return None;
            }
            succ[cu].insert(cv);
        }
        let mut indeg = vec![0usize; k];
        for s in &succ {
            for &t in s {
                indeg[t] += 1;
            }
        }
        // smallest ready component first
        let mut ready: BTreeSet<usize> = (0..k).filter(|&c| indeg[c] == 0).collect();
        let mut order = Vec::with_capacity(k);
        while let Some(c) = ready.pop_first() {
            order.push(c);
            for &t in &succ[c] {
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    ready.insert(t);
                }
            }
        }
        (order.len() == k).then_some(order)
    }

    /// True iff the graph has no partially directed cycle. Checked by
    /// contracting chain components and testing the resulting digraph for
    /// cycles.
    pub fn is_chain_graph(&self) -> bool {
        let part = self.undirected_components();
        self.component_order(&part).is_some()
    }

    pub fn chain_components(&self) -> Result<ChainComponentPartition, GraphError> {
        let part = self.undirected_components();
        match self.component_order(&part) {
            Some(_) => Ok(part),
            None => Err(GraphError::NotAChainGraph),
        }
    }

    pub fn moral_graph(&self) -> Result<MixedGraph, GraphError> {
        let part = self.chain_components()?;
        Ok(self.moralize_with(&part))
    }

    fn moralize_with(&self, part: &ChainComponentPartition) -> MixedGraph {
        let mut m = self.skeleton();
        for comp in &part.components {
            let mut pa = VertexSet::new();
            for &c in comp {
                pa.extend(self.parents(c));
            }
            let pa: Vec<VertexId> = pa.into_iter().collect();
            for (i, &a) in pa.iter().enumerate() {
                for &b in &pa[i + 1..] {
                    m.set(a, b, EdgeMark::Undirected);
                }
            }
        }
        m
    }

    /// Parents and neighbours of `a` that are not in `a` itself.
    pub fn boundary(&self, a: &VertexSet) -> VertexSet {
        let mut bd = VertexSet::new();
        for &x in a {
            for y in self.parents(x).into_iter().chain(self.neighbors(x)) {
                if !a.contains(&y) {
                    bd.insert(y);
                }
            }
        }
        bd
    }

    fn ancestral_closure(&self, a: &VertexSet) -> VertexSet {
        let mut out = a.clone();
        let mut stack: Vec<VertexId> = a.iter().copied().collect();
        while let Some(x) = stack.pop() {
            for y in self.parents(x).into_iter().chain(self.neighbors(x)) {
                if out.insert(y) {
                    stack.push(y);
                }
            }
        }
        out
    }

    /// Smallest superset of `a` closed under taking boundaries.
    pub fn ancestral_set(&self, a: &VertexSet) -> Result<VertexSet, GraphError> {
        if !self.is_chain_graph() {
            return Err(GraphError::NotAChainGraph);
        }
        for &v in a {
            self.check(v)?;
        }
        Ok(self.ancestral_closure(a))
    }
}

/// Chain components of a chain graph, indexed by their smallest member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComponentPartition {
    pub components: Vec<Vec<VertexId>>,
    pub component_of: Vec<usize>,
}

impl ChainComponentPartition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// A [`MixedGraph`] known to have no partially directed cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainGraph {
    graph: MixedGraph,
    components: ChainComponentPartition,
    order: Vec<usize>,
}

impl ChainGraph {
    pub fn new(graph: MixedGraph) -> Result<Self, GraphError> {
        let components = graph.undirected_components();
        let order = graph
            .component_order(&components)
            .ok_or(GraphError::NotAChainGraph)?;
        Ok(ChainGraph {
            graph,
            components,
            order,
        })
    }

    pub fn graph(&self) -> &MixedGraph {
        &self.graph
    }

    pub fn into_inner(self) -> MixedGraph {
        self.graph
    }

    pub fn components(&self) -> &ChainComponentPartition {
        &self.components
    }

    /// Component indices in a topological order (parents before children).
    pub fn component_order(&self) -> &[usize] {
        &self.order
    }

    pub fn moral(&self) -> MixedGraph {
        self.graph.moralize_with(&self.components)
    }

    pub fn ancestral_set(&self, a: &VertexSet) -> VertexSet {
        self.graph.ancestral_closure(a)
    }
}

impl Deref for ChainGraph {
    type Target = MixedGraph;

    fn deref(&self) -> &MixedGraph {
        &self.graph
    }
}

impl TryFrom<MixedGraph> for ChainGraph {
    type Error = GraphError;

    fn try_from(g: MixedGraph) -> Result<Self, GraphError> {
        ChainGraph::new(g)
    }
}

/// Shorthand used throughout tests and fixtures.
pub fn vset<I: IntoIterator<Item = usize>>(ids: I) -> VertexSet {
    ids.into_iter().map(VertexId).collect()
}
