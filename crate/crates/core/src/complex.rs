//! Orientation phase: complex-arrow recovery on a learned skeleton, pattern
//! extraction, and the conservative / majority-rule ambiguity variants.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use itertools::Itertools;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::ci::CiOracle;
use crate::graph::{MixedGraph, VertexId};
use crate::learn::LearnError;
use crate::skeleton::{SkeletonResult, VariableOrdering};

pub type Arrow = (VertexId, VertexId);

/// Learned equivalence-class representative. Directed edges of `graph` are
/// exactly `labeled_arrows`; `ambiguous_edges` holds unordered pairs
/// `(min, max)` of undirected edges the orientation rule refused to decide.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    pub graph: MixedGraph,
    pub labeled_arrows: BTreeSet<Arrow>,
    pub ambiguous_edges: BTreeSet<(VertexId, VertexId)>,
}

impl Pattern {
    /// Sidecar listing labeled arrows and ambiguous edges, one per line, in
    /// the graph file syntax prefixed by `arrow` or `ambiguous`.
    pub fn sidecar(&self) -> String {
        let mut out = String::new();
        for &(u, v) in &self.labeled_arrows {
            out.push_str(&format!("arrow {} -> {}\n", u.0, v.0));
        }
        for &(u, v) in &self.ambiguous_edges {
            out.push_str(&format!("ambiguous {} -- {}\n", u.0, v.0));
        }
        out
    }
}

/// How separating-set disagreement is handled when orienting.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AmbiguityPolicy {
    Conservative,
    Majority { alpha_pct: f64, beta_pct: f64 },
}

impl AmbiguityPolicy {
    pub fn majority(alpha_pct: f64, beta_pct: f64) -> Result<Self, LearnError> {
        let ok = |x: f64| (0.0..=100.0).contains(&x);
        if !ok(alpha_pct) || !ok(beta_pct) || alpha_pct > beta_pct {
            return Err(LearnError::InvalidPolicy(format!(
                "need 0 <= alpha <= beta <= 100, got alpha={alpha_pct} beta={beta_pct}"
            )));
        }
        Ok(AmbiguityPolicy::Majority { alpha_pct, beta_pct })
    }

    /// `(alpha, beta)` in percent; conservative is `(0, 100)`.
    pub fn thresholds(&self) -> (f64, f64) {
        match *self {
            AmbiguityPolicy::Conservative => (0.0, 100.0),
            AmbiguityPolicy::Majority { alpha_pct, beta_pct } => (alpha_pct, beta_pct),
        }
    }
}

impl fmt::Display for AmbiguityPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmbiguityPolicy::Conservative => write!(f, "conservative"),
            AmbiguityPolicy::Majority { alpha_pct, beta_pct } => {
                write!(f, "majority:{alpha_pct}:{beta_pct}")
            }
        }
    }
}

/// Nonadjacent pairs `(u, v)` with `u` before `v` in `order`.
fn nonadjacent_pairs(h: &MixedGraph, order: &VariableOrdering) -> Vec<(VertexId, VertexId)> {
    order
        .as_slice()
        .iter()
        .tuple_combinations()
        .filter(|&(&u, &v)| !h.is_adjacent(u, v))
        .map(|(&u, &v)| (u, v))
        .collect()
}

fn with_vertex(s: &[VertexId], w: VertexId) -> Vec<VertexId> {
    let mut out = s.to_vec();
    out.push(w);
    out.sort();
    out
}

/// For every nonadjacent pair and each undirected `u -- w`, orients `u -> w`
/// when `u` and `v` are dependent given `S_uv ∪ {w}`. Pairs are visited in
/// ordering order, `(u, v)` before `(v, u)`; the first orientation of an
/// edge wins.
pub fn recover_complex_arrows<O: CiOracle + ?Sized>(
    skel: &SkeletonResult,
    oracle: &O,
) -> Result<MixedGraph, LearnError> {
    let order = &skel.order;
    let mut h = skel.graph.clone();
    for (a, b) in nonadjacent_pairs(&skel.graph, order) {
        let sepset = skel
            .sepsets
            .get(a, b)
            .ok_or(LearnError::MissingSepset(a, b))?
            .to_vec();
        for (u, v) in [(a, b), (b, a)] {
            let mut ws = h.neighbors(u);
            order.sort(&mut ws);
            for w in ws {
                if sepset.contains(&w) || !h.has_undirected(u, w) {
                    continue;
                }
                let s = with_vertex(&sepset, w);
                let res = oracle.query(u, v, &s).map_err(|e| LearnError::oracle(u, v, &s, e))?;
                if !res.independent {
                    h.orient(u, w);
                }
            }
        }
    }
    Ok(h)
}

fn candidate_pair(h: &MixedGraph, (u1, w1): Arrow, (u2, w2): Arrow) -> bool {
    if u1 == u2 || h.is_adjacent(u1, u2) {
        return false;
    }
    if w1 == w2 {
        return true;
    }
    if h.is_adjacent(u1, w2) || h.is_adjacent(u2, w1) {
        return false;
    }
    let blocked = |x: VertexId| x == u1 || x == u2 || h.is_adjacent(x, u1) || h.is_adjacent(x, u2);
    let mut seen = vec![false; h.p()];
    seen[w1.0] = true;
    let mut queue = VecDeque::from([w1]);
    while let Some(x) = queue.pop_front() {
        for y in h.neighbors(x) {
            if y == w2 {
                return true;
            }
            if !seen[y.0] && !blocked(y) {
                seen[y.0] = true;
                queue.push_back(y);
            }
        }
    }
    false
}

/// Arrows of `h` that take part in some candidate complex: a pair `u1 -> w1`,
/// `u2 -> w2` with nonadjacent tails, neither tail adjacent to the other
/// head, and an undirected path from `w1` to `w2` avoiding the neighbours of
/// both tails.
pub fn complex_arrows(h: &MixedGraph) -> BTreeSet<Arrow> {
    let arrows = h.directed_edges();
    let mut labeled = BTreeSet::new();
    for (i, &a) in arrows.iter().enumerate() {
        for &b in &arrows[i + 1..] {
            if candidate_pair(h, a, b) {
                labeled.insert(a);
                labeled.insert(b);
            }
        }
    }
    labeled
}

/// Keeps the labeled complex arrows of `h_star` and turns every other
/// directed edge into an undirected one.
pub fn extract_pattern(h_star: &MixedGraph) -> Pattern {
    let labeled = complex_arrows(h_star);
    let mut graph = h_star.clone();
    for (u, v) in h_star.directed_edges() {
        if !labeled.contains(&(u, v)) {
            graph.make_undirected(u, v);
        }
    }
    Pattern {
        graph,
        labeled_arrows: labeled,
        ambiguous_edges: BTreeSet::new(),
    }
}

/// The pattern of a chain graph: its skeleton plus the arrows of its
/// minimal complexes.
pub fn true_pattern(g: &crate::graph::ChainGraph) -> Pattern {
    extract_pattern(g.graph())
}

/// Separating-set family for a nonadjacent pair: every candidate set the
/// oracle judges to separate them, sorted and deduplicated. Candidates are
/// the subsets of the final adjacency of either endpoint up to the highest
/// level reached, plus, for each level `i`, the `i`-subsets of either
/// endpoint's adjacency at the start of that level.
pub fn separating_family<O: CiOracle + ?Sized>(
    skel: &SkeletonResult,
    oracle: &O,
    u: VertexId,
    v: VertexId,
) -> Result<Vec<Vec<VertexId>>, LearnError> {
    let cap = skel.max_level.unwrap_or(0);
    let mut candidates = BTreeSet::new();
    for (x, y) in [(u, v), (v, u)] {
        let base: Vec<VertexId> = skel.graph.adjacent(x).into_iter().filter(|&z| z != y).collect();
        for size in 0..=cap.min(base.len()) {
            candidates.extend(base.iter().copied().combinations(size));
        }
        for (level, adj) in skel.level_adjacency.iter().enumerate().take(cap + 1) {
            let base: Vec<VertexId> = adj[x.0].iter().copied().filter(|&z| z != y).collect();
            candidates.extend(base.into_iter().combinations(level));
        }
    }
    let mut family = Vec::new();
    for s in candidates {
        let res = oracle.query(u, v, &s).map_err(|e| LearnError::oracle(u, v, &s, e))?;
        if res.independent {
            family.push(s);
        }
    }
    Ok(family)
}

/// Share of the family for which adding `w` leaves the pair dependent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeVote {
    pub tail: VertexId,
    pub head: VertexId,
    pub other: VertexId,
    pub dependent_fraction: Ratio<u64>,
}

#[derive(Clone, Debug)]
pub struct AmbiguityOutcome {
    /// Skeleton with the decided arrows, before pattern extraction.
    pub oriented: MixedGraph,
    pub pattern: Pattern,
    pub votes: Vec<EdgeVote>,
}

fn at_least(f: Ratio<u64>, pct: f64) -> bool {
    *f.numer() as f64 * 100.0 >= pct * *f.denom() as f64
}

fn at_most(f: Ratio<u64>, pct: f64) -> bool {
    *f.numer() as f64 * 100.0 <= pct * *f.denom() as f64
}

/// Orients the skeleton by the given ambiguity policy and extracts the
/// pattern. An edge is oriented `u -> w` when some nonadjacent pair votes
/// for it at or above beta and no pair votes for `w -> u`; an edge that is
/// never oriented but received a vote strictly between alpha and beta, or
/// that received conflicting orientations, is marked ambiguous.
pub fn label_ambiguity<O: CiOracle + ?Sized>(
    skel: &SkeletonResult,
    oracle: &O,
    policy: AmbiguityPolicy,
) -> Result<AmbiguityOutcome, LearnError> {
    let h = &skel.graph;
    let (alpha, beta) = policy.thresholds();
    let mut votes = Vec::new();
    for (a, b) in nonadjacent_pairs(h, &skel.order) {
        let family = separating_family(skel, oracle, a, b)?;
        if family.is_empty() {
            return Err(LearnError::EmptyFamily(a, b));
        }
        for (u, v) in [(a, b), (b, a)] {
            for w in h.neighbors(u) {
                let mut dependent = 0u64;
                for s in &family {
                    if s.contains(&w) {
                        continue;
                    }
                    let s = with_vertex(s, w);
                    let res = oracle.query(u, v, &s).map_err(|e| LearnError::oracle(u, v, &s, e))?;
                    dependent += u64::from(!res.independent);
                }
                votes.push(EdgeVote {
                    tail: u,
                    head: w,
                    other: v,
                    dependent_fraction: Ratio::new(dependent, family.len() as u64),
                });
            }
        }
    }

    let mut oriented: BTreeMap<(VertexId, VertexId), BTreeSet<Arrow>> = BTreeMap::new();
    let mut undecided = BTreeSet::new();
    for vote in &votes {
        let key = (vote.tail.min(vote.head), vote.tail.max(vote.head));
        if at_least(vote.dependent_fraction, beta) {
            oriented.entry(key).or_default().insert((vote.tail, vote.head));
        } else if !at_most(vote.dependent_fraction, alpha) {
            undecided.insert(key);
        }
    }

    let mut h_star = h.clone();
    let mut ambiguous = BTreeSet::new();
    for (key, dirs) in &oriented {
        if dirs.len() == 1 {
            let &(u, w) = dirs.iter().next().unwrap();
            h_star.orient(u, w);
        } else {
            ambiguous.insert(*key);
        }
    }
    ambiguous.extend(undecided.into_iter().filter(|k| !oriented.contains_key(k)));

    let mut pattern = extract_pattern(&h_star);
    pattern.ambiguous_edges = ambiguous;
    Ok(AmbiguityOutcome {
        oriented: h_star,
        pattern,
        votes,
    })
}
