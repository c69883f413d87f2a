//! c-separation in chain graphs and construction of minimal separators.
//!
//! `S` c-separates `A` from `B` when every path between them in the moral
//! graph of the subgraph induced by `An(A ∪ B ∪ S)` meets `S`.

use std::collections::VecDeque;

use thiserror::Error;

use crate::graph::{ChainGraph, MixedGraph, VertexId, VertexSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeparationError {
    #[error("invalid separation query: {0}")]
    InvalidQuery(String),
    #[error("vertices {0} and {1} are adjacent; no separator exists")]
    AdjacentPair(VertexId, VertexId),
}

/// Triple `(A, B, S)` of disjoint vertex sets with `A`, `B` nonempty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationQuery {
    pub a: VertexSet,
    pub b: VertexSet,
    pub s: VertexSet,
}

impl SeparationQuery {
    pub fn new(a: VertexSet, b: VertexSet, s: VertexSet) -> Self {
        SeparationQuery { a, b, s }
    }

    /// Single-vertex query `u ⊥ v | s`.
    pub fn pair(u: VertexId, v: VertexId, s: impl IntoIterator<Item = VertexId>) -> Self {
        SeparationQuery {
            a: VertexSet::from([u]),
            b: VertexSet::from([v]),
            s: s.into_iter().collect(),
        }
    }

    pub fn validate(&self, p: usize) -> Result<(), SeparationError> {
        if self.a.is_empty() || self.b.is_empty() {
            return Err(SeparationError::InvalidQuery("A and B must be nonempty".into()));
        }
        if let Some(v) = self.a.iter().chain(&self.b).chain(&self.s).find(|v| v.0 >= p) {
            return Err(SeparationError::InvalidQuery(format!(
                "vertex {v} out of range (p = {p})"
            )));
        }
        if !self.a.is_disjoint(&self.b) || !self.a.is_disjoint(&self.s) || !self.b.is_disjoint(&self.s)
        {
            return Err(SeparationError::InvalidQuery("A, B and S must be disjoint".into()));
        }
        Ok(())
    }
}

/// Moral graph of the subgraph induced by `An(keep)`, plus the map from its
/// dense ids back to `g`'s ids.
fn moral_of_ancestral(g: &ChainGraph, keep: &VertexSet) -> (MixedGraph, Vec<VertexId>) {
    let anc = g.ancestral_set(keep);
    let (sub, map) = g.induced_subgraph(&anc);
    let sub = ChainGraph::new(sub).expect("induced subgraph of a chain graph is a chain graph");
    (sub.moral(), map)
}

fn local_ids(map: &[VertexId], set: &VertexSet) -> Vec<VertexId> {
    set.iter()
        .map(|v| VertexId(map.binary_search(v).expect("vertex lies in the ancestral set")))
        .collect()
}

/// Breadth-first search over undirected edges from `start`. Vertices in
/// `stop` are recorded when first reached and not expanded further.
fn search(m: &MixedGraph, start: &[VertexId], stop: &[bool]) -> (Vec<bool>, Vec<VertexId>) {
    let mut seen = vec![false; m.p()];
    let mut hit = Vec::new();
    let mut queue = VecDeque::new();
    for &s in start {
        seen[s.0] = true;
        queue.push_back(s);
    }
    while let Some(x) = queue.pop_front() {
        for y in m.neighbors(x) {
            if seen[y.0] {
                continue;
            }
            seen[y.0] = true;
            if stop[y.0] {
                hit.push(y);
            } else {
                queue.push_back(y);
            }
        }
    }
    (seen, hit)
}

pub fn c_separated(g: &ChainGraph, q: &SeparationQuery) -> Result<bool, SeparationError> {
    q.validate(g.p())?;
    let mut keep = q.a.clone();
    keep.extend(q.b.iter().copied());
    keep.extend(q.s.iter().copied());
    let (moral, map) = moral_of_ancestral(g, &keep);

    let mut blocked = vec![false; moral.p()];
    for s in local_ids(&map, &q.s) {
        blocked[s.0] = true;
    }
    let (reached, _) = search(&moral, &local_ids(&map, &q.a), &blocked);
    Ok(local_ids(&map, &q.b).iter().all(|b| !reached[b.0]))
}

/// Minimal separator for two nonadjacent vertices: take the neighbours of `a`
/// in the moral graph of `An({a, b})`, keep those reachable from `a` without
/// passing through another one, then keep those reachable from `b` the same
/// way.
pub fn minimal_separator(
    g: &ChainGraph,
    a: VertexId,
    b: VertexId,
) -> Result<VertexSet, SeparationError> {
    let q = SeparationQuery::pair(a, b, []);
    q.validate(g.p())?;
    if g.is_adjacent(a, b) {
        return Err(SeparationError::AdjacentPair(a, b));
    }
    let (moral, map) = moral_of_ancestral(g, &VertexSet::from([a, b]));
    let la = local_ids(&map, &q.a)[0];
    let lb = local_ids(&map, &q.b)[0];
    if moral.is_adjacent(la, lb) {
        return Err(SeparationError::AdjacentPair(a, b));
    }

    let mut candidates = vec![false; moral.p()];
    for z in moral.neighbors(la) {
        candidates[z.0] = true;
    }
    let (_, first) = search(&moral, &[la], &candidates);

    let mut marked = vec![false; moral.p()];
    for z in first {
        marked[z.0] = true;
    }
    let (_, second) = search(&moral, &[lb], &marked);
    Ok(second.into_iter().map(|z| map[z.0]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::vset;

    fn chain(p: usize, directed: &[(usize, usize)], undirected: &[(usize, usize)]) -> ChainGraph {
        let mut g = MixedGraph::new(p);
        for &(u, v) in directed {
            g.add_directed(VertexId(u), VertexId(v)).unwrap();
        }
        for &(u, v) in undirected {
            g.add_undirected(VertexId(u), VertexId(v)).unwrap();
        }
        ChainGraph::new(g).unwrap()
    }

    #[test]
    fn collider_opens_when_conditioned() {
        let g = chain(3, &[(0, 2), (1, 2)], &[]);
        let q = |s: &[usize]| SeparationQuery::new(vset([0]), vset([1]), vset(s.iter().copied()));
        assert!(c_separated(&g, &q(&[])).unwrap());
        assert!(!c_separated(&g, &q(&[2])).unwrap());
    }

    #[test]
    fn complex_in_component_is_moralized() {
        // a -> c -- d <- b : a and b married through the component {c, d}
        let g = chain(4, &[(0, 2), (1, 3)], &[(2, 3)]);
        let q = |s: &[usize]| SeparationQuery::new(vset([0]), vset([1]), vset(s.iter().copied()));
        assert!(c_separated(&g, &q(&[])).unwrap());
        assert!(!c_separated(&g, &q(&[2])).unwrap());
        assert!(!c_separated(&g, &q(&[2, 3])).unwrap());
        assert_eq!(minimal_separator(&g, VertexId(0), VertexId(1)).unwrap(), vset([]));
    }

    #[test]
    fn invalid_queries() {
        let g = chain(3, &[(0, 1)], &[]);
        let bad = [
            SeparationQuery::new(vset([]), vset([1]), vset([])),
            SeparationQuery::new(vset([0]), vset([0]), vset([])),
            SeparationQuery::new(vset([0]), vset([1]), vset([1])),
            SeparationQuery::new(vset([0]), vset([7]), vset([])),
        ];
        for q in bad {
            assert!(matches!(c_separated(&g, &q), Err(SeparationError::InvalidQuery(_))));
        }
        assert_eq!(
            minimal_separator(&g, VertexId(0), VertexId(1)),
            Err(SeparationError::AdjacentPair(VertexId(0), VertexId(1)))
        );
    }

    #[test]
    fn adjacency_defeats_separation() {
        let g = chain(2, &[], &[(0, 1)]);
        let q = SeparationQuery::pair(VertexId(0), VertexId(1), []);
        assert!(!c_separated(&g, &q).unwrap());
    }
}
