mod common;

use std::collections::BTreeSet;

use lwfcg::graph::vset;
use lwfcg::separation::SeparationError;
use lwfcg::{c_separated, minimal_separator, ChainGraph, MixedGraph, SeparationQuery, VertexId, VertexSet};
use proptest::prelude::*;

fn arbitrary_graph(max_p: usize) -> impl Strategy<Value = MixedGraph> {
    (1..=max_p).prop_flat_map(|p| {
        let pairs = p * (p - 1) / 2;
        proptest::collection::vec(0u8..4, pairs).prop_map(move |marks| {
            let mut g = MixedGraph::new(p);
            let mut it = marks.into_iter();
            for u in 0..p {
                for v in (u + 1)..p {
                    let (a, b) = (VertexId(u), VertexId(v));
                    match it.next().unwrap() {
                        1 => g.add_undirected(a, b).unwrap(),
                        2 => g.add_directed(a, b).unwrap(),
                        3 => g.add_directed(b, a).unwrap(),
                        _ => {}
                    }
                }
            }
            g
        })
    })
}

/// Random chain graph with its vertices relabeled by a random permutation so
/// directed edges do not always point up.
fn chain_graph(max_p: usize) -> impl Strategy<Value = ChainGraph> {
    (any::<u64>(), Just(max_p)).prop_flat_map(|(seed, max_p)| {
        let g = common::random_graph(seed % 10_000, max_p, 3.0);
        let p = g.p();
        (Just(g), Just((0..p).collect::<Vec<_>>()).prop_shuffle())
    })
    .prop_map(|(g, perm)| {
        let mut h = MixedGraph::new(g.p());
        for (u, v) in g.directed_edges() {
            h.add_directed(VertexId(perm[u.0]), VertexId(perm[v.0])).unwrap();
        }
        for (u, v) in g.undirected_edges() {
            h.add_undirected(VertexId(perm[u.0]), VertexId(perm[v.0])).unwrap();
        }
        ChainGraph::new(h).unwrap()
    })
}

/// A semi-directed cycle exists iff the head of some arrow reaches its tail
/// along undirected or forward-directed steps.
fn brute_has_semidirected_cycle(g: &MixedGraph) -> bool {
    g.directed_edges().into_iter().any(|(u, v)| {
        let mut seen = vec![false; g.p()];
        let mut stack = vec![v];
        seen[v.0] = true;
        while let Some(x) = stack.pop() {
            if x == u {
                return true;
            }
            for y in g.vertices() {
                if !seen[y.0] && (g.has_undirected(x, y) || g.has_directed(x, y)) {
                    seen[y.0] = true;
                    stack.push(y);
                }
            }
        }
        false
    })
}

fn brute_components(g: &MixedGraph) -> Vec<usize> {
    let mut comp: Vec<usize> = (0..g.p()).collect();
    loop {
        let mut changed = false;
        for (u, v) in g.undirected_edges() {
            let m = comp[u.0].min(comp[v.0]);
            for x in [u, v] {
                if comp[x.0] != m {
                    comp[x.0] = m;
                    changed = true;
                }
            }
        }
        if !changed {
            return comp;
        }
    }
}

fn brute_ancestral(g: &MixedGraph, a: &VertexSet) -> VertexSet {
    let mut out = a.clone();
    loop {
        let bd: Vec<VertexId> = out
            .iter()
            .flat_map(|&x| g.parents(x).into_iter().chain(g.neighbors(x)))
            .collect();
        let before = out.len();
        out.extend(bd);
        if out.len() == before {
            return out;
        }
    }
}

/// Moral graph straight from the definition, as an adjacency predicate.
fn brute_moral(g: &MixedGraph) -> Vec<Vec<bool>> {
    let p = g.p();
    let comp = brute_components(g);
    let mut adj = vec![vec![false; p]; p];
    for u in 0..p {
        for v in 0..p {
            if u == v {
                continue;
            }
            let (a, b) = (VertexId(u), VertexId(v));
            if g.is_adjacent(a, b) {
                adj[u][v] = true;
            }
            let married = g.children(a).iter().any(|&c1| {
                g.children(b).iter().any(|&c2| comp[c1.0] == comp[c2.0])
            });
            if married {
                adj[u][v] = true;
            }
        }
    }
    adj
}

/// Separation by enumerating every simple path in the moral graph of the
/// ancestral subgraph.
fn brute_separated(g: &ChainGraph, a: VertexId, b: VertexId, s: &VertexSet) -> bool {
    let mut keep = s.clone();
    keep.insert(a);
    keep.insert(b);
    let anc = brute_ancestral(g, &keep);
    let (sub, map) = g.induced_subgraph(&anc);
    let local = |x: VertexId| map.iter().position(|&y| y == x).unwrap();
    let moral = brute_moral(&sub);
    let blocked: Vec<bool> = map.iter().map(|x| s.contains(x)).collect();
    fn dfs(m: &[Vec<bool>], blocked: &[bool], x: usize, target: usize, on_path: &mut Vec<bool>) -> bool {
        if x == target {
            return true;
        }
        on_path[x] = true;
        for y in 0..m.len() {
            if m[x][y] && !on_path[y] && !blocked[y] && dfs(m, blocked, y, target, on_path) {
                return true;
            }
        }
        on_path[x] = false;
        false
    }
    let mut on_path = vec![false; sub.p()];
    !dfs(&moral, &blocked, local(a), local(b), &mut on_path)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn chain_graph_check_matches_cycle_search(g in arbitrary_graph(6)) {
        prop_assert_eq!(g.is_chain_graph(), !brute_has_semidirected_cycle(&g));
    }

    #[test]
    fn components_partition_vertices(g in chain_graph(10)) {
        let part = g.components();
        let comp = brute_components(&g);
        let mut seen = BTreeSet::new();
        for (i, c) in part.components.iter().enumerate() {
            for &v in c {
                prop_assert!(seen.insert(v));
                prop_assert_eq!(part.component_of[v.0], i);
            }
        }
        prop_assert_eq!(seen.len(), g.p());
        for u in g.vertices() {
            for v in g.vertices() {
                prop_assert_eq!(comp[u.0] == comp[v.0], part.component_of[u.0] == part.component_of[v.0]);
            }
        }
        let rank: Vec<usize> = {
            let mut r = vec![0; part.len()];
            for (i, &c) in g.component_order().iter().enumerate() {
                r[c] = i;
            }
            r
        };
        for (u, v) in g.directed_edges() {
            prop_assert!(rank[part.component_of[u.0]] < rank[part.component_of[v.0]]);
        }
    }

    #[test]
    fn moral_graph_matches_definition(g in chain_graph(8)) {
        let moral = g.moral();
        let expect = brute_moral(&g);
        for u in g.vertices() {
            for v in g.vertices() {
                if u != v {
                    prop_assert_eq!(moral.has_undirected(u, v), expect[u.0][v.0]);
                }
            }
        }
        for (u, v) in g.skeleton().undirected_edges() {
            prop_assert!(moral.is_adjacent(u, v));
        }
    }

    #[test]
    fn ancestral_set_is_minimal_closure(g in chain_graph(8), picks in proptest::collection::vec(any::<bool>(), 8)) {
        let a: VertexSet = g.vertices().filter(|v| picks[v.0]).collect();
        prop_assert_eq!(g.ancestral_set(&a), brute_ancestral(&g, &a));
    }

    #[test]
    fn separation_matches_path_enumeration(
        g in chain_graph(8),
        picks in proptest::collection::vec(0u8..3, 8),
        pair in (0usize..8, 0usize..8),
    ) {
        let p = g.p();
        let a = VertexId(pair.0 % p);
        let b = VertexId((a.0 + 1 + pair.1 % (p - 1)) % p);
        let s: VertexSet = g.vertices().filter(|&v| v != a && v != b && picks[v.0] == 0).collect();
        let q = SeparationQuery::pair(a, b, s.iter().copied());
        let sep = c_separated(&g, &q).unwrap();
        prop_assert_eq!(sep, brute_separated(&g, a, b, &s));
        let rev = SeparationQuery::pair(b, a, s.iter().copied());
        prop_assert_eq!(sep, c_separated(&g, &rev).unwrap());
    }

    #[test]
    fn minimal_separators_are_sound_and_minimal(g in chain_graph(10)) {
        for a in g.vertices() {
            for b in g.vertices() {
                if a >= b {
                    continue;
                }
                if g.is_adjacent(a, b) {
                    prop_assert_eq!(minimal_separator(&g, a, b), Err(SeparationError::AdjacentPair(a, b)));
                    continue;
                }
                let z = minimal_separator(&g, a, b).unwrap();
                prop_assert!(c_separated(&g, &SeparationQuery::pair(a, b, z.iter().copied())).unwrap());
                for &x in &z {
                    let mut smaller = z.clone();
                    smaller.remove(&x);
                    prop_assert!(!c_separated(&g, &SeparationQuery::pair(a, b, smaller)).unwrap());
                }
            }
        }
    }
}

#[test]
fn figure3_minimal_separators() {
    let fx = lwfcg::fixtures::example2();
    let g = &fx.truth;
    assert_eq!(minimal_separator(g, fx.id("a"), fx.id("d")).unwrap(), vset([fx.id("b").0]));
    assert_eq!(minimal_separator(g, fx.id("b"), fx.id("c")).unwrap(), vset([]));
    assert_eq!(g.ancestral_set(&vset([fx.id("a").0, fx.id("e").0])), vset(0..5));
}

#[test]
fn example1_separation_claims() {
    let fx = lwfcg::fixtures::example1();
    let g = &fx.truth;
    let q = |u: &str, v: &str, s: &str| SeparationQuery::pair(fx.id(u), fx.id(v), fx.ids(s));
    assert!(c_separated(g, &q("a", "d", "bc")).unwrap());
    assert!(!c_separated(g, &q("c", "e", "abd")).unwrap());
}
