#![allow(dead_code)]

use std::collections::BTreeSet;

use lwfcg::synth::random_chain_graph;
use lwfcg::{ChainGraph, GenSpec, MixedGraph, VertexId};

/// Random chain graph with `p` in `2..=max_p` and degree up to `max_degree`,
/// all derived from `seed`.
pub fn random_graph(seed: u64, max_p: usize, max_degree: f64) -> ChainGraph {
    let p = 2 + (seed as usize * 7 + 3) % (max_p - 1);
    let cap = max_degree.min((p - 1) as f64);
    let degree = cap * ((seed % 5) as f64 + 1.0) / 5.0;
    random_chain_graph(&GenSpec { p, expected_degree: degree, seed }).unwrap()
}

/// Arrows of every induced subgraph `a -> v1 -- ... -- vr <- b`, found by
/// trying every vertex subset as the undirected middle.
pub fn brute_force_complex_arrows(g: &MixedGraph) -> BTreeSet<(VertexId, VertexId)> {
    let p = g.p();
    let mut out = BTreeSet::new();
    for a in 0..p {
        for b in (a + 1)..p {
            let (a, b) = (VertexId(a), VertexId(b));
            if g.is_adjacent(a, b) {
                continue;
            }
            let rest: Vec<VertexId> = g.vertices().filter(|&x| x != a && x != b).collect();
            for mask in 1u32..(1 << rest.len()) {
                let mid: Vec<VertexId> = rest
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &x)| x)
                    .collect();
                if let Some((h1, h2)) = complex_ends(g, a, b, &mid) {
                    out.insert((a, h1));
                    out.insert((b, h2));
                }
            }
        }
    }
    out
}

/// If `mid` induces an undirected path whose ends are entered by the only
/// edges from `a` and from `b`, returns those ends.
fn complex_ends(g: &MixedGraph, a: VertexId, b: VertexId, mid: &[VertexId]) -> Option<(VertexId, VertexId)> {
    let inner: Vec<(VertexId, VertexId)> = mid
        .iter()
        .flat_map(|&x| mid.iter().map(move |&y| (x, y)))
        .filter(|&(x, y)| x < y && g.is_adjacent(x, y))
        .collect();
    if inner.iter().any(|&(x, y)| !g.has_undirected(x, y)) || inner.len() + 1 != mid.len() {
        return None;
    }
    let deg = |x: VertexId| inner.iter().filter(|&&(s, t)| s == x || t == x).count();
    if mid.len() > 1 && mid.iter().any(|&x| deg(x) > 2) {
        return None;
    }
    let mut reached = vec![mid[0]];
    let mut i = 0;
    while i < reached.len() {
        let x = reached[i];
        for &(s, t) in &inner {
            let y = if s == x { t } else if t == x { s } else { continue };
            if !reached.contains(&y) {
                reached.push(y);
            }
        }
        i += 1;
    }
    if reached.len() != mid.len() {
        return None;
    }
    let ends: Vec<VertexId> = if mid.len() == 1 { vec![mid[0], mid[0]] } else {
        mid.iter().copied().filter(|&x| deg(x) == 1).collect()
    };
    if ends.len() != 2 {
        return None;
    }
    let into = |t: VertexId| -> Vec<VertexId> { mid.iter().copied().filter(|&x| g.is_adjacent(t, x)).collect() };
    let (ea, eb) = (into(a), into(b));
    if ea.len() != 1 || eb.len() != 1 || !g.has_directed(a, ea[0]) || !g.has_directed(b, eb[0]) {
        return None;
    }
    let ok = (ea[0] == ends[0] && eb[0] == ends[1]) || (ea[0] == ends[1] && eb[0] == ends[0]);
    if !ok || (mid.len() > 1 && ea[0] == eb[0]) {
        return None;
    }
    Some((ea[0], eb[0]))
}

/// Skeleton of `g` with exactly `arrows` directed.
pub fn pattern_from(g: &MixedGraph, arrows: &BTreeSet<(VertexId, VertexId)>) -> MixedGraph {
    let mut out = g.skeleton();
    for &(u, v) in arrows {
        out.orient(u, v);
    }
    out
}
