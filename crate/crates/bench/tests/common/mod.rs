#![allow(dead_code)]

use std::collections::BTreeSet;

use lwfcg::synth::random_chain_graph;
use lwfcg::{ChainGraph, GenSpec, MixedGraph, VertexId, VertexSet};

/// Random chain graph with `p` in `2..=max_p` and degree up to `max_degree`,
/// all derived from `seed`.
pub fn random_graph(seed: u64, max_p: usize, max_degree: f64) -> ChainGraph {
    let p = 2 + (seed as usize * 7 + 3) % (max_p - 1);
    let cap = max_degree.min((p - 1) as f64);
    let degree = cap * ((seed % 5) as f64 + 1.0) / 5.0;
    random_chain_graph(&GenSpec { p, expected_degree: degree, seed }).unwrap()
}

pub fn binom(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
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

pub fn brute_components(g: &MixedGraph) -> Vec<usize> {
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

pub fn brute_ancestral(g: &MixedGraph, a: &VertexSet) -> VertexSet {
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
pub fn brute_moral(g: &MixedGraph) -> Vec<Vec<bool>> {
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
pub fn brute_separated(g: &ChainGraph, a: VertexId, b: VertexId, s: &VertexSet) -> bool {
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
