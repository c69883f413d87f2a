//! Small hand-built scenarios with known outcomes: two scripted oracles that
//! inject independence-judgement errors into known DAGs, and a chain graph
//! whose learned orientation contains one arrow that pattern extraction must
//! discard.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ci::{CiOracle, ScriptedOracle};
use crate::graph::{ChainGraph, MixedGraph, VertexId};
use crate::skeleton::{Claim, VariableOrdering};
use crate::synth::random_chain_graph_with;

/// A scripted scenario: labeled truth, oracle, and the orderings it is
/// usually run under.
#[derive(Debug)]
pub struct Fixture {
    pub truth: ChainGraph,
    pub oracle: ScriptedOracle,
    pub orders: Vec<VariableOrdering>,
    /// Independencies taken to hold for the walkthrough tables.
    pub claims: Vec<Claim>,
}

impl Fixture {
    pub fn id(&self, label: &str) -> VertexId {
        self.truth
            .vertex_by_label(label)
            .unwrap_or_else(|| panic!("no vertex labeled {label}"))
    }

    pub fn ids(&self, labels: &str) -> Vec<VertexId> {
        labels.chars().map(|c| self.id(&c.to_string())).collect()
    }

    pub fn order(&self, labels: &str) -> VariableOrdering {
        VariableOrdering::new(self.ids(labels)).expect("fixture ordering is a permutation")
    }
}

/// Builds a labeled graph from `"x->y"` and `"x--y"` items over one-letter
/// labels.
pub fn labeled_graph(labels: &str, edges: &[&str]) -> MixedGraph {
    let names: Vec<String> = labels.chars().map(String::from).collect();
    let mut g = MixedGraph::new(names.len()).with_labels(names).expect("distinct labels");
    for e in edges {
        let (directed, (a, b)) = match e.split_once("->") {
            Some(ab) => (true, ab),
            None => (false, e.split_once("--").expect("edge is x->y or x--y")),
        };
        let a = g.vertex_by_label(a.trim()).expect("known label");
        let b = g.vertex_by_label(b.trim()).expect("known label");
        if directed {
            g.add_directed(a, b).expect("fresh pair");
        } else {
            g.add_undirected(a, b).expect("fresh pair");
        }
    }
    g
}

fn claim(f: &Fixture, u: &str, v: &str, set: &str) -> Claim {
    Claim {
        u: f.id(u),
        v: f.id(v),
        set: f.ids(set),
    }
}

/// DAG on `a..e` with two wrong judgements: `a` and `e` dependent given
/// `{b, c}`, and `c` independent of `e` given `{a, b, d}`. Under the
/// original skeleton phase the ordering `d e a c b` drops `a -- e` while
/// `d c e a b` keeps it.
pub fn example1() -> Fixture {
    let dag = labeled_graph(
        "abcde",
        &["a->b", "a->c", "b->c", "b->d", "b->e", "c->d", "c->e", "d->e"],
    );
    let truth = ChainGraph::new(dag).expect("acyclic");
    let mut f = Fixture {
        oracle: ScriptedOracle::new(truth.clone()),
        truth,
        orders: Vec::new(),
        claims: Vec::new(),
    };
    let (a, c, e) = (f.id("a"), f.id("c"), f.id("e"));
    f.oracle.set(a, e, &f.ids("bc"), false);
    f.oracle.set(c, e, &f.ids("abd"), true);
    f.orders = vec![f.order("deacb"), f.order("dceab")];
    f.claims = vec![claim(&f, "a", "d", "bc"), claim(&f, "a", "e", "bcd"), claim(&f, "c", "e", "abd")];
    f
}

/// Expected skeleton for [`example1`] when `a -- e` is removed.
pub fn example1_skeleton() -> MixedGraph {
    labeled_graph("abcde", &["a--b", "a--c", "b--c", "b--d", "b--e", "c--d", "d--e"])
}

/// Expected skeleton for [`example1`] when `a -- e` survives.
pub fn example1_skeleton_extra() -> MixedGraph {
    labeled_graph(
        "abcde",
        &["a--b", "a--c", "b--c", "b--d", "b--e", "c--d", "d--e", "a--e"],
    )
}

/// DAG `b -> a <- c`, `b -> d -> e <- c` where `c` and `d` are judged
/// dependent marginally but independent given `{e}`. The sepset recorded
/// for `c, d` is `{b}` under `d c b a e` and `{e}` under `c d e a b`, which
/// changes the recovered complexes.
pub fn example2() -> Fixture {
    let dag = labeled_graph("abcde", &["b->a", "c->a", "b->d", "c->e", "d->e"]);
    let truth = ChainGraph::new(dag).expect("acyclic");
    let mut f = Fixture {
        oracle: ScriptedOracle::new(truth.clone()),
        truth,
        orders: Vec::new(),
        claims: Vec::new(),
    };
    let (a, b, c, d) = (f.id("a"), f.id("b"), f.id("c"), f.id("d"));
    f.oracle.set(c, d, &[], false);
    f.oracle.set(c, d, &f.ids("e"), true);
    // keep the complexes around e and a consistent with the {e} sepset
    f.oracle.set(b, c, &f.ids("e"), true);
    f.oracle.set(a, d, &f.ids("be"), true);
    f.orders = vec![f.order("dcbae"), f.order("cdeab")];
    f
}

/// Pattern from [`example2`] under `d c b a e`.
pub fn example2_pattern_first() -> MixedGraph {
    labeled_graph("abcde", &["b->a", "c->a", "c->e", "d->e", "b--d"])
}

/// Pattern from [`example2`] under `c d e a b`.
pub fn example2_pattern_second() -> MixedGraph {
    labeled_graph("abcde", &["b->a", "c->a", "b--d", "c--e", "d--e"])
}

/// `A -> D`, `B -> C`, `B -> D`, `C -- D` with an exact oracle. Complex
/// recovery orients `B -> C`, which is not a complex arrow.
pub fn figure4() -> Fixture {
    let g = labeled_graph("ABCD", &["A->D", "B->C", "B->D", "C--D"]);
    let truth = ChainGraph::new(g).expect("chain graph");
    let mut f = Fixture {
        oracle: ScriptedOracle::new(truth.clone()),
        truth,
        orders: Vec::new(),
        claims: Vec::new(),
    };
    f.orders = vec![f.order("ABCD")];
    f
}

/// Orientation of [`figure4`] before pattern extraction.
pub fn figure4_oriented() -> MixedGraph {
    labeled_graph("ABCD", &["A->D", "B->C", "B->D", "C--D"])
}

/// Pattern of [`figure4`].
pub fn figure4_pattern() -> MixedGraph {
    labeled_graph("ABCD", &["A->D", "B->D", "B--C", "C--D"])
}

/// Random chain graph on `p` vertices whose oracle gets `flips` answers
/// inverted, each on a random pair with a conditioning set of at most two
/// vertices.
pub fn scripted_noise(p: usize, expected_degree: f64, flips: usize, seed: u64) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let truth = random_chain_graph_with(p, expected_degree, &mut rng).expect("valid degree");
    let mut oracle = ScriptedOracle::new(truth.clone());
    let exact = crate::ci::GraphOracle::new(truth.clone());
    for _ in 0..flips {
        let mut vs: Vec<VertexId> = truth.vertices().collect();
        vs.shuffle(&mut rng);
        let size = rng.random_range(0..=2.min(p - 2));
        let (u, v, s) = (vs[0], vs[1], &vs[2..2 + size]);
        let answer = exact.query(u, v, s).expect("valid query").independent;
        oracle.set(u, v, s, !answer);
    }
    Fixture {
        orders: vec![VariableOrdering::natural(p)],
        truth,
        oracle,
        claims: Vec::new(),
    }
}

/// Looks up a fixture by name: `example1`, `example2` or `figure4`.
pub fn by_name(name: &str) -> Option<Fixture> {
    match name {
        "example1" => Some(example1()),
        "example2" => Some(example2()),
        "figure4" => Some(figure4()),
        _ => None,
    }
}
