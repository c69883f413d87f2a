//! Random chain graphs and block-recursive Gaussian samples from them.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ci::GaussianData;
use crate::graph::{ChainGraph, MixedGraph, VertexId};
use crate::linalg;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("precision matrix of component {0} is not positive definite")]
    NonPositiveDefinite(usize),
    #[error("parameters do not match the graph: {0}")]
    ParamMismatch(String),
}

/// Vertex count, expected degree and seed for [`random_chain_graph`].
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub p: usize,
    pub expected_degree: f64,
    pub seed: u64,
}

impl GenSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.p == 0 {
            return Err(SynthError::InvalidSpec("p must be at least 1".into()));
        }
        let max = (self.p - 1) as f64;
        if !(0.0..=max).contains(&self.expected_degree) {
            return Err(SynthError::InvalidSpec(format!(
                "expected degree {} outside [0, {max}]",
                self.expected_degree
            )));
        }
        Ok(())
    }
}

pub fn random_chain_graph(spec: &GenSpec) -> Result<ChainGraph, SynthError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    random_chain_graph_with(spec.p, spec.expected_degree, &mut rng)
}

/// Bernoulli lower-triangular adjacency with edge probability
/// `N / (p - 1)`, a uniform number `k` of consecutive components of
/// near-equal size, undirected edges inside components and directed edges
/// from the earlier component to the later one.
pub fn random_chain_graph_with<R: Rng + ?Sized>(
    p: usize,
    expected_degree: f64,
    rng: &mut R,
) -> Result<ChainGraph, SynthError> {
    GenSpec { p, expected_degree, seed: 0 }.validate()?;
    let s = if p > 1 { expected_degree / (p - 1) as f64 } else { 0.0 };
    let mut adj = Vec::new();
    for i in 1..p {
        for j in 0..i {
            if rng.random_bool(s) {
                adj.push((j, i));
            }
        }
    }
    let k = rng.random_range(1..=p);
    let component = interval_split(p, k);
    let mut g = MixedGraph::new(p);
    for (j, i) in adj {
        let (a, b) = (VertexId(j), VertexId(i));
        if component[j] == component[i] {
            g.add_undirected(a, b).expect("fresh pair");
        } else {
            g.add_directed(a, b).expect("fresh pair");
        }
    }
    Ok(ChainGraph::new(g).expect("edges only point to later intervals"))
}

/// Interval index of every vertex when `0..p` is cut into `k` consecutive
/// runs whose lengths differ by at most one (longer runs first).
pub fn interval_split(p: usize, k: usize) -> Vec<usize> {
    let (base, extra) = (p / k, p % k);
    let mut out = Vec::with_capacity(p);
    for c in 0..k {
        let len = base + usize::from(c < extra);
        out.extend(std::iter::repeat_n(c, len));
    }
    out
}

/// Sampling ranges for [`random_params_with`]. Magnitudes are drawn
/// uniformly from the range and given a random sign.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamRanges {
    pub weight: (f64, f64),
    pub precision: (f64, f64),
}

impl Default for ParamRanges {
    fn default() -> Self {
        ParamRanges {
            weight: (0.5, 1.0),
            precision: (0.1, 0.3),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentPrecision<T> {
    pub vertices: Vec<VertexId>,
    /// Row-major `k x k`, rows in `vertices` order.
    pub matrix: Vec<T>,
}

/// Linear Gaussian parameters on a chain graph: a weight per directed edge
/// and a precision matrix per chain component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams<T> {
    pub weights: BTreeMap<(VertexId, VertexId), T>,
    /// Indexed like the graph's chain components.
    pub precisions: Vec<ComponentPrecision<T>>,
}

pub fn random_params<T: Scalar>(g: &ChainGraph, seed: u64) -> GaussianParams<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_params_with(g, &ParamRanges::default(), &mut rng)
}

fn signed<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    let m = if hi > lo { rng.random_range(lo..hi) } else { lo };
    if rng.random_bool(0.5) {
        m
    } else {
        -m
    }
}

pub fn random_params_with<T: Scalar, R: Rng + ?Sized>(
    g: &ChainGraph,
    ranges: &ParamRanges,
    rng: &mut R,
) -> GaussianParams<T> {
    let weights = g
        .directed_edges()
        .into_iter()
        .map(|e| (e, T::lit(signed(rng, ranges.weight))))
        .collect();
    let mut precisions = Vec::new();
    for comp in &g.components().components {
        let vertices: Vec<VertexId> = comp.to_vec();
        let k = vertices.len();
        let mut m = vec![0.0f64; k * k];
        for i in 0..k {
            for j in (i + 1)..k {
                if g.has_undirected(vertices[i], vertices[j]) {
                    let x = signed(rng, ranges.precision);
                    m[i * k + j] = x;
                    m[j * k + i] = x;
                }
            }
        }
        for i in 0..k {
            let off: f64 = (0..k).filter(|&j| j != i).map(|j| m[i * k + j].abs()).sum();
            m[i * k + i] = 1.0 + off;
        }
        precisions.push(ComponentPrecision {
            vertices,
            matrix: m.into_iter().map(T::lit).collect(),
        });
    }
    GaussianParams { weights, precisions }
}

/// Draws `n` rows. Components are visited in topological order; given its
/// parents a component is Gaussian with precision `Λ` and mean
/// `Λ⁻¹ B x_pa`, where `B` holds the directed edge weights.
pub fn sample_gaussian<T: Scalar>(
    g: &ChainGraph,
    params: &GaussianParams<T>,
    n: usize,
    seed: u64,
) -> Result<GaussianData<T>, SynthError>
where
    StandardNormal: Distribution<T>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_gaussian_with(g, params, n, &mut rng)
}

pub fn sample_gaussian_with<T: Scalar, R: Rng + ?Sized>(
    g: &ChainGraph,
    params: &GaussianParams<T>,
    n: usize,
    rng: &mut R,
) -> Result<GaussianData<T>, SynthError>
where
    StandardNormal: Distribution<T>,
{
    let comps = &g.components().components;
    if params.precisions.len() != comps.len() {
        return Err(SynthError::ParamMismatch(format!(
            "{} precision blocks for {} components",
            params.precisions.len(),
            comps.len()
        )));
    }
    let p = g.p();
    let mut factors = Vec::with_capacity(comps.len());
    for (ci, block) in params.precisions.iter().enumerate() {
        let k = block.vertices.len();
        if block.vertices.iter().copied().ne(comps[ci].iter().copied()) || block.matrix.len() != k * k {
            return Err(SynthError::ParamMismatch(format!("block {ci} does not match its component")));
        }
        factors.push(linalg::cholesky(&block.matrix, k).ok_or(SynthError::NonPositiveDefinite(ci))?);
    }
    for &(u, v) in params.weights.keys() {
        if !g.has_directed(u, v) {
            return Err(SynthError::ParamMismatch(format!("weight on missing edge {u} -> {v}")));
        }
    }

    let mut rows = vec![T::zero(); n * p];
    for r in 0..n {
        let row = &mut rows[r * p..(r + 1) * p];
        for &ci in g.component_order() {
            let block = &params.precisions[ci];
            let k = block.vertices.len();
            let b: Vec<T> = block
                .vertices
                .iter()
                .map(|&c| {
                    g.parents(c).into_iter().fold(T::zero(), |acc, pa| {
                        acc + params.weights.get(&(pa, c)).copied().unwrap_or(T::zero()) * row[pa.0]
                    })
                })
                .collect();
            let l = &factors[ci];
            let mean = linalg::solve_lower_transposed(l, k, &linalg::solve_lower(l, k, &b));
            let z: Vec<T> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
            let noise = linalg::solve_lower_transposed(l, k, &z);
            for (i, &c) in block.vertices.iter().enumerate() {
                row[c.0] = mean[i] + noise[i];
            }
        }
    }
    GaussianData::from_rows(n, p, rows)
        .map_err(|e| SynthError::ParamMismatch(format!("sampled data rejected: {e}")))
}
