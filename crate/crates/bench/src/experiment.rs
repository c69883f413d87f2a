//! Grid sweeps over `(p, N, n, alpha, variant)`.
//!
//! Each `(p, N)` cell and repetition gets its own ChaCha stream derived from
//! the base seed, so results do not depend on how tasks are spread across
//! worker threads. Records are sorted into grid order before they are
//! returned.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use lwfcg::ci::CiOracle;
use lwfcg::synth::{random_chain_graph_with, random_params_with, sample_gaussian_with, ParamRanges};
use lwfcg::{
    learn_pattern, true_pattern, ChainGraph, GaussCiTest, GaussianData, GraphOracle, LearnOptions, Pattern,
    VariableOrdering, Variant, VertexId,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{score_skeleton, shd};

pub const SCHEMA: &str = "v1";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0} list is empty")]
    EmptyList(&'static str),
    #[error("repetitions must be at least 1")]
    NoRepetitions,
    #[error("threads must be at least 1")]
    NoThreads,
    #[error("bad variant {0:?}")]
    Variant(String),
    #[error("{0}")]
    Value(String),
    #[error("reading config: {0}")]
    Io(#[from] std::io::Error),
    #[error("parsing config: {0}")]
    Toml(#[from] toml::de::Error),
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ordering {
    /// Vertex ids in increasing order.
    #[default]
    Natural,
    Reversed,
    /// A fresh permutation per repetition, drawn from the task stream.
    Shuffled,
}

fn default_threads() -> usize {
    1
}

/// Declarative sweep description, read from TOML:
///
/// ```toml
/// p = [50]
/// degree = [3.0]          # expected degree N
/// n = [2000]
/// alpha = [0.005]
/// variants = ["original-plain", "stable-plain", "stable-majority:30:60"]
/// repetitions = 30
/// seed = 1
/// threads = 4             # default 1
/// exact_oracle = false    # default false: Gaussian data and Fisher-z tests
/// ordering = "natural"    # natural | reversed | shuffled
///
/// [params]                # optional, defaults shown
/// weight = [0.5, 1.0]
/// precision = [0.1, 0.3]
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub p: Vec<usize>,
    pub degree: Vec<f64>,
    pub n: Vec<usize>,
    pub alpha: Vec<f64>,
    pub variants: Vec<String>,
    pub repetitions: usize,
    pub seed: u64,
    #[serde(default = "default_threads")]
    pub threads: usize,
    /// Answer queries by separation in the true graph instead of testing
    /// sampled data; `n` and `alpha` are then only record coordinates.
    #[serde(default)]
    pub exact_oracle: bool,
    #[serde(default)]
    pub ordering: Ordering,
    #[serde(default)]
    pub params: ParamRanges,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, empty) in [
            ("p", self.p.is_empty()),
            ("degree", self.degree.is_empty()),
            ("n", self.n.is_empty()),
            ("alpha", self.alpha.is_empty()),
            ("variants", self.variants.is_empty()),
        ] {
            if empty {
                return Err(ConfigError::EmptyList(name));
            }
        }
        if self.repetitions == 0 {
            return Err(ConfigError::NoRepetitions);
        }
        if self.threads == 0 {
            return Err(ConfigError::NoThreads);
        }
        if let Some(&p) = self.p.iter().find(|&&p| p < 2) {
            return Err(ConfigError::Value(format!("p = {p} is below 2")));
        }
        if let Some(a) = self.alpha.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
            return Err(ConfigError::Value(format!("alpha = {a} is outside (0, 1)")));
        }
        self.parsed_variants()?;
        Ok(())
    }

    pub fn parsed_variants(&self) -> Result<Vec<Variant>, ConfigError> {
        self.variants
            .iter()
            .map(|s| s.parse().map_err(|_| ConfigError::Variant(s.clone())))
            .collect()
    }
}

/// One learner run. Metric fields are empty when `error` is set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema: String,
    pub p: usize,
    pub degree: f64,
    pub n: usize,
    pub alpha: f64,
    pub variant: String,
    pub rep: usize,
    /// Seed of the task stream the graph, parameters and data came from.
    pub seed: u64,
    pub true_edges: usize,
    pub tp: Option<usize>,
    pub fp: Option<usize>,
    pub tn: Option<usize>,
    #[serde(rename = "fn")]
    pub fn_: Option<usize>,
    pub tpr: Option<f64>,
    pub fpr: Option<f64>,
    pub tdr: Option<f64>,
    pub tdr_defined: Option<bool>,
    pub acc: Option<f64>,
    pub shd: Option<usize>,
    pub ambiguous: Option<usize>,
    pub ci_tests: Option<u64>,
    pub error: String,
    pub runtime_ms: f64,
}

impl RunRecord {
    pub fn is_ok(&self) -> bool {
        self.error.is_empty()
    }
}

struct Task {
    p_idx: usize,
    d_idx: usize,
    rep: usize,
}

fn ordering_for(kind: Ordering, p: usize, rng: &mut ChaCha8Rng) -> VariableOrdering {
    match kind {
        Ordering::Natural => VariableOrdering::natural(p),
        Ordering::Reversed => VariableOrdering::natural(p).reversed(),
        Ordering::Shuffled => {
            let mut ids: Vec<VertexId> = (0..p).map(VertexId).collect();
            ids.shuffle(rng);
            VariableOrdering::new(ids).expect("a permutation")
        }
    }
}

struct Cell<'a> {
    cfg: &'a ExperimentConfig,
    task: &'a Task,
    seed: u64,
    truth: Option<&'a ChainGraph>,
    truth_pattern: Option<&'a Pattern>,
}

impl Cell<'_> {
    fn record(&self, n_idx: usize, a_idx: usize, variant: &str) -> RunRecord {
        RunRecord {
            schema: SCHEMA.to_string(),
            p: self.cfg.p[self.task.p_idx],
            degree: self.cfg.degree[self.task.d_idx],
            n: self.cfg.n[n_idx],
            alpha: self.cfg.alpha[a_idx],
            variant: variant.to_string(),
            rep: self.task.rep,
            seed: self.seed,
            true_edges: self.truth.map_or(0, |g| g.edge_count()),
            tp: None,
            fp: None,
            tn: None,
            fn_: None,
            tpr: None,
            fpr: None,
            tdr: None,
            tdr_defined: None,
            acc: None,
            shd: None,
            ambiguous: None,
            ci_tests: None,
            error: String::new(),
            runtime_ms: 0.0,
        }
    }

    fn failed(&self, n_idx: usize, a_idx: usize, variants: &[Variant], message: &str) -> Vec<RunRecord> {
        variants
            .iter()
            .map(|v| {
                let mut r = self.record(n_idx, a_idx, &v.to_string());
                r.error = message.to_string();
                r
            })
            .collect()
    }

    fn run(&self, oracle: &dyn CiOracle, order: &VariableOrdering, n_idx: usize, a_idx: usize, variant: Variant) -> RunRecord {
        let (truth, truth_pattern) = (self.truth.expect("graph"), self.truth_pattern.expect("pattern"));
        let mut rec = self.record(n_idx, a_idx, &variant.to_string());
        let start = Instant::now();
        let out = learn_pattern(oracle, order, variant, LearnOptions::default());
        rec.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        match out {
            Ok(out) => {
                let s = score_skeleton(&out.pattern.graph, truth).expect("same vertex set");
                rec.tp = Some(s.tp);
                rec.fp = Some(s.fp);
                rec.tn = Some(s.tn);
                rec.fn_ = Some(s.fn_);
                rec.tpr = Some(s.tpr);
                rec.fpr = Some(s.fpr);
                rec.tdr = Some(s.tdr);
                rec.tdr_defined = Some(s.tdr_defined);
                rec.acc = Some(s.acc);
                rec.shd = Some(shd(&out.pattern.graph, &truth_pattern.graph).expect("same vertex set"));
                rec.ambiguous = Some(out.pattern.ambiguous_edges.len());
                rec.ci_tests = Some(out.ci_queries);
            }
            Err(e) => rec.error = e.to_string(),
        }
        rec
    }
}

fn run_task(cfg: &ExperimentConfig, variants: &[Variant], task: &Task, index: u64) -> Vec<RunRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let seed = rng.random::<u64>();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = cfg.p[task.p_idx];
    let mut cell = Cell {
        cfg,
        task,
        seed,
        truth: None,
        truth_pattern: None,
    };
    let truth = match random_chain_graph_with(p, cfg.degree[task.d_idx], &mut rng) {
        Ok(g) => g,
        Err(e) => {
            let msg = e.to_string();
            return (0..cfg.n.len())
                .flat_map(|ni| (0..cfg.alpha.len()).map(move |ai| (ni, ai)))
                .flat_map(|(ni, ai)| cell.failed(ni, ai, variants, &msg))
                .collect();
        }
    };
    let truth_pattern = true_pattern(&truth);
    let params = random_params_with::<f64, _>(&truth, &cfg.params, &mut rng);
    // separate stream so the ordering never shifts the sampled data
    let mut order_rng = ChaCha8Rng::seed_from_u64(seed);
    order_rng.set_stream(1);
    let order = ordering_for(cfg.ordering, p, &mut order_rng);
    cell.truth = Some(&truth);
    cell.truth_pattern = Some(&truth_pattern);

    let mut out = Vec::new();
    for n_idx in 0..cfg.n.len() {
        let data: Result<GaussianData<f64>, String> = if cfg.exact_oracle {
            Err(String::new())
        } else {
            sample_gaussian_with(&truth, &params, cfg.n[n_idx], &mut rng).map_err(|e| e.to_string())
        };
        for a_idx in 0..cfg.alpha.len() {
            if cfg.exact_oracle {
                let oracle = GraphOracle::new(truth.clone());
                out.extend(variants.iter().map(|&v| cell.run(&oracle, &order, n_idx, a_idx, v)));
                continue;
            }
            let test = match &data {
                Ok(d) => GaussCiTest::new(d.clone(), cfg.alpha[a_idx]).map_err(|e| e.to_string()),
                Err(e) => Err(e.clone()),
            };
            match test {
                Ok(test) => out.extend(variants.iter().map(|&v| cell.run(&test, &order, n_idx, a_idx, v))),
                Err(msg) => out.extend(cell.failed(n_idx, a_idx, variants, &msg)),
            }
        }
    }
    out
}

/// Runs the whole grid on a pool of `cfg.threads` workers and returns the
/// records in grid order: `p`, `degree`, repetition, `n`, `alpha`, then
/// variant, each in config order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>, ConfigError> {
    use rayon::prelude::*;

    cfg.validate()?;
    let variants = cfg.parsed_variants()?;
    let mut tasks = Vec::new();
    for p_idx in 0..cfg.p.len() {
        for d_idx in 0..cfg.degree.len() {
            for rep in 0..cfg.repetitions {
                tasks.push(Task { p_idx, d_idx, rep });
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| ConfigError::Value(e.to_string()))?;
    let mut chunks: Vec<(usize, Vec<RunRecord>)> = pool.install(|| {
        tasks
            .par_iter()
            .enumerate()
            .map(|(i, t)| (i, run_task(cfg, &variants, t, i as u64)))
            .collect()
    });
    chunks.sort_by_key(|(i, _)| *i);
    Ok(chunks.into_iter().flat_map(|(_, r)| r).collect())
}

/// Writes records as CSV with a header row. `runtime_ms` is the last column
/// and is left out when `with_runtime` is false, which makes the output
/// byte-for-byte reproducible.
pub fn write_records<W: Write>(records: &[RunRecord], writer: W, with_runtime: bool) -> csv::Result<()> {
    if with_runtime {
        let mut w = csv::Writer::from_writer(writer);
        for r in records {
            w.serialize(r)?;
        }
        return w.flush().map_err(Into::into);
    }
    let mut full = csv::Writer::from_writer(Vec::new());
    for r in records {
        full.serialize(r)?;
    }
    let full = full.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(full.as_slice());
    let mut w = csv::Writer::from_writer(writer);
    for row in rdr.records() {
        let row = row?;
        w.write_record(row.iter().take(row.len() - 1))?;
    }
    w.flush().map_err(Into::into)
}

pub fn read_records<R: std::io::Read>(reader: R) -> csv::Result<Vec<RunRecord>> {
    csv::Reader::from_reader(reader).deserialize().collect()
}
