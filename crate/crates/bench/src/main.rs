use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use lwfcg::graph::{parse_graph, parse_labels, write_graph, write_labels};
use lwfcg::skeleton::{trace_table, write_trace_csv, write_trace_table_csv};
use lwfcg::synth::{random_chain_graph, random_params, sample_gaussian, GaussianParams};
use lwfcg::{
    learn_pattern, learn_skeleton, true_pattern, ChainGraph, GaussCiTest, GaussianData, GenSpec, LearnOptions,
    MixedGraph, SkeletonMode, SkeletonOptions, VariableOrdering, Variant, VertexId,
};
use lwfcg_bench::{run_experiment, score_skeleton, shd, write_records, ExperimentConfig};
use serde_json::json;
use sha2::{Digest, Sha256};

/// Structure learning for LWF chain graphs.
#[derive(Parser)]
#[command(name = "lwfcg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a pattern from a CSV dataset.
    Learn(LearnArgs),
    /// Draw a random chain graph and a Gaussian dataset from it.
    Simulate(SimulateArgs),
    /// Run an experiment grid from a TOML config.
    Bench(BenchArgs),
    /// Compare a learned graph with a reference and print metrics as JSON.
    Score(ScoreArgs),
    /// Skeleton trace of a built-in fixture under a given ordering.
    Trace(TraceArgs),
}

#[derive(clap::Args)]
struct LearnArgs {
    /// CSV file, one column per variable; an optional header row names them.
    #[arg(long)]
    data: PathBuf,
    /// Significance level of the Fisher-z test.
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    /// `<original|stable>-<plain|conservative|majority:A:B>`.
    #[arg(long, default_value = "stable-plain")]
    variant: Variant,
    /// `natural`, `reversed`, or a comma-separated list of column names or
    /// indices.
    #[arg(long, default_value = "natural")]
    order: String,
    /// Output prefix; writes `<out>.graph`, `<out>.labels` when the data has
    /// a header, and `<out>.arrows` listing labeled and ambiguous edges.
    #[arg(long)]
    out: PathBuf,
    /// Evaluate each stable-mode level on all cores.
    #[arg(long)]
    parallel: bool,
    /// Also write the skeleton trace CSV here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SimulateArgs {
    #[arg(long)]
    p: usize,
    /// Expected vertex degree N.
    #[arg(long, default_value_t = 2.0)]
    degree: f64,
    /// Sample size.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for `graph.txt`, `data.csv`, `params.json`, `manifest.json`.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(clap::Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    /// Results CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config's thread count.
    #[arg(long)]
    threads: Option<usize>,
    /// Leave out the runtime_ms column.
    #[arg(long)]
    no_runtime: bool,
}

#[derive(clap::Args)]
struct ScoreArgs {
    #[arg(long)]
    learned: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    /// Labels file for both graphs when they use names instead of indices.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Treat `--truth` as a chain graph and compare against its pattern.
    #[arg(long)]
    truth_is_graph: bool,
}

#[derive(Copy, Clone, ValueEnum)]
enum Fixture {
    Example1,
    Example2,
    Figure4,
}

#[derive(clap::Args)]
struct TraceArgs {
    #[arg(long, value_enum)]
    fixture: Fixture,
    /// Vertex labels in order, e.g. `deacb`; defaults to the fixture's
    /// first ordering.
    #[arg(long)]
    order: Option<String>,
    #[arg(long, value_enum, default_value = "original")]
    mode: Mode,
    /// Only rows at this level for which the fixture claims a separating
    /// set, laid out as a walkthrough table.
    #[arg(long)]
    level: Option<usize>,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, ValueEnum)]
enum Mode {
    Original,
    Stable,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn parse_order(spec: &str, p: usize, names: Option<&[String]>) -> Result<VariableOrdering> {
    match spec {
        "natural" => return Ok(VariableOrdering::natural(p)),
        "reversed" => return Ok(VariableOrdering::natural(p).reversed()),
        _ => {}
    }
    let ids = spec
        .split(',')
        .map(|t| {
            let t = t.trim();
            names
                .and_then(|ns| ns.iter().position(|n| n == t))
                .or_else(|| t.parse::<usize>().ok())
                .map(VertexId)
                .with_context(|| format!("unknown variable {t:?} in ordering"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VariableOrdering::new(ids)?)
}

fn learn(args: LearnArgs) -> Result<()> {
    let file = File::open(&args.data).with_context(|| format!("opening {}", args.data.display()))?;
    let data = GaussianData::<f64>::read_csv(file)?;
    let names = data.names().map(<[String]>::to_vec);
    let order = parse_order(&args.order, data.p(), names.as_deref())?;
    let test = GaussCiTest::new(data, args.alpha)?;
    let opts = LearnOptions {
        trace: args.trace.is_some(),
        parallel: args.parallel,
    };
    let out = learn_pattern(&test, &order, args.variant, opts)?;
    let with_ext = |ext: &str| {
        let mut s = args.out.clone().into_os_string();
        s.push(ext);
        PathBuf::from(s)
    };
    let mut graph = out.pattern.graph.clone();
    fs::write(with_ext(".graph"), write_graph(&graph))?;
    if let Some(names) = names {
        graph = graph.with_labels(names)?;
        fs::write(with_ext(".labels"), write_labels(&graph))?;
    }
    fs::write(with_ext(".arrows"), out.pattern.sidecar())?;
    if let Some(path) = &args.trace {
        write_trace_csv(&out.skeleton.trace, &graph, output(Some(path))?)?;
    }
    eprintln!(
        "{} edges, {} ambiguous, {} tests",
        out.pattern.graph.edge_count(),
        out.pattern.ambiguous_edges.len(),
        out.ci_queries
    );
    Ok(())
}

fn params_json(params: &GaussianParams<f64>) -> serde_json::Value {
    json!({
        "weights": params.weights.iter().map(|((u, v), w)| json!([u.0, v.0, w])).collect::<Vec<_>>(),
        "precisions": params.precisions,
    })
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let spec = GenSpec {
        p: args.p,
        expected_degree: args.degree,
        seed: args.seed,
    };
    let g = random_chain_graph(&spec)?;
    let params: GaussianParams<f64> = random_params(&g, args.seed);
    let data = sample_gaussian(&g, &params, args.n, args.seed)?;
    fs::create_dir_all(&args.out_dir)?;
    fs::write(args.out_dir.join("graph.txt"), write_graph(&g))?;
    data.write_csv(File::create(args.out_dir.join("data.csv"))?)?;
    let params_text = serde_json::to_string_pretty(&params_json(&params))?;
    fs::write(args.out_dir.join("params.json"), &params_text)?;
    let manifest = json!({
        "generator": concat!("lwfcg ", env!("CARGO_PKG_VERSION")),
        "spec": { "p": spec.p, "expected_degree": spec.expected_degree, "seed": spec.seed },
        "n": args.n,
        "params_sha256": hex::encode(Sha256::digest(params_text.as_bytes())),
    });
    fs::write(args.out_dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(t) = args.threads {
        cfg.threads = t;
    }
    let records = run_experiment(&cfg)?;
    let failed = records.iter().filter(|r| !r.is_ok()).count();
    write_records(&records, output(args.out.as_deref())?, !args.no_runtime)?;
    eprintln!("{} runs, {failed} failed", records.len());
    Ok(())
}

fn read_graph(path: &Path, labels: Option<&[String]>) -> Result<MixedGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_graph(&text, labels).with_context(|| format!("parsing {}", path.display()))
}

fn score(args: ScoreArgs) -> Result<()> {
    let labels = match &args.labels {
        Some(p) => Some(parse_labels(&fs::read_to_string(p)?)),
        None => None,
    };
    let learned = read_graph(&args.learned, labels.as_deref())?;
    let mut truth = read_graph(&args.truth, labels.as_deref())?;
    if args.truth_is_graph {
        truth = true_pattern(&ChainGraph::new(truth)?).graph;
    }
    let s = score_skeleton(&learned, &truth)?;
    let mut v = serde_json::to_value(&s)?;
    v["shd"] = json!(shd(&learned, &truth)?);
    println!("{}", serde_json::to_string_pretty(&v)?);
    Ok(())
}

fn trace(args: TraceArgs) -> Result<()> {
    let fx = match args.fixture {
        Fixture::Example1 => lwfcg::fixtures::example1(),
        Fixture::Example2 => lwfcg::fixtures::example2(),
        Fixture::Figure4 => lwfcg::fixtures::figure4(),
    };
    let order = match &args.order {
        Some(s) => {
            if s.chars().count() != fx.truth.p() || !s.chars().all(|c| fx.truth.vertex_by_label(&c.to_string()).is_some()) {
                bail!("ordering must list each of the {} vertex labels once", fx.truth.p());
            }
            VariableOrdering::new(fx.ids(s))?
        }
        None => fx.orders[0].clone(),
    };
    let mode = match args.mode {
        Mode::Original => SkeletonMode::Original,
        Mode::Stable => SkeletonMode::Stable,
    };
    let res = learn_skeleton(&fx.oracle, &order, &SkeletonOptions::new(mode).traced())?;
    let out = output(args.out.as_deref())?;
    match args.level {
        Some(level) => write_trace_table_csv(&trace_table(&res.trace, level, &fx.claims), &fx.truth, out)?,
        None => write_trace_csv(&res.trace, &fx.truth, out)?,
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Learn(a) => learn(a),
        Command::Simulate(a) => simulate(a),
        Command::Bench(a) => bench(a),
        Command::Score(a) => score(a),
        Command::Trace(a) => trace(a),
    }
}
