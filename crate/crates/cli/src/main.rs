mod config;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use scalefree::dataset::{self, Dataset, InfeasiblePolicy, SubtypeCorpusSpec, SubtypeLabel};
use scalefree::generator::{self, ExponentTarget, GeneratorParams};
use scalefree::graph::{degree_statistics, estimate_tail_exponent, AdjacencyMatrix};
use scalefree::mlp::{self, MlpModel, TrainConfig};
use scalefree::pipeline::{
    self, CandidateMode, CandidateSpace, ModelSource, PipelineConfig, PipelineOutcome, StageSeeds,
};
use scalefree::rng::derive_seed;

use config::{ModeName, RunConfig};

const OUT_ENV: &str = "SCALEFREE_OUT";

/// Directed scale-free network generation and missing-link prediction.
///
/// Exit status: 0 on success, 1 on a user or configuration error, 2 when a
/// post-run audit finds an internal invariant violated.
#[derive(Parser)]
#[command(name = "scalefree", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grow one network and write it as a binary matrix and an edge list.
    Gen(GenArgs),
    /// Build a training corpus.
    #[command(subcommand)]
    Dataset(DatasetCommand),
    /// Train a network on a corpus and write a checkpoint.
    Train(TrainArgs),
    /// Predict the exponent subtype of a network with a trained classifier.
    Classify(ClassifyArgs),
    /// Run the full pipeline: pad, classify, train the discriminator, filter completions.
    ///
    /// Candidates are the zero entries of the padded matrix (or only those in
    /// the padded nodes' rows and columns with --space missing-nodes).
    /// Exhaustive mode walks all 2^z completions and refuses more than the
    /// ceiling; sampled mode draws distinct completions by seeded rejection
    /// against the set already drawn.
    Predict(PredictArgs),
}

#[derive(Args)]
struct OutDir {
    /// Output directory.
    #[arg(long, env = OUT_ENV)]
    out_dir: Option<PathBuf>,
}

impl OutDir {
    fn resolve(&self) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    gamma: f64,
    /// Defaults to 1 - alpha - gamma.
    #[arg(long)]
    beta: Option<f64>,
    /// Target in-degree exponent; the offset is derived from it.
    #[arg(long, requires = "x_out", conflicts_with_all = ["delta_in", "delta_out"])]
    x_in: Option<f64>,
    #[arg(long, requires = "x_in")]
    x_out: Option<f64>,
    #[arg(long, requires = "delta_out")]
    delta_in: Option<f64>,
    #[arg(long, requires = "delta_in")]
    delta_out: Option<f64>,
    #[arg(long)]
    nodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Smallest degree counted in the exponent estimate.
    #[arg(long, default_value_t = scalefree::graph::DEFAULT_X_MIN)]
    x_min: usize,
    /// File stem for the outputs.
    #[arg(long, default_value = "graph")]
    name: String,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Subcommand)]
enum DatasetCommand {
    /// Subtype corpus: per_group samples for each exponent cell, labelled by group.
    Ann1(Ann1DatasetArgs),
    /// Discriminator corpus: valid samples of one subtype against other subtypes.
    Ann2(Ann2DatasetArgs),
}

#[derive(Args)]
struct Ann1DatasetArgs {
    #[arg(long)]
    side: usize,
    /// Defaults to the matrix side.
    #[arg(long)]
    per_group: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// What to do with cells no parameter triple can generate.
    #[arg(long, value_enum, default_value_t = Policy::Skip)]
    infeasible: Policy,
    /// Comma-separated X_in:X_out cells, e.g. 2.2:2.2,2.8:3.0. Default: all 100.
    #[arg(long, value_parser = parse_subtype, value_delimiter = ',')]
    subtypes: Option<Vec<SubtypeLabel>>,
    #[arg(long, default_value = "ann1_dataset")]
    name: String,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args)]
struct Ann2DatasetArgs {
    #[arg(long)]
    side: usize,
    /// Valid subtype.
    #[arg(long)]
    x_in: f64,
    #[arg(long)]
    x_out: f64,
    /// Defaults to 50 x side.
    #[arg(long)]
    per_class: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Invalid pool as X_in:X_out cells. Default: all 100 (infeasible ones are skipped).
    #[arg(long, value_parser = parse_subtype, value_delimiter = ',')]
    subtypes: Option<Vec<SubtypeLabel>>,
    #[arg(long, default_value = "ann2_dataset")]
    name: String,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Fail,
    Skip,
}

impl From<Policy> for InfeasiblePolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Fail => InfeasiblePolicy::Fail,
            Policy::Skip => InfeasiblePolicy::Skip,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Net {
    Ann1,
    Ann2,
}

impl fmt::Display for Net {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Net::Ann1 => "ann1",
            Net::Ann2 => "ann2",
        })
    }
}

#[derive(Args)]
struct TrainArgs {
    #[arg(value_enum)]
    net: Net,
    #[arg(long)]
    dataset: PathBuf,
    /// TOML file with training settings; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    momentum: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    validation_fraction: Option<f64>,
    /// Shuffling seed; weight initialisation uses a seed derived from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Checkpoint path. Default: <out-dir>/<net>.model.
    #[arg(long)]
    model: Option<PathBuf>,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    model: PathBuf,
    /// Binary matrix (.bin) or edge list.
    #[arg(long)]
    input: PathBuf,
    /// Node count, required for edge lists.
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long, default_value_t = 5)]
    top: usize,
}

#[derive(Args)]
struct PredictArgs {
    /// TOML run configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    nodes: Option<usize>,
    /// Missing nodes to pad.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long, value_enum)]
    mode: Option<ModeName>,
    #[arg(long)]
    max_candidates: Option<usize>,
    #[arg(long, value_enum)]
    space: Option<SpaceName>,
    #[arg(long)]
    exhaustive_ceiling: Option<u64>,
    /// Load the subtype classifier instead of training it.
    #[arg(long)]
    ann1_model: Option<PathBuf>,
    /// Load the discriminator instead of training it.
    #[arg(long)]
    ann2_model: Option<PathBuf>,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceName {
    AllZeros,
    MissingNodes,
}

/// A post-run audit found the pipeline's output breaking its own contract.
#[derive(Debug)]
struct InvariantViolation(String);

impl fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invariant violated: {}", self.0)
    }
}

impl std::error::Error for InvariantViolation {}

fn parse_subtype(cell: &str) -> Result<SubtypeLabel, String> {
    let (a, b) = cell
        .trim()
        .split_once(':')
        .ok_or_else(|| format!("{cell:?}: expected X_in:X_out"))?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    SubtypeLabel::new(parse(a)?, parse(b)?).map_err(|e| e.to_string())
}

fn echo(command: &str, value: serde_json::Value) {
    println!("config {command} {value}");
}

fn read_matrix(path: &Path, nodes: Option<usize>) -> Result<AdjacencyMatrix> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "bin") {
        let m = AdjacencyMatrix::from_bytes(&bytes).with_context(|| format!("decoding {}", path.display()))?;
        if let Some(n) = nodes {
            ensure!(n == m.size(), "{} holds {} nodes, --nodes says {n}", path.display(), m.size());
        }
        return Ok(m);
    }
    let Some(n) = nodes else {
        bail!("edge list {} needs an explicit node count", path.display());
    };
    let text = String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    AdjacencyMatrix::from_edge_list(n, &text).with_context(|| format!("parsing {}", path.display()))
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let beta = args.beta.unwrap_or(1.0 - args.alpha - args.gamma);
    let params = match (args.x_in, args.x_out, args.delta_in, args.delta_out) {
        (Some(x_in), Some(x_out), None, None) => {
            GeneratorParams::for_target(args.alpha, beta, args.gamma, ExponentTarget { x_in, x_out })?
        }
        (None, None, Some(di), Some(dout)) => GeneratorParams::new(args.alpha, beta, args.gamma, di, dout)?,
        _ => bail!("give either --x-in/--x-out or --delta-in/--delta-out"),
    };
    ensure!(args.nodes > 0, "--nodes must be positive");
    let out_dir = args.out.resolve();
    echo(
        "gen",
        json!({
            "params": params,
            "x_in": generator::x_in_from_delta(&params)?,
            "x_out": generator::x_out_from_delta(&params)?,
            "nodes": args.nodes,
            "seed": args.seed,
            "x_min": args.x_min,
            "out_dir": out_dir,
        }),
    );

    let g = generator::generate(&params, args.nodes, args.seed)?;
    let m = g.to_adjacency();
    let bin = out_dir.join(format!("{}.bin", args.name));
    let edges = out_dir.join(format!("{}.edges", args.name));
    write_file(&bin, m.to_bytes())?;
    write_file(&edges, format!("# nodes {}\n{}", m.size(), m.to_edge_list()))?;

    let stats = degree_statistics(&g);
    let est = |h| match estimate_tail_exponent(h, args.x_min) {
        Ok(x) => format!("{x:.4}"),
        Err(e) => format!("n/a ({e})"),
    };
    println!(
        "stats nodes={} edges={} distinct_links={} x_in_hat={} x_out_hat={}",
        g.node_count(),
        g.edge_count(),
        m.count_ones(),
        est(&stats.in_histogram),
        est(&stats.out_histogram),
    );
    println!("wrote {} {}", bin.display(), edges.display());
    Ok(())
}

fn save_corpus(ds: &Dataset, out_dir: &Path, name: &str) -> Result<()> {
    let bin = out_dir.join(format!("{name}.bin"));
    let csv = out_dir.join(format!("{name}.csv"));
    write_file(&bin, dataset::encode_dataset(ds))?;
    write_file(&csv, ds.manifest())?;
    println!(
        "dataset samples={} side={} arity={}",
        ds.len(),
        ds.matrix_side(),
        ds.label_arity()
    );
    println!("wrote {} {}", bin.display(), csv.display());
    Ok(())
}

fn labels_json(labels: &[SubtypeLabel]) -> serde_json::Value {
    labels.iter().map(|l| json!([l.x_in(), l.x_out()])).collect()
}

fn cmd_dataset(cmd: DatasetCommand) -> Result<()> {
    match cmd {
        DatasetCommand::Ann1(a) => {
            let spec = SubtypeCorpusSpec {
                side: a.side,
                per_group: a.per_group.unwrap_or(a.side),
                seed: a.seed,
                subtypes: a.subtypes.unwrap_or_else(dataset::all_subtypes),
                infeasible: a.infeasible.into(),
            };
            let out_dir = a.out.resolve();
            echo(
                "dataset.ann1",
                json!({
                    "side": spec.side,
                    "per_group": spec.per_group,
                    "seed": spec.seed,
                    "infeasible": spec.infeasible,
                    "subtypes": labels_json(&spec.subtypes),
                    "out_dir": out_dir,
                }),
            );
            save_corpus(&dataset::build_subtype_dataset(&spec)?, &out_dir, &a.name)
        }
        DatasetCommand::Ann2(a) => {
            let valid = SubtypeLabel::new(a.x_in, a.x_out)?;
            let pool = a.subtypes.unwrap_or_else(dataset::all_subtypes);
            let per_class = a.per_class.unwrap_or(50 * a.side);
            let out_dir = a.out.resolve();
            echo(
                "dataset.ann2",
                json!({
                    "side": a.side,
                    "valid": [valid.x_in(), valid.x_out()],
                    "per_class": per_class,
                    "seed": a.seed,
                    "invalid_pool": labels_json(&pool),
                    "out_dir": out_dir,
                }),
            );
            let ds = dataset::build_discriminator_dataset(a.side, valid, &pool, per_class, a.seed)?;
            save_corpus(&ds, &out_dir, &a.name)
        }
    }
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            toml::from_str::<TrainConfig>(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => TrainConfig::default(),
    };
    if let Some(v) = a.epochs {
        cfg.epochs = v;
    }
    if let Some(v) = a.learning_rate {
        cfg.learning_rate = v;
    }
    if let Some(v) = a.momentum {
        cfg.momentum = v;
    }
    if let Some(v) = a.batch_size {
        cfg.batch_size = v;
    }
    if let Some(v) = a.validation_fraction {
        cfg.validation_fraction = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    let init_seed = derive_seed(cfg.seed, 0);
    let model_path = a.model.clone().unwrap_or_else(|| a.out.resolve().join(format!("{}.model", a.net)));
    echo(
        "train",
        json!({
            "net": a.net.to_string(),
            "dataset": a.dataset,
            "train": cfg,
            "init_seed": init_seed,
            "model": model_path,
        }),
    );

    let ds = dataset::load_dataset(&a.dataset).with_context(|| format!("loading {}", a.dataset.display()))?;
    let (expected, mut model) = match a.net {
        Net::Ann1 => (dataset::GROUP_COUNT as u16, mlp::build_ann1(ds.matrix_side(), init_seed)),
        Net::Ann2 => (dataset::BINARY_ARITY, mlp::build_ann2(ds.matrix_side(), init_seed)),
    };
    ensure!(
        ds.label_arity() == expected,
        "{} expects a corpus with {expected} labels, {} has {}",
        a.net,
        a.dataset.display(),
        ds.label_arity()
    );
    let (x, y) = ds.to_arrays();
    let history = mlp::train(&mut model, x.view(), &y, &cfg)?;
    for s in &history {
        println!(
            "epoch {} train_loss={:.6} validation_loss={} validation_accuracy={}",
            s.epoch,
            s.train_loss,
            s.validation_loss.map_or("n/a".into(), |v| format!("{v:.6}")),
            s.validation_accuracy.map_or("n/a".into(), |v| format!("{v:.4}")),
        );
    }
    let mut buf = Vec::new();
    mlp::write_model(&model, &mut buf)?;
    write_file(&model_path, buf)?;
    println!("wrote {}", model_path.display());
    Ok(())
}

fn cmd_classify(a: ClassifyArgs) -> Result<()> {
    echo("classify", json!({ "model": a.model, "input": a.input, "nodes": a.nodes }));
    let model: MlpModel = mlp::load_model(&a.model).with_context(|| format!("loading {}", a.model.display()))?;
    let g = read_matrix(&a.input, a.nodes)?;
    let p = pipeline::predict_subtype(&model, &g).context("classify")?;
    println!(
        "subtype group={} x_in={:.1} x_out={:.1} probability={:.6} feasible={}",
        p.group.index(),
        p.label.x_in(),
        p.label.x_out(),
        p.probability,
        p.label.is_feasible()
    );
    let mut ranked: Vec<(usize, f64)> = p.distribution.iter().copied().enumerate().collect();
    ranked.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
    for (group, prob) in ranked.into_iter().take(a.top) {
        let l = dataset::label_of(dataset::GroupId::new(group)?);
        println!("rank group={group} x_in={:.1} x_out={:.1} probability={prob:.6}", l.x_in(), l.x_out());
    }
    Ok(())
}

fn resolve_run(a: &PredictArgs) -> Result<RunConfig> {
    let mut cfg = match &a.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if a.input.is_some() {
        cfg.input = a.input.clone();
    }
    if a.nodes.is_some() {
        cfg.nodes = a.nodes;
    }
    if let Some(v) = a.m {
        cfg.m = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(v) = a.threshold {
        cfg.threshold = v;
    }
    if let Some(v) = a.mode {
        cfg.candidates.mode = v;
    }
    if a.max_candidates.is_some() {
        cfg.candidates.max_candidates = a.max_candidates;
    }
    if let Some(v) = a.space {
        cfg.candidates.space = match v {
            SpaceName::AllZeros => CandidateSpace::AllZeros,
            SpaceName::MissingNodes => CandidateSpace::MissingNodes,
        };
    }
    if let Some(v) = a.exhaustive_ceiling {
        cfg.candidates.exhaustive_ceiling = v;
    }
    if let Some(p) = &a.ann1_model {
        cfg.ann1 = ModelSource::Load(p.clone());
    }
    if let Some(p) = &a.ann2_model {
        cfg.ann2 = ModelSource::Load(p.clone());
    }
    if let Some(d) = &a.out.out_dir {
        cfg.output_dir = Some(d.clone());
    }
    cfg.output_dir.get_or_insert_with(|| PathBuf::from("."));
    Ok(cfg)
}

/// Re-checks the outcome against the contract without trusting the filter.
fn audit(outcome: &PipelineOutcome, cfg: &PipelineConfig) -> Result<(), InvariantViolation> {
    let fail = |msg: String| Err(InvariantViolation(msg));
    let g_new = &outcome.g_new;
    let report = &outcome.report;
    for (i, a) in report.accepted.iter().enumerate() {
        if !a.matrix.contains(g_new) {
            return fail(format!("candidate {i} drops a link of G_new"));
        }
        if a.matrix == *g_new {
            return fail(format!("candidate {i} equals G_new"));
        }
        let p = outcome
            .ann2
            .forward(&a.matrix.to_input())
            .map_err(|e| InvariantViolation(e.to_string()))?[dataset::VALID_CLASS as usize];
        if p.is_nan() || p <= cfg.threshold || (p - a.probability).abs() > 1e-12 {
            return fail(format!("candidate {i} rescored at {p}, reported {}", a.probability));
        }
    }
    if report.accepted.windows(2).any(|w| w[0].probability < w[1].probability) {
        return fail("accepted candidates are not sorted by probability".into());
    }
    let scored = (report.accepted.len() + report.rejected_count) as u128;
    let space = 1u128.checked_shl(report.zero_positions as u32).unwrap_or(u128::MAX);
    let expected = match report.mode {
        CandidateMode::Exhaustive => space,
        CandidateMode::Sampled { max_candidates } => space.min(max_candidates as u128),
    };
    if scored != expected {
        return fail(format!("scored {scored} candidates, expected {expected}"));
    }
    Ok(())
}

fn cmd_predict(a: PredictArgs) -> Result<()> {
    let run = resolve_run(&a)?;
    let pipeline_cfg = run.to_pipeline()?;
    let Some(input) = run.input.clone() else {
        bail!("no input network: pass --input or set `input` in the config");
    };
    let out_dir = run.output_dir.clone().expect("resolved above");
    let seeds = StageSeeds::from_master(run.seed);
    let resolved = json!({ "run": run, "derived_seeds": seeds });
    echo("predict", resolved.clone());

    let g = read_matrix(&input, run.nodes)?;
    let outcome = pipeline::run_pipeline(&g, run.m, &pipeline_cfg).context("predict")?;
    audit(&outcome, &pipeline_cfg)?;

    let report = &outcome.report;
    let pred = &outcome.prediction;
    let summary = json!({
        "input_nodes": g.size(),
        "m": run.m,
        "matrix_side": outcome.g_new.size(),
        "subtype": {
            "group": pred.group.index(),
            "x_in": pred.label.x_in(),
            "x_out": pred.label.x_out(),
            "probability": pred.probability,
        },
        "ann1": outcome.ann1_origin,
        "ann2": outcome.ann2_origin,
        "zero_positions": report.zero_positions,
        "accepted": report.accepted.len(),
        "rejected": report.rejected_count,
        "threshold": report.threshold,
        "mode": report.mode,
        "missing_nodes": report.missing_nodes,
        "candidates": report.accepted.iter().map(|c| json!({
            "probability": c.probability,
            "added_links": c.added_links(&outcome.g_new),
            "recovered": c.recovered(&report.missing_nodes),
        })).collect::<Vec<_>>(),
        // Names relative to the output directory, so runs elsewhere compare byte for byte.
        "artifacts": outcome
            .artifacts
            .iter()
            .map(|(k, p)| (k.clone(), json!(p.file_name().map(|n| n.to_string_lossy()))))
            .collect::<serde_json::Map<_, _>>(),
    });
    write_file(&out_dir.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    write_file(&out_dir.join("resolved_config.json"), serde_json::to_string_pretty(&resolved)? + "\n")?;

    println!(
        "subtype group={} x_in={:.1} x_out={:.1} probability={:.6}",
        pred.group.index(),
        pred.label.x_in(),
        pred.label.x_out(),
        pred.probability
    );
    println!(
        "candidates zero_positions={} accepted={} rejected={} audit=ok",
        report.zero_positions,
        report.accepted.len(),
        report.rejected_count
    );
    println!("wrote {}", out_dir.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Dataset(c) => cmd_dataset(c),
        Command::Train(a) => cmd_train(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Predict(a) => cmd_predict(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<InvariantViolation>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
