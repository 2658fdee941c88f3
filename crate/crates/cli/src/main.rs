//! Single entry point wiring the pipeline: generate -> collect -> train ->
//! solve -> evaluate -> inspect-model. Every tunable resolves as defaults <
//! config file < flags, and the resolved configuration is echoed to stderr
//! for provenance.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use sparsebranch_core::bnb::{NodeSelection, SolverConfig};
use sparsebranch_core::branching::RuleSpec;
use sparsebranch_core::evaluate::{
    benchmark, write_records, BenchInstance, MethodSpec, MetricConfig,
};
use sparsebranch_core::features::ExpansionMode;
use sparsebranch_core::generators::{generate_suite, Domain, Manifest, SizePreset};
use sparsebranch_core::learn::{
    common_features, lasso_path, select_model, PathConfig, SparseModel,
};
use sparsebranch_core::mip::load_instance;
use sparsebranch_core::pipeline::{
    assemble, assemble_small, collect, write_tuples, CandidateDataset,
    CollectionConfig, CollectionTarget, Scheme, SplitTargets,
};

/// Errors split by exit code: configuration problems exit 1, runtime
/// failures exit 2.
enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(1),
            CliError::Runtime(_) => ExitCode::from(2),
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Runtime(m) => m,
        }
    }
}

fn config_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

fn runtime_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

#[derive(Parser)]
#[command(
    name = "sparsebranch",
    about = "Branch-and-bound MIP toolkit with sparse learned branching models",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a suite of benchmark instances plus a manifest.
    Generate(GenerateArgs),
    /// Collect strong-branching tuples and candidate datasets.
    Collect(CollectArgs),
    /// Train a sparse model on a candidate dataset.
    Train(TrainArgs),
    /// Solve one instance with a chosen branching rule.
    Solve(SolveArgs),
    /// Benchmark branching methods over an instance suite.
    Evaluate(EvaluateArgs),
    /// Print standardized coefficients and cross-model common terms.
    InspectModel(InspectArgs),
}

fn load_file_cfg<T: for<'de> Deserialize<'de> + Default>(
    path: &Option<PathBuf>,
) -> Result<T, CliError> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", p.display())))?;
            toml::from_str(&text)
                .map_err(|e| CliError::Config(format!("bad config {}: {e}", p.display())))
        }
    }
}

/// flag > file > default.
fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

fn echo_config(label: &str, value: &impl serde::Serialize) {
    eprintln!(
        "[sparsebranch] resolved {label} config: {}",
        serde_json::to_string(value).unwrap_or_else(|_| "<unprintable>".into())
    );
}

// ---------------------------------------------------------------- generate

#[derive(Args)]
struct GenerateArgs {
    /// Problem domain: sc|ca|fl|is.
    #[arg(long)]
    domain: String,
    /// Size preset: tiny|test|small|medium|large.
    #[arg(long)]
    size: Option<String>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Optional TOML config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GenerateFileCfg {
    size: Option<String>,
    count: Option<usize>,
    seed: Option<u64>,
}

fn cmd_generate(args: GenerateArgs) -> Result<(), CliError> {
    let file: GenerateFileCfg = load_file_cfg(&args.config)?;
    let domain = Domain::parse(&args.domain).map_err(config_err)?;
    let size =
        SizePreset::parse(&pick(args.size, file.size, "small".to_string())).map_err(config_err)?;
    let count = pick(args.count, file.count, 20);
    let seed = pick(args.seed, file.seed, 0);
    echo_config(
        "generate",
        &serde_json::json!({
            "domain": domain.code(), "size": size.code(), "count": count,
            "seed": seed, "out": args.out.display().to_string(),
        }),
    );
    let manifest = generate_suite(domain, size, count, seed, &args.out).map_err(runtime_err)?;
    println!(
        "wrote {} {} instances to {} (manifest.json included)",
        manifest.count,
        manifest.domain,
        args.out.display()
    );
    Ok(())
}

// ----------------------------------------------------------------- collect

#[derive(Args)]
struct CollectArgs {
    /// Directory of instance files with a manifest.json.
    #[arg(long)]
    instances: PathBuf,
    /// Output directory for tuples and datasets.
    #[arg(long)]
    out: PathBuf,
    /// Sampling scheme: large|small.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Probability of strong-branching a node.
    #[arg(long)]
    sb_probability: Option<f64>,
    /// Node cap per instance solve.
    #[arg(long)]
    node_cap: Option<u64>,
    /// Candidate rows recorded per instance (0 = unlimited).
    #[arg(long)]
    candidate_cap: Option<usize>,
    /// Candidate-row target for the small scheme.
    #[arg(long)]
    target: Option<usize>,
    /// Apply strong branching at every node.
    #[arg(long)]
    sb_every_node: bool,
    /// Split name for the small scheme (train|valid|test).
    #[arg(long)]
    split: Option<String>,
    /// Large scheme: candidate rows per training set.
    #[arg(long)]
    train_target: Option<usize>,
    /// Large scheme: validation rows.
    #[arg(long)]
    valid_target: Option<usize>,
    /// Large scheme: test rows.
    #[arg(long)]
    test_target: Option<usize>,
    /// Number of independent training sets (varying sampling seed).
    #[arg(long)]
    train_sets: Option<usize>,
    /// Maximum instance draws before settling for a partial pool.
    #[arg(long)]
    budget: Option<usize>,
    /// Per-solve time limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CollectFileCfg {
    scheme: Option<String>,
    seed: Option<u64>,
    sb_probability: Option<f64>,
    node_cap: Option<u64>,
    candidate_cap: Option<usize>,
    target: Option<usize>,
    sb_every_node: Option<bool>,
    split: Option<String>,
    train_target: Option<usize>,
    valid_target: Option<usize>,
    test_target: Option<usize>,
    train_sets: Option<usize>,
    budget: Option<usize>,
    time_limit: Option<f64>,
}

fn load_suite(dir: &Path) -> Result<(Vec<sparsebranch_core::MipInstance>, String), CliError> {
    let manifest = Manifest::load(dir)
        .map_err(|e| CliError::Config(format!("cannot load manifest in {}: {e}", dir.display())))?;
    let mut instances = Vec::with_capacity(manifest.files.len());
    for f in &manifest.files {
        instances.push(load_instance(&dir.join(f)).map_err(runtime_err)?);
    }
    Ok((instances, manifest.domain))
}

fn cmd_collect(args: CollectArgs) -> Result<(), CliError> {
    let file: CollectFileCfg = load_file_cfg(&args.config)?;
    let scheme =
        Scheme::parse(&pick(args.scheme, file.scheme, "small".to_string())).map_err(config_err)?;
    let seed = pick(args.seed, file.seed, 0);
    let sb_probability = pick(args.sb_probability, file.sb_probability, 0.05);
    let node_cap = pick(args.node_cap, file.node_cap, 1000);
    let candidate_cap = pick(args.candidate_cap, file.candidate_cap, 5000);
    let target = pick(args.target, file.target, 25_000);
    let sb_every_node = args.sb_every_node || file.sb_every_node.unwrap_or(false);
    let split = pick(args.split, file.split, "train".to_string());
    let train_target = pick(args.train_target, file.train_target, 3000);
    let valid_target = pick(args.valid_target, file.valid_target, 1000);
    let test_target = pick(args.test_target, file.test_target, 1000);
    let train_sets = pick(args.train_sets, file.train_sets, 1).max(1);
    let budget = pick(args.budget, file.budget, 10_000);
    let time_limit = pick(args.time_limit, file.time_limit, 3600.0);

    let (instances, domain) = load_suite(&args.instances)?;
    std::fs::create_dir_all(&args.out).map_err(runtime_err)?;

    let solver = SolverConfig {
        time_limit,
        ..SolverConfig::default()
    };

    match scheme {
        Scheme::Small => {
            echo_config(
                "collect",
                &serde_json::json!({
                    "scheme": "small", "seed": seed, "sb_probability": sb_probability,
                    "node_cap": node_cap, "candidate_cap": candidate_cap, "target": target,
                    "sb_every_node": sb_every_node, "split": split, "budget": budget,
                }),
            );
            let cfg = CollectionConfig {
                scheme,
                sb_probability,
                node_cap,
                candidate_cap_per_instance: if candidate_cap == 0 {
                    None
                } else {
                    Some(candidate_cap)
                },
                target: CollectionTarget::Candidates(target),
                sb_every_node,
                seed,
                instance_budget: budget,
                ..CollectionConfig::default()
            };
            let out = collect(&instances, &cfg, &solver).map_err(runtime_err)?;
            if !out.target_met {
                eprintln!(
                    "[sparsebranch] warning: instance budget exhausted at {} of {} rows; dataset is partial",
                    out.total_rows(),
                    target
                );
            }
            let tuples_path = args.out.join("tuples.jsonl");
            write_tuples(&tuples_path, &out.tuples, &domain, scheme.code(), seed)
                .map_err(runtime_err)?;
            let ds = assemble_small(&out.tuples, target, &domain, seed, &split);
            let ds_path = args.out.join(format!("{split}.jsonl"));
            ds.write(&ds_path).map_err(runtime_err)?;
            println!(
                "collected {} tuples / {} rows from {} solves -> {} and {}",
                out.tuples.len(),
                ds.len(),
                out.instances_solved,
                tuples_path.display(),
                ds_path.display()
            );
        }
        Scheme::Large => {
            let pool_target = 2 * (train_target + valid_target + test_target);
            echo_config(
                "collect",
                &serde_json::json!({
                    "scheme": "large", "seed": seed, "sb_probability": sb_probability,
                    "node_cap": node_cap, "pool_target": pool_target,
                    "train_target": train_target, "valid_target": valid_target,
                    "test_target": test_target, "train_sets": train_sets, "budget": budget,
                }),
            );
            let cfg = CollectionConfig {
                scheme,
                sb_probability,
                node_cap,
                candidate_cap_per_instance: if candidate_cap == 0 {
                    None
                } else {
                    Some(candidate_cap)
                },
                target: CollectionTarget::Candidates(pool_target),
                sb_every_node,
                seed,
                instance_budget: budget,
                ..CollectionConfig::default()
            };
            let out = collect(&instances, &cfg, &solver).map_err(runtime_err)?;
            let tuples_path = args.out.join("tuples.jsonl");
            write_tuples(&tuples_path, &out.tuples, &domain, scheme.code(), seed)
                .map_err(runtime_err)?;
            let targets = SplitTargets {
                train: train_target,
                valid: valid_target,
                test: test_target,
            };
            for set in 0..train_sets {
                let splits = assemble(&out.tuples, &targets, seed, seed + 1 + set as u64, &domain)
                    .map_err(runtime_err)?;
                if set == 0 {
                    splits
                        .valid
                        .write(&args.out.join("valid.jsonl"))
                        .map_err(runtime_err)?;
                    splits
                        .test
                        .write(&args.out.join("test.jsonl"))
                        .map_err(runtime_err)?;
                }
                let name = if train_sets == 1 {
                    "train.jsonl".to_string()
                } else {
                    format!("train_{set}.jsonl")
                };
                splits
                    .train
                    .write(&args.out.join(name))
                    .map_err(runtime_err)?;
            }
            println!(
                "collected {} tuples / {} rows from {} solves -> {}",
                out.tuples.len(),
                out.total_rows(),
                out.instances_solved,
                args.out.display()
            );
        }
    }
    Ok(())
}

// ------------------------------------------------------------------- train

#[derive(Args)]
struct TrainArgs {
    /// Training dataset (candidate rows, JSON lines).
    #[arg(long)]
    data: PathBuf,
    /// Validation dataset used for model selection.
    #[arg(long)]
    valid: PathBuf,
    /// Expand features quadratically (squares and pairwise products).
    #[arg(long)]
    quadratic: bool,
    /// Cap on nonzero coefficients (path truncation).
    #[arg(long)]
    dfmax: Option<usize>,
    #[arg(long)]
    lambdas: Option<usize>,
    #[arg(long)]
    lambda_min_ratio: Option<f64>,
    /// Output model file (JSON).
    #[arg(long)]
    out: PathBuf,
    /// Optional CSV log of the path: lambda, nnz, validation MSE.
    #[arg(long)]
    path_log: Option<PathBuf>,
    /// Optional CSV of standardized coefficients.
    #[arg(long)]
    coef_csv: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrainFileCfg {
    quadratic: Option<bool>,
    dfmax: Option<usize>,
    lambdas: Option<usize>,
    lambda_min_ratio: Option<f64>,
}

fn cmd_train(args: TrainArgs) -> Result<(), CliError> {
    let file: TrainFileCfg = load_file_cfg(&args.config)?;
    let quadratic = args.quadratic || file.quadratic.unwrap_or(false);
    let mode = if quadratic {
        ExpansionMode::Quadratic
    } else {
        ExpansionMode::Linear
    };
    let cfg = PathConfig {
        n_lambdas: pick(args.lambdas, file.lambdas, 100),
        lambda_min_ratio: pick(args.lambda_min_ratio, file.lambda_min_ratio, 1e-4),
        dfmax: args.dfmax.or(file.dfmax),
        ..PathConfig::default()
    };
    echo_config(
        "train",
        &serde_json::json!({
            "data": args.data.display().to_string(), "valid": args.valid.display().to_string(),
            "mode": if quadratic { "quadratic" } else { "linear" },
            "dfmax": cfg.dfmax, "lambdas": cfg.n_lambdas, "lambda_min_ratio": cfg.lambda_min_ratio,
        }),
    );

    let train = CandidateDataset::read(&args.data)
        .map_err(runtime_err)?
        .to_training()
        .map_err(runtime_err)?;
    let valid = CandidateDataset::read(&args.valid)
        .map_err(runtime_err)?
        .to_training()
        .map_err(runtime_err)?;

    let path = lasso_path(&train, mode, &cfg).map_err(runtime_err)?;
    let selection = select_model(&path, &valid).map_err(runtime_err)?;
    selection.model.save(&args.out).map_err(runtime_err)?;

    if let Some(log_path) = &args.path_log {
        let mut csv = String::from("lambda,nnz,validation_mse\n");
        for (entry, mse) in path.entries.iter().zip(&selection.mses) {
            csv.push_str(&format!(
                "{},{},{}\n",
                entry.lambda,
                entry.model.nnz(),
                mse
            ));
        }
        std::fs::write(log_path, csv).map_err(runtime_err)?;
    }
    if let Some(coef_path) = &args.coef_csv {
        let mut csv = String::from("term_id,name,coefficient,standardized\n");
        for (id, name, beta_s) in selection.model.standardized_coefficients() {
            let coef = selection
                .model
                .terms
                .iter()
                .find(|t| t.term_id == id)
                .map_or(0.0, |t| t.coefficient);
            csv.push_str(&format!("{id},\"{name}\",{coef},{beta_s}\n"));
        }
        std::fs::write(coef_path, csv).map_err(runtime_err)?;
    }

    println!(
        "model: nnz {} lambda {:.6e} validation MSE {:.6e} -> {}",
        selection.model.nnz(),
        selection.model.metadata.lambda,
        selection.model.metadata.validation_mse.unwrap_or(f64::NAN),
        args.out.display()
    );
    Ok(())
}

// ------------------------------------------------------------------- solve

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Branching rule: vfs|pseudocost|reliability|random|model:<path>.
    #[arg(long)]
    rule: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    node_limit: Option<u64>,
    /// Depth-first node selection instead of best-bound.
    #[arg(long)]
    dfs: bool,
    /// Write a per-node trace as JSON lines.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveFileCfg {
    seed: Option<u64>,
    time_limit: Option<f64>,
    node_limit: Option<u64>,
    dfs: Option<bool>,
}

fn cmd_solve(args: SolveArgs) -> Result<(), CliError> {
    let file: SolveFileCfg = load_file_cfg(&args.config)?;
    let rule_spec = RuleSpec::parse(&args.rule).map_err(config_err)?;
    let cfg = SolverConfig {
        time_limit: pick(args.time_limit, file.time_limit, 3600.0),
        node_limit: pick(args.node_limit, file.node_limit, 10_000_000),
        random_seed: pick(args.seed, file.seed, 0),
        node_selection: if args.dfs || file.dfs.unwrap_or(false) {
            NodeSelection::Dfs
        } else {
            NodeSelection::BestBound
        },
        keep_trace: args.trace.is_some(),
        ..SolverConfig::default()
    };
    echo_config(
        "solve",
        &serde_json::json!({
            "instance": args.instance.display().to_string(), "rule": rule_spec.label(),
            "seed": cfg.random_seed, "time_limit": cfg.time_limit,
            "node_limit": cfg.node_limit,
            "node_selection": if args.dfs { "dfs" } else { "best_bound" },
        }),
    );

    let inst = load_instance(&args.instance).map_err(runtime_err)?;
    let mut rule = rule_spec
        .build(cfg.random_seed, &Default::default())
        .map_err(config_err)?;
    let result =
        sparsebranch_core::solve_mip(&inst, &cfg, rule.as_mut()).map_err(runtime_err)?;

    if let (Some(trace_path), Some(trace)) = (&args.trace, &result.trace) {
        let mut out = String::new();
        for t in trace {
            out.push_str(&serde_json::to_string(t).map_err(runtime_err)?);
            out.push('\n');
        }
        std::fs::write(trace_path, out).map_err(runtime_err)?;
    }

    println!("status:    {:?}", result.status);
    match result.incumbent_objective {
        Some(z) => println!("objective: {z}"),
        None => println!("objective: none"),
    }
    println!("nodes:     {}", result.nodes_processed);
    println!("time:      {:.3}s", result.wall_time);
    println!("lp iters:  {}", result.lp_iterations);
    if result.numerical_failures > 0 {
        println!("warning:   {} nodes discarded (numerics)", result.numerical_failures);
    }
    Ok(())
}

// ---------------------------------------------------------------- evaluate

#[derive(Args)]
struct EvaluateArgs {
    /// Comma-separated methods, e.g. vfs,pseudocost,model:ql.json.
    #[arg(long)]
    methods: String,
    #[arg(long)]
    instances: PathBuf,
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    node_limit: Option<u64>,
    /// Report deterministic simplex-iteration ticks instead of wall time.
    #[arg(long)]
    deterministic_time: bool,
    /// Output directory for records.jsonl, report.csv, report.txt.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct EvaluateFileCfg {
    seeds: Option<u64>,
    time_limit: Option<f64>,
    node_limit: Option<u64>,
    deterministic_time: Option<bool>,
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    let file: EvaluateFileCfg = load_file_cfg(&args.config)?;
    let metric = MetricConfig {
        seeds: pick(args.seeds, file.seeds, 5),
        time_limit: pick(args.time_limit, file.time_limit, 3600.0),
        node_limit: pick(args.node_limit, file.node_limit, 10_000_000),
        deterministic_time: args.deterministic_time
            || file.deterministic_time.unwrap_or(false),
        ..MetricConfig::default()
    };
    echo_config(
        "evaluate",
        &serde_json::json!({
            "methods": args.methods, "instances": args.instances.display().to_string(),
            "seeds": metric.seeds, "time_limit": metric.time_limit,
            "node_limit": metric.node_limit, "deterministic_time": metric.deterministic_time,
        }),
    );

    let mut methods = Vec::new();
    for name in args.methods.split(',').filter(|s| !s.is_empty()) {
        let rule = RuleSpec::parse(name).map_err(config_err)?;
        methods.push(MethodSpec::new(name, rule));
    }
    if methods.is_empty() {
        return Err(CliError::Config("no methods given".into()));
    }

    let manifest = Manifest::load(&args.instances).map_err(config_err)?;
    let mut instances = Vec::new();
    for f in &manifest.files {
        instances.push(BenchInstance {
            instance: load_instance(&args.instances.join(f)).map_err(runtime_err)?,
            domain: manifest.domain.clone(),
            size: manifest.size.clone(),
        });
    }

    let solver = SolverConfig::default();
    let (table, records) = benchmark(&methods, &instances, &metric, &solver).map_err(runtime_err)?;

    std::fs::create_dir_all(&args.out).map_err(runtime_err)?;
    write_records(&args.out.join("records.jsonl"), &records).map_err(runtime_err)?;
    std::fs::write(args.out.join("report.csv"), table.to_csv()).map_err(runtime_err)?;
    let text = table.render_text();
    std::fs::write(args.out.join("report.txt"), &text).map_err(runtime_err)?;
    print!("{text}");
    Ok(())
}

// ------------------------------------------------------------ inspect-model

#[derive(Args)]
struct InspectArgs {
    #[arg(long)]
    model: PathBuf,
    /// How many standardized coefficients to print.
    #[arg(long, default_value_t = 10)]
    top: usize,
    /// Additional models; term ids selected in all of them are reported.
    #[arg(long, num_args = 1..)]
    common: Vec<PathBuf>,
}

fn cmd_inspect(args: InspectArgs) -> Result<(), CliError> {
    let model = SparseModel::load(&args.model).map_err(runtime_err)?;
    println!(
        "model {} | mode {:?} | nnz {} | lambda {:.6e} | validation MSE {}",
        args.model.display(),
        model.mode,
        model.nnz(),
        model.metadata.lambda,
        model
            .metadata
            .validation_mse
            .map_or("n/a".to_string(), |v| format!("{v:.6e}")),
    );
    println!("top {} standardized coefficients:", args.top);
    for (id, name, beta_s) in model.standardized_coefficients().into_iter().take(args.top) {
        println!("  [{id:>6}] {beta_s:>12.5}  {name}");
    }

    if !args.common.is_empty() {
        let mut models = vec![model];
        for p in &args.common {
            models.push(SparseModel::load(p).map_err(runtime_err)?);
        }
        let shared = common_features(&models).map_err(runtime_err)?;
        println!("terms selected in all {} models:", models.len());
        let schema = models[0].schema();
        for id in shared {
            println!("  [{id:>6}] {}", schema.term_name(schema.terms[id].kind));
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Collect(args) => cmd_collect(args),
        Command::Train(args) => cmd_train(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::InspectModel(args) => cmd_inspect(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage problems (unknown flags, missing args) exit 1; help and
            // version requests stay successful.
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}
