//! The `seclud` command line: ingest → index → cluster → query / bench / stats,
//! plus `gen` for planted-topic corpora.
//!
//! Exit codes: 0 on success, 1 on user error (bad flags, unreadable input),
//! 2 when an internal invariant fails (for example a result mismatch between
//! engines during `bench`).

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bench::{
    compression_report, generate_planted_corpus, generate_workload, speedup_report,
    standard_orderings, tc_sensitivity, theoretical_speedup, write_csv, write_plot_series,
    PlantedConfig, Workload,
};
use crate::cluster::{kmeans, load_clustering, multilevel_init, psi, topdown, ClusterConfig, Clustering};
use crate::corpus::{
    ingest, probabilities_from_corpus, probabilities_from_log, read_query_log, Corpus, InputFormat,
    ProbTable,
};
use crate::index::{bits_per_posting, build_index, store, Codec};
use crate::intersect::CostModel;
use crate::query::{resolve_terms, QueryEngine, Variant};
use crate::{Error, Result};

/// Environment variable consulted when `--seed` / `--workload-seed` is absent.
pub const SEED_ENV: &str = "SECLUD_SEED";

#[derive(Debug, Parser)]
#[command(name = "seclud", version, about = "Clustered inverted indexes for fast exact conjunctive queries")]
struct Cli {
    /// Worker threads for clustering (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build and persist an index from a document file.
    Index(IndexArgs),
    /// Cluster the documents of an index and write `doc_id,cluster_id` CSV.
    Cluster(ClusterArgs),
    /// Answer one conjunctive query.
    Query(QueryArgs),
    /// Measure speedups of a clustering on a query workload.
    Bench(BenchArgs),
    /// Print index statistics, and clustering statistics when given.
    Stats(StatsArgs),
    /// Generate a planted-topic corpus.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Plain,
    Jsonl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum CodecArg {
    Golomb,
    Gamma,
    Delta,
    Vbyte,
}

impl From<CodecArg> for Codec {
    fn from(c: CodecArg) -> Self {
        match c {
            CodecArg::Golomb => Codec::Golomb,
            CodecArg::Gamma => Codec::Gamma,
            CodecArg::Delta => Codec::Delta,
            CodecArg::Vbyte => Codec::VByte,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Algo {
    /// Recursive splitting into k..2k clusters.
    Topdown,
    /// Multilevel initialization followed by K-means, exactly k clusters.
    Multilevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum VariantArg {
    Single,
    Percluster,
    Clusterindex,
    Reordered,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Single => Variant::Single,
            VariantArg::Percluster => Variant::PerCluster,
            VariantArg::Clusterindex => Variant::ClusterIndex,
            VariantArg::Reordered => Variant::Reordered,
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct IndexArgs {
    /// Input documents; `-` reads standard input.
    #[arg(long = "in")]
    input: PathBuf,
    /// Output directory (or file path with an extension).
    #[arg(long)]
    out: PathBuf,
    /// Input format; inferred from the extension when omitted (`.jsonl`/`.json` → jsonl).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Codec for the stored posting lists.
    #[arg(long, value_enum, default_value = "gamma")]
    codec: CodecArg,
}

/// Flags shared by every command that computes term probabilities.
#[derive(Debug, Args, Serialize)]
struct ProbArgs {
    /// Number of most frequent terms used by the objective.
    #[arg(long, default_value_t = 100_000)]
    tc: usize,
    /// Query log (two terms per line) for term probabilities; defaults to
    /// document frequencies.
    #[arg(long)]
    query_log: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct ClusterArgs {
    #[arg(long)]
    index: PathBuf,
    #[arg(long, default_value_t = 64)]
    k: usize,
    #[arg(long, value_enum, default_value = "topdown")]
    algo: Algo,
    /// Seed; falls back to SECLUD_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    /// TOML file with ClusterConfig fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    chi: Option<usize>,
    #[arg(long)]
    max_rounds: Option<usize>,
    #[arg(long)]
    convergence_threshold: Option<f64>,
    #[arg(long)]
    doc_grained_threshold: Option<usize>,
    #[command(flatten)]
    probs: ProbArgs,
}

#[derive(Debug, Args, Serialize)]
struct QueryArgs {
    #[arg(long)]
    index: PathBuf,
    /// Clustering CSV; required by every variant except `single`.
    #[arg(long)]
    clusters: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "single")]
    variant: VariantArg,
    /// Query terms (all must occur).
    #[arg(required = true)]
    terms: Vec<String>,
}

#[derive(Debug, Args, Serialize)]
struct BenchArgs {
    #[arg(long)]
    index: PathBuf,
    #[arg(long)]
    clusters: PathBuf,
    /// Workload seed; falls back to SECLUD_SEED, then 0.
    #[arg(long)]
    workload_seed: Option<u64>,
    /// Number of generated queries (ignored with --query-log).
    #[arg(long, default_value_t = 100_000)]
    queries: usize,
    /// Timed passes per engine.
    #[arg(long, default_value_t = 3)]
    repetitions: usize,
    /// Speedup CSV; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a compression report (ordering × codec) to this CSV.
    #[arg(long)]
    compression: Option<PathBuf>,
    /// Comma-separated term cutoffs for a sensitivity run (re-clusters with TopDown).
    #[arg(long, value_delimiter = ',')]
    tc_values: Vec<usize>,
    /// Target cluster count of the sensitivity re-clustering.
    #[arg(long, default_value_t = 64)]
    k: usize,
    /// Write x/y series files for plotting into this directory.
    #[arg(long)]
    plot_data: Option<PathBuf>,
    #[command(flatten)]
    probs: ProbArgs,
}

#[derive(Debug, Args, Serialize)]
struct StatsArgs {
    #[arg(long)]
    index: PathBuf,
    #[arg(long)]
    clusters: Option<PathBuf>,
    #[command(flatten)]
    probs: ProbArgs,
}

#[derive(Debug, Args, Serialize)]
struct GenArgs {
    /// Output documents (`.jsonl` or plain text otherwise).
    #[arg(long)]
    out: PathBuf,
    /// Ground-truth CSV `doc_id,topic`.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long, default_value_t = 16)]
    topics: usize,
    #[arg(long, default_value_t = 3125)]
    docs_per_topic: usize,
    #[arg(long, default_value_t = 200)]
    vocab_per_topic: usize,
    #[arg(long, default_value_t = 200)]
    shared_vocab: usize,
    #[arg(long, default_value_t = 0.2)]
    overlap: f64,
    #[arg(long, default_value_t = 1.0)]
    zipf: f64,
    #[arg(long, default_value_t = 40)]
    doc_length: usize,
    /// Seed; falls back to SECLUD_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).try_init();
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// 2 for invariant violations, 1 for everything else.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Invariant(_) => 2,
        _ => 1,
    }
}

fn execute(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::InvalidConfig("--threads must be at least 1".into()));
        }
        // a pool configured earlier in the same process stays in place
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            log::warn!("thread pool already initialized; --threads ignored");
        }
    }
    log::info!("threads: {}", rayon::current_num_threads());
    match cli.command {
        Command::Index(args) => index(args),
        Command::Cluster(args) => cluster(args),
        Command::Query(args) => query(args),
        Command::Bench(args) => bench(args),
        Command::Stats(args) => stats(args),
        Command::Gen(args) => gen(args),
    }
}

fn log_config<T: Serialize>(command: &str, config: &T) {
    match serde_json::to_string(config) {
        Ok(json) => log::info!("{command} config: {json}"),
        Err(e) => log::warn!("{command} config not serializable: {e}"),
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn open(path: &Path) -> Result<Box<dyn BufRead>> {
    if path == Path::new("-") {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    let file = File::open(path).map_err(|source| Error::Path {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(Box::new(BufReader::new(file)))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|source| Error::Path {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    let file = File::create(path).map_err(|source| Error::Path {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(BufWriter::new(file))
}

fn is_jsonl(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("jsonl") | Some("json")
    )
}

fn load_index(path: &Path) -> Result<Corpus> {
    let corpus = store::load(path)?;
    log::info!(
        "loaded {}: {} documents, {} terms",
        path.display(),
        corpus.num_docs(),
        corpus.num_terms()
    );
    Ok(corpus)
}

type QueryPairs = Vec<(String, String)>;

/// Probability table and, when a log was given, its pairs.
fn load_probs(corpus: &Corpus, args: &ProbArgs) -> Result<(ProbTable, Option<QueryPairs>)> {
    match &args.query_log {
        Some(path) => {
            let log = read_query_log(open(path)?)?;
            let probs = probabilities_from_log(&log.pairs, corpus, args.tc)?;
            Ok((probs, Some(log.pairs)))
        }
        None => Ok((probabilities_from_corpus(corpus, args.tc)?, None)),
    }
}

fn index(args: IndexArgs) -> Result<()> {
    log_config("index", &args);
    let format = match args.format {
        Some(Format::Jsonl) => InputFormat::Jsonl,
        Some(Format::Plain) => InputFormat::Plain,
        None if is_jsonl(&args.input) => InputFormat::Jsonl,
        None => InputFormat::Plain,
    };
    let corpus = ingest(open(&args.input)?, format)?;
    store::save(&args.out, &corpus, args.codec.into())?;
    println!(
        "indexed {} documents, {} terms, {} postings",
        corpus.num_docs(),
        corpus.num_terms(),
        corpus.total_size()
    );
    Ok(())
}

fn cluster_config(args: &ClusterArgs) -> Result<ClusterConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Path {
                path: path.clone(),
                source,
            })?;
            ClusterConfig::from_toml(&text)?
        }
        None => ClusterConfig::default(),
    };
    config.k = args.k;
    config.tc = args.probs.tc;
    config.seed = resolve_seed(args.seed)?;
    if let Some(v) = args.epsilon {
        config.epsilon = v;
    }
    if let Some(v) = args.chi {
        config.chi = v;
    }
    if let Some(v) = args.max_rounds {
        config.max_rounds = v;
    }
    if let Some(v) = args.convergence_threshold {
        config.convergence_threshold = v;
    }
    if let Some(v) = args.doc_grained_threshold {
        config.doc_grained_threshold = v;
    }
    config.validate()?;
    Ok(config)
}

fn cluster(args: ClusterArgs) -> Result<()> {
    log_config("cluster", &args);
    let config = cluster_config(&args)?;
    log_config("cluster effective", &config);
    let corpus = load_index(&args.index)?;
    let (probs, _) = load_probs(&corpus, &args.probs)?;
    if corpus.num_docs() < config.k {
        return Err(Error::TooFewDocuments {
            docs: corpus.num_docs(),
            k: config.k,
        });
    }
    let clustering = match args.algo {
        Algo::Topdown => topdown(&corpus, &probs, config.k, &config)?,
        Algo::Multilevel => {
            let init = multilevel_init(&corpus, &probs, config.k, &config)?;
            kmeans(&corpus, &init.clustering, &probs, &config).clustering
        }
    };
    clustering.verify(&corpus)?;
    clustering.save_csv(&args.out)?;
    let single = Clustering::single(&corpus, probs.len());
    println!(
        "{} clusters, psi {:.6e} (single cluster {:.6e}), written to {}",
        clustering.k(),
        psi(&clustering, &probs),
        psi(&single, &probs),
        args.out.display()
    );
    Ok(())
}

fn query(args: QueryArgs) -> Result<()> {
    log_config("query", &args);
    let corpus = load_index(&args.index)?;
    let variant: Variant = args.variant.into();
    let clustering = match (&args.clusters, variant) {
        (Some(path), _) => load_clustering(path, &corpus, 0)?,
        (None, Variant::Single) => Clustering::single(&corpus, 0),
        (None, v) => {
            return Err(Error::InvalidConfig(format!("variant {v} needs --clusters")));
        }
    };
    let engine = QueryEngine::build(variant, &corpus, &clustering);
    let text = args.terms.join(" ");
    let outcome = match resolve_terms(&corpus, &text) {
        Some(terms) if !terms.is_empty() => engine.query_terms(&terms),
        _ => Default::default(),
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for d in &outcome.docs {
        writeln!(out, "{d}")?;
    }
    log::info!("{} matches, {} steps ({variant})", outcome.docs.len(), outcome.steps);
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    log_config("bench", &args);
    let seed = resolve_seed(args.workload_seed)?;
    log::info!("workload seed: {seed}");
    let corpus = load_index(&args.index)?;
    let (probs, log_pairs) = load_probs(&corpus, &args.probs)?;
    let clustering = load_clustering(&args.clusters, &corpus, probs.len())?;
    let workload = match log_pairs {
        Some(pairs) => {
            let w = Workload::from_log(&pairs, &corpus, probs);
            log::info!("query log: {} pairs kept, {} dropped", w.len(), w.dropped);
            w
        }
        None => generate_workload(&probs, args.queries, seed)?,
    };
    if workload.is_empty() {
        return Err(Error::EmptyWorkload);
    }
    let report = speedup_report(&corpus, &clustering, &workload, args.repetitions)?;
    eprintln!("{report}");
    match &args.out {
        Some(path) => write_csv(create(path)?, std::slice::from_ref(&report))?,
        None => write_csv(io::stdout().lock(), std::slice::from_ref(&report))?,
    }

    let mut series = Vec::new();
    if let Some(path) = &args.compression {
        let rows = compression_report(&corpus, &standard_orderings(&corpus, &clustering, seed), &Codec::ALL);
        for r in &rows {
            eprintln!("{:>10} {:>7} {:7.3} bits/posting", r.ordering, r.codec, r.bits_per_posting);
        }
        write_csv(create(path)?, &rows)?;
    }
    if !args.tc_values.is_empty() {
        let config = ClusterConfig {
            k: args.k,
            seed,
            ..ClusterConfig::default()
        };
        log_config("tc sensitivity", &config);
        let rows = tc_sensitivity(&corpus, &workload, &args.tc_values, &config, args.repetitions)?;
        write_csv(io::stderr().lock(), &rows)?;
        let pick = |f: fn(&crate::bench::TcRow) -> f64| rows.iter().map(|r| (r.tc as f64, f(r))).collect::<Vec<_>>();
        series.push(("tc_s_t", pick(|r| r.s_t)));
        series.push(("tc_s_c", pick(|r| r.s_c)));
        series.push(("tc_s_r", pick(|r| r.s_r)));
    }
    if let Some(dir) = &args.plot_data {
        series.push(("cluster_sizes", clustering.sizes().iter().enumerate().map(|(j, &s)| (j as f64, s as f64)).collect()));
        series.push((
            "speedups",
            vec![(0.0, report.s_t), (1.0, report.s_l), (2.0, report.s_c), (3.0, report.s_r)],
        ));
        write_plot_series(dir, &series)?;
    }
    Ok(())
}

fn stats(args: StatsArgs) -> Result<()> {
    log_config("stats", &args);
    let corpus = load_index(&args.index)?;
    let index = build_index(&corpus);
    println!("documents     {}", corpus.num_docs());
    println!("terms         {}", corpus.num_terms());
    println!("postings      {}", index.total_postings());
    for codec in Codec::ALL {
        println!("{:<13} {:.3} bits/posting", codec.name(), bits_per_posting(&index, codec));
    }
    if let Some(path) = &args.clusters {
        let (probs, _) = load_probs(&corpus, &args.probs)?;
        let clustering = load_clustering(path, &corpus, probs.len())?;
        let sizes = clustering.sizes();
        println!("clusters      {}", clustering.k());
        println!(
            "cluster size  min {} max {}",
            sizes.iter().min().copied().unwrap_or(0),
            sizes.iter().max().copied().unwrap_or(0)
        );
        println!("psi           {:.6e}", psi(&clustering, &probs));
        match theoretical_speedup(&corpus, &clustering, &probs, CostModel::LookupMin) {
            Ok(s) => println!("S_T           {s:.3}"),
            Err(e) => println!("S_T           n/a ({e})"),
        }
    }
    Ok(())
}

fn gen(args: GenArgs) -> Result<()> {
    log_config("gen", &args);
    let config = PlantedConfig {
        topics: args.topics,
        docs_per_topic: args.docs_per_topic,
        vocab_per_topic: args.vocab_per_topic,
        shared_vocab: args.shared_vocab,
        overlap_fraction: args.overlap,
        zipf_exponent: args.zipf,
        doc_length: args.doc_length,
        seed: resolve_seed(args.seed)?,
    };
    log_config("gen effective", &config);
    let planted = generate_planted_corpus(&config)?;
    let corpus = &planted.corpus;
    let jsonl = is_jsonl(&args.out);
    let mut out = create(&args.out)?;
    for (d, doc) in corpus.docs().enumerate() {
        let text = doc.iter().map(|&t| corpus.term(t)).collect::<Vec<_>>().join(" ");
        if jsonl {
            let line = serde_json::json!({ "id": d.to_string(), "text": text });
            writeln!(out, "{line}")?;
        } else {
            writeln!(out, "{text}")?;
        }
    }
    out.flush()?;
    if let Some(path) = &args.truth {
        let mut w = csv::Writer::from_writer(create(path)?);
        w.write_record(["doc_id", "topic"])?;
        for (d, t) in planted.topics.iter().enumerate() {
            w.write_record([d.to_string(), t.to_string()])?;
        }
        w.flush()?;
    }
    println!(
        "generated {} documents over {} terms into {}",
        corpus.num_docs(),
        corpus.num_terms(),
        args.out.display()
    );
    Ok(())
}
