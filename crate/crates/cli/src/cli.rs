//! `voidlens` command line. Exit codes: 0 success, 1 validation error or bad
//! usage, 2 fatal error.

use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use clap::{Args, Parser, Subcommand};
use voidlens::ingest::{corpus_stats, write_rejects, TimeWindow};
use voidlens::pipeline::bot_training_set;
use voidlens::source::{categorize_all, Category};
use voidlens::topic::{train_topic_model, weak_label};
use voidlens::void::{detect_voids, read_annotated_jsonl, summarize_with, write_annotated_jsonl, VoidThresholds};
use voidlens::{bot::train_bot_model, load_knowledge_base};

use crate::job::{self, BotSpec, JobConfig, JobError, OVERRIDES_FILE};
use crate::service::{self, AppState, ServiceOptions, Snapshot};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_FATAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "voidlens", version, about = "Find data voids in social-media post corpora")]
pub struct Cli {
    /// Log level filter (error, warn, info, debug, trace).
    #[arg(long, global = true, default_value = "warn", env = "VOIDLENS_LOG")]
    pub log: String,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a corpus and write normalized posts, sources, and rejects.
    Ingest(IngestArgs),
    /// Categorize sources as news media, political, or citizen.
    Categorize(CategorizeArgs),
    /// Weak-label topics and train the topic and bot models.
    Train(TrainArgs),
    /// Annotate every post with topic, leaning, and bot verdict.
    Annotate(RunArgs),
    /// Write summary.json and void_report.json.
    Report(ReportArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CorpusArgs {
    /// Directory with posts.jsonl, sources.jsonl, and optionally kb/ and
    /// bot_labels.jsonl.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Posts file; overrides the one in --corpus.
    #[arg(long)]
    pub posts: Option<PathBuf>,
    /// Sources file; overrides the one in --corpus.
    #[arg(long)]
    pub sources: Option<PathBuf>,
    /// Declared collection window start (RFC 3339).
    #[arg(long, requires = "window_end")]
    pub window_start: Option<DateTime<Utc>>,
    /// Declared collection window end (RFC 3339).
    #[arg(long, requires = "window_start")]
    pub window_end: Option<DateTime<Utc>>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Knowledge-base directory [default: <corpus>/kb or <corpus>].
    #[arg(long)]
    pub kb: Option<PathBuf>,
    /// Topic config JSON.
    #[arg(long)]
    pub topics: PathBuf,
    /// Pretrained topic model; trained on the fly when absent.
    #[arg(long)]
    pub topic_model: Option<PathBuf>,
    /// Pretrained bot model.
    #[arg(long, conflicts_with = "bot_labels")]
    pub bot_model: Option<PathBuf>,
    /// Bot labels JSONL [default: <corpus>/bot_labels.jsonl].
    #[arg(long)]
    pub bot_labels: Option<PathBuf>,
    /// Category overrides sidecar.
    #[arg(long)]
    pub overrides: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Neutral band half-width for leaning labels.
    #[arg(long, default_value_t = voidlens::leaning::DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Timestamp stamped into outputs [default: now].
    #[arg(long)]
    pub generated_at: Option<DateTime<Utc>>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct CategorizeArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long)]
    pub kb: Option<PathBuf>,
    /// Category overrides sidecar [default: <out>/overrides.jsonl].
    #[arg(long)]
    pub overrides: Option<PathBuf>,
    /// Record an override, as SOURCE_ID=CATEGORY. Repeatable.
    #[arg(long = "set", value_name = "SOURCE_ID=CATEGORY")]
    pub set: Vec<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long)]
    pub topics: PathBuf,
    #[arg(long)]
    pub bot_labels: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct Thresholds {
    /// Topic void when count < alpha * median topic count.
    #[arg(long, default_value_t = 0.25)]
    pub alpha: f64,
    /// Leaning void when share < tau percent.
    #[arg(long, default_value_t = 10.0)]
    pub tau: f64,
    /// Source-type void when share < tau-source percent.
    #[arg(long, default_value_t = 10.0)]
    pub tau_source: f64,
    /// Frequent sources listed per topic.
    #[arg(long, default_value_t = voidlens::void::DEFAULT_TOP_K)]
    pub top_k: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub thresholds: Thresholds,
    /// Summarize an existing annotated.jsonl instead of running the pipeline.
    #[arg(long)]
    pub annotated: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub thresholds: Thresholds,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// 0 picks a free port; the bound address is printed on stdout.
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Room and override storage.
    #[arg(long, env = "VOIDLENS_DATA_DIR")]
    pub data_dir: Option<PathBuf>,
    /// Static bearer token required by every route but /health.
    #[arg(long, env = "VOIDLENS_API_TOKEN", hide_env_values = true)]
    pub token: Option<String>,
}

/// Parses `argv` and runs the command, returning the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    let _ = env_logger::Builder::new().parse_filters(&cli.log).format_timestamp(None).try_init();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_FATAL
            }
        }
    }
}

fn dispatch(cmd: Command) -> job::Result<i32> {
    match cmd {
        Command::Ingest(a) => ingest(a),
        Command::Categorize(a) => categorize(a),
        Command::Train(a) => train(a),
        Command::Annotate(a) => annotate(a),
        Command::Report(a) => report(a),
        Command::Serve(a) => serve(a),
    }
}

fn usage(msg: impl Into<String>) -> JobError {
    JobError::Validation(msg.into())
}

impl CorpusArgs {
    fn paths(&self) -> job::Result<(PathBuf, PathBuf)> {
        let from_dir = |file| self.corpus.as_ref().map(|d| d.join(file));
        let posts = self.posts.clone().or_else(|| from_dir(job::POSTS_FILE));
        let sources = self.sources.clone().or_else(|| from_dir(job::SOURCES_FILE));
        match (posts, sources) {
            (Some(p), Some(s)) => Ok((p, s)),
            _ => Err(usage("give --corpus, or both --posts and --sources")),
        }
    }

    fn window(&self) -> Option<TimeWindow> {
        Some(TimeWindow { start: self.window_start?, end: self.window_end? })
    }

    fn kb_dir(&self, explicit: Option<&Path>) -> job::Result<PathBuf> {
        if let Some(k) = explicit {
            return Ok(k.to_path_buf());
        }
        let dir = self.corpus.as_ref().ok_or_else(|| usage("give --kb or --corpus"))?;
        let kb = dir.join("kb");
        Ok(if kb.is_dir() { kb } else { dir.clone() })
    }

    fn default_labels(&self) -> Option<PathBuf> {
        self.corpus.as_ref().map(|d| d.join(job::BOT_LABELS_FILE)).filter(|p| p.exists())
    }
}

fn job_config(a: &RunArgs) -> job::Result<JobConfig> {
    let (posts, sources) = a.corpus.paths()?;
    let bot = match (&a.bot_model, &a.bot_labels) {
        (Some(m), _) => Some(BotSpec::Model(m.clone())),
        (None, Some(l)) => Some(BotSpec::Labels(l.clone())),
        (None, None) => a.corpus.default_labels().map(BotSpec::Labels),
    };
    let mut cfg = JobConfig {
        posts,
        sources,
        kb_dir: a.corpus.kb_dir(a.kb.as_deref())?,
        topics: a.topics.clone(),
        topic_model: a.topic_model.clone(),
        bot,
        overrides: a.overrides.clone(),
        window: a.corpus.window(),
        settings: Default::default(),
        generated_at: a.generated_at,
    };
    cfg.settings.seed = a.seed;
    cfg.settings.epsilon = a.epsilon;
    Ok(cfg)
}

fn apply_thresholds(cfg: &mut JobConfig, t: &Thresholds) {
    cfg.settings.thresholds = VoidThresholds { alpha: t.alpha, tau: t.tau, tau_source: t.tau_source };
    cfg.settings.top_k = t.top_k;
}

fn ingest(a: IngestArgs) -> job::Result<i32> {
    let (posts, sources) = a.corpus.paths()?;
    let cfg = JobConfig {
        posts,
        sources,
        window: a.corpus.window(),
        ..JobConfig::from_corpus_dir(Path::new("."), Path::new("."))
    };
    let parsed = job::read_corpus(&cfg)?;
    parsed.corpus.write_posts_jsonl(job::create(&a.out.join(job::POSTS_FILE))?)?;
    parsed.corpus.write_sources_jsonl(job::create(&a.out.join(job::SOURCES_FILE))?)?;
    write_rejects(&parsed.rejects.posts, job::create(&a.out.join("rejects.jsonl"))?)?;
    write_rejects(&parsed.rejects.sources, job::create(&a.out.join("source_rejects.jsonl"))?)?;
    let stats = corpus_stats(&parsed.corpus);
    job::write_json(&a.out.join("corpus_stats.json"), &stats)?;
    println!(
        "accepted {} posts from {} sources; rejected {} post lines, {} source lines",
        stats.post_count,
        stats.source_count,
        parsed.rejects.posts.len(),
        parsed.rejects.sources.len()
    );
    Ok(if parsed.rejects.is_empty() { EXIT_OK } else { EXIT_VALIDATION })
}

fn categorize(a: CategorizeArgs) -> job::Result<i32> {
    let (posts, sources) = a.corpus.paths()?;
    let overrides_path = a.overrides.clone().unwrap_or_else(|| a.out.join(OVERRIDES_FILE));
    let cfg = JobConfig {
        posts,
        sources,
        overrides: Some(overrides_path.clone()),
        ..JobConfig::from_corpus_dir(Path::new("."), Path::new("."))
    };
    let parsed = job::read_corpus(&cfg)?;
    let kb = load_knowledge_base(&a.corpus.kb_dir(a.kb.as_deref())?)?;
    if !a.set.is_empty() {
        std::fs::create_dir_all(overrides_path.parent().unwrap_or(Path::new(".")))
            .map_err(|e| JobError::io(overrides_path.display().to_string(), e))?;
    }
    let mut overrides = job::open_overrides(&cfg)?;
    let known = voidlens::pipeline::source_ids(&parsed.corpus);
    for s in &a.set {
        let (id, cat) = s.split_once('=').ok_or_else(|| usage(format!("--set expects SOURCE_ID=CATEGORY, got {s:?}")))?;
        let cat: Category = cat.parse().map_err(usage)?;
        overrides.apply_override(id, cat, &known)?;
    }
    let categories = categorize_all(parsed.corpus.sources(), &kb, &overrides);
    job::write_json(&a.out.join("categories.json"), &categories)?;
    for c in Category::ALL {
        let n = categories.values().filter(|sc| sc.category == c).count();
        println!("{}: {n}", c.as_str());
    }
    Ok(EXIT_OK)
}

fn train(a: TrainArgs) -> job::Result<i32> {
    let (posts, sources) = a.corpus.paths()?;
    let cfg = JobConfig { posts, sources, ..JobConfig::from_corpus_dir(Path::new("."), Path::new(".")) };
    let parsed = job::read_corpus(&cfg)?;
    let config = job::read_topics(&a.topics)?;
    let labeled = weak_label(&parsed.corpus, &config, a.seed);
    job::write_json(&a.out.join("labeled.json"), &labeled)?;
    let topic_model = train_topic_model(&labeled, &parsed.corpus, a.seed)?;
    topic_model.write_json(job::create(&a.out.join("topic_model.json"))?)?;
    println!("topic model: validation accuracy {:.4}", topic_model.validation_accuracy);

    let labels_path = a.bot_labels.clone().or_else(|| a.corpus.default_labels());
    if let Some(path) = labels_path {
        let labels = job::read_labels(&path)?;
        let bot_model = train_bot_model(&bot_training_set(&parsed.corpus, &labels)?, a.seed)?;
        bot_model.write_json(job::create(&a.out.join("bot_model.json"))?)?;
        println!("bot model: holdout accuracy {:.4}", bot_model.holdout_metrics.accuracy);
    } else {
        log::warn!("no bot labels; skipping bot model");
    }
    Ok(EXIT_OK)
}

fn annotate(a: RunArgs) -> job::Result<i32> {
    let cfg = job_config(&a)?;
    let inputs = job::load(&cfg)?;
    let out = job::run(&inputs, &cfg)?;
    write_annotated_jsonl(&out.annotated, job::create(&a.out.join("annotated.jsonl"))?)?;
    println!("annotated {} posts", out.annotated.len());
    Ok(EXIT_OK)
}

fn report(a: ReportArgs) -> job::Result<i32> {
    let mut cfg = job_config(&a.run)?;
    apply_thresholds(&mut cfg, &a.thresholds);
    let (summary, report) = match &a.annotated {
        Some(path) => {
            let file = std::fs::File::open(path).map_err(|e| JobError::io(path.display().to_string(), e))?;
            let annotated = read_annotated_jsonl(std::io::BufReader::new(file))?;
            let config = job::read_topics(&cfg.topics)?;
            let opts = voidlens::pipeline::summary_options(&config, &cfg.settings, cfg.generated_at.unwrap_or_else(Utc::now));
            let summary = summarize_with(&annotated, &opts);
            let report = detect_voids(&summary, &cfg.settings.thresholds);
            (summary, report)
        }
        None => {
            let inputs = job::load(&cfg)?;
            let out = job::run(&inputs, &cfg)?;
            (out.summary, out.report)
        }
    };
    job::write_json(&a.run.out.join("summary.json"), &summary)?;
    job::write_json(&a.run.out.join("void_report.json"), &report)?;
    println!("{} posts, {} topics, {} void findings", summary.meta.post_count, summary.posts_per_topic.len(), report.findings.len());
    Ok(EXIT_OK)
}

fn serve(a: ServeArgs) -> job::Result<i32> {
    let mut cfg = job_config(&a.run)?;
    apply_thresholds(&mut cfg, &a.thresholds);
    if cfg.overrides.is_none() {
        cfg.overrides = a.data_dir.as_ref().map(|d| d.join(OVERRIDES_FILE));
    }
    if let Some(d) = &a.data_dir {
        std::fs::create_dir_all(d).map_err(|e| JobError::io(d.display().to_string(), e))?;
    }
    let inputs = job::load(&cfg)?;
    let out = job::run(&inputs, &cfg)?;
    let job::Inputs { parsed, kb, config, overrides, .. } = inputs;
    let snapshot = Snapshot::from_output(parsed.corpus, config, cfg.settings.clone(), out);
    let state = AppState::new(
        snapshot,
        kb,
        overrides,
        ServiceOptions { token: a.token, data_dir: a.data_dir, ..ServiceOptions::default() },
    );

    let rt = tokio::runtime::Runtime::new().map_err(|e| JobError::io("tokio runtime", e))?;
    rt.block_on(async move {
        let addr: SocketAddr = format!("{}:{}", a.host, a.port)
            .parse()
            .map_err(|e| usage(format!("invalid --host/--port: {e}")))?;
        let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| JobError::io(addr.to_string(), e))?;
        let local = listener.local_addr().map_err(|e| JobError::io("listener", e))?;
        println!("listening on http://{local}");
        let _ = std::io::stdout().flush();
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        service::serve(listener, state, shutdown).await.map_err(|e| JobError::io("server", e))?;
        Ok(EXIT_OK)
    })
}
