//! Resolving input paths and running the pipeline for the batch commands and
//! the service.

use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use voidlens::bot::{read_bot_labels, BotLabel, BotModel};
use voidlens::ingest::{parse_corpus_with, ParseOptions, ParsedCorpus, TimeWindow};
use voidlens::pipeline::{self, BotModelSource, PipelineInput, PipelineOutput, PipelineSettings};
use voidlens::source::OverrideStore;
use voidlens::topic::{TopicConfig, TopicModel};
use voidlens::{load_knowledge_base, KnowledgeBase};

pub const POSTS_FILE: &str = "posts.jsonl";
pub const SOURCES_FILE: &str = "sources.jsonl";
pub const BOT_LABELS_FILE: &str = "bot_labels.jsonl";
pub const OVERRIDES_FILE: &str = "overrides.jsonl";

#[derive(Debug, thiserror::Error)]
pub enum JobError {
    #[error(transparent)]
    Core(#[from] voidlens::Error),
    #[error("{0}")]
    Validation(String),
    #[error("{what}: {source}")]
    Io {
        what: String,
        #[source]
        source: std::io::Error,
    },
}

impl JobError {
    pub fn io(what: impl Into<String>, source: std::io::Error) -> Self {
        JobError::Io { what: what.into(), source }
    }

    pub fn is_validation(&self) -> bool {
        match self {
            JobError::Core(e) => e.is_validation(),
            JobError::Validation(_) => true,
            JobError::Io { .. } => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, JobError>;

/// Where the bot model comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum BotSpec {
    Model(PathBuf),
    Labels(PathBuf),
}

/// Paths and settings for one pipeline run.
#[derive(Debug, Clone)]
pub struct JobConfig {
    pub posts: PathBuf,
    pub sources: PathBuf,
    pub kb_dir: PathBuf,
    pub topics: PathBuf,
    pub topic_model: Option<PathBuf>,
    pub bot: Option<BotSpec>,
    pub overrides: Option<PathBuf>,
    pub window: Option<TimeWindow>,
    pub settings: PipelineSettings,
    pub generated_at: Option<DateTime<Utc>>,
}

impl JobConfig {
    /// Defaults for a corpus directory holding `posts.jsonl`,
    /// `sources.jsonl`, optionally `bot_labels.jsonl`, and a `kb/`
    /// subdirectory (the directory itself is used when `kb/` is absent).
    pub fn from_corpus_dir(dir: &Path, topics: &Path) -> Self {
        let kb = dir.join("kb");
        let labels = dir.join(BOT_LABELS_FILE);
        JobConfig {
            posts: dir.join(POSTS_FILE),
            sources: dir.join(SOURCES_FILE),
            kb_dir: if kb.is_dir() { kb } else { dir.to_path_buf() },
            topics: topics.to_path_buf(),
            topic_model: None,
            bot: labels.exists().then_some(BotSpec::Labels(labels)),
            overrides: None,
            window: None,
            settings: PipelineSettings::default(),
            generated_at: None,
        }
    }

    /// Fails on the first input path that does not exist.
    pub fn check_paths(&self) -> Result<()> {
        let mut paths = vec![&self.posts, &self.sources, &self.kb_dir, &self.topics];
        paths.extend(&self.topic_model);
        if let Some(BotSpec::Model(p) | BotSpec::Labels(p)) = &self.bot {
            paths.push(p);
        }
        for p in paths {
            if !p.exists() {
                return Err(JobError::io(p.display().to_string(), std::io::ErrorKind::NotFound.into()));
            }
        }
        Ok(())
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| JobError::io(path.display().to_string(), e))
}

pub fn read_corpus(cfg: &JobConfig) -> Result<ParsedCorpus> {
    let parsed = parse_corpus_with(
        BufReader::new(open(&cfg.posts)?),
        BufReader::new(open(&cfg.sources)?),
        &ParseOptions { declared_window: cfg.window },
    )?;
    for w in &parsed.warnings {
        log::warn!("{w}");
    }
    if !parsed.rejects.is_empty() {
        log::warn!(
            "rejected {} post line(s) and {} source line(s)",
            parsed.rejects.posts.len(),
            parsed.rejects.sources.len()
        );
    }
    Ok(parsed)
}

pub fn read_topics(path: &Path) -> Result<TopicConfig> {
    let text = fs::read_to_string(path).map_err(|e| JobError::io(path.display().to_string(), e))?;
    Ok(TopicConfig::from_json(&text)?)
}

pub fn read_topic_model(path: &Path) -> Result<TopicModel> {
    Ok(TopicModel::read_json(BufReader::new(open(path)?))?)
}

pub fn read_bot_model(path: &Path) -> Result<BotModel> {
    Ok(BotModel::read_json(BufReader::new(open(path)?))?)
}

pub fn read_labels(path: &Path) -> Result<Vec<BotLabel>> {
    Ok(read_bot_labels(BufReader::new(open(path)?))?)
}

pub fn open_overrides(cfg: &JobConfig) -> Result<OverrideStore> {
    Ok(match &cfg.overrides {
        Some(p) => OverrideStore::open(p)?,
        None => OverrideStore::in_memory(),
    })
}

/// Bot model input after reading files.
#[derive(Debug, Clone)]
pub enum BotInput {
    Model(Box<BotModel>),
    Labels(Vec<BotLabel>),
}

impl BotInput {
    pub fn as_source(&self) -> BotModelSource<'_> {
        match self {
            BotInput::Model(m) => BotModelSource::Trained(m),
            BotInput::Labels(l) => BotModelSource::Labels(l),
        }
    }
}

/// Everything read from disk for a run.
pub struct Inputs {
    pub parsed: ParsedCorpus,
    pub kb: KnowledgeBase,
    pub config: TopicConfig,
    pub overrides: OverrideStore,
    pub topic_model: Option<TopicModel>,
    pub bot: BotInput,
}

pub fn load(cfg: &JobConfig) -> Result<Inputs> {
    cfg.check_paths()?;
    let bot = match &cfg.bot {
        Some(BotSpec::Model(p)) => BotInput::Model(Box::new(read_bot_model(p)?)),
        Some(BotSpec::Labels(p)) => BotInput::Labels(read_labels(p)?),
        None => {
            return Err(JobError::Validation(
                "no bot model or bot labels given (use --bot-model or --bot-labels)".into(),
            ))
        }
    };
    Ok(Inputs {
        parsed: read_corpus(cfg)?,
        kb: load_knowledge_base(&cfg.kb_dir)?,
        config: read_topics(&cfg.topics)?,
        overrides: open_overrides(cfg)?,
        topic_model: cfg.topic_model.as_deref().map(read_topic_model).transpose()?,
        bot,
    })
}

pub fn run(inputs: &Inputs, cfg: &JobConfig) -> Result<PipelineOutput> {
    Ok(pipeline::run(PipelineInput {
        corpus: &inputs.parsed.corpus,
        kb: &inputs.kb,
        overrides: &inputs.overrides,
        config: &inputs.config,
        topic_model: inputs.topic_model.as_ref(),
        bot: inputs.bot.as_source(),
        settings: &cfg.settings,
        generated_at: cfg.generated_at.unwrap_or_else(Utc::now),
    })?)
}

/// Serializes `value` as pretty JSON to `path`, creating parent directories.
pub fn write_json<T: serde::Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| JobError::io(parent.display().to_string(), e))?;
    }
    let mut bytes = serde_json::to_vec_pretty(value).map_err(voidlens::Error::from)?;
    bytes.push(b'\n');
    fs::write(path, bytes).map_err(|e| JobError::io(path.display().to_string(), e))
}

/// Creates `path` (and parents) for writing.
pub fn create(path: &Path) -> Result<std::io::BufWriter<File>> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| JobError::io(parent.display().to_string(), e))?;
    }
    File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| JobError::io(path.display().to_string(), e))
}
