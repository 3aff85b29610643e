//! End-to-end annotation: categorize sources, assign topics, score leaning
//! and bot likelihood, then aggregate.

use std::collections::{BTreeMap, HashMap, HashSet};

use chrono::{DateTime, Utc};
use serde::Serialize;

use crate::bot::{
    burst_flags, classify_features, extract_bot_features_with_burst, train_bot_model, BotFeatures,
    BotLabel, BotModel,
};
use crate::digest::json_hash;
use crate::error::{Error, Result};
use crate::ingest::Corpus;
use crate::kb::KnowledgeBase;
use crate::leaning::{leaning_label, leaning_score, DEFAULT_EPSILON};
use crate::source::{categorize_all, OverrideStore, SourceCategory};
use crate::topic::{classify_topics, train_topic_model, weak_label, LabeledSet, TopicConfig, TopicModel};
use crate::void::{
    detect_voids, summarize_with, AnnotatedPost, DashboardSummary, SummaryOptions, VoidReport,
    VoidThresholds, DEFAULT_TOP_K,
};

#[derive(Debug, Clone, Serialize)]
pub struct PipelineSettings {
    pub seed: u64,
    pub epsilon: f64,
    pub top_k: usize,
    pub thresholds: VoidThresholds,
}

impl Default for PipelineSettings {
    fn default() -> Self {
        Self {
            seed: 42,
            epsilon: DEFAULT_EPSILON,
            top_k: DEFAULT_TOP_K,
            thresholds: VoidThresholds::default(),
        }
    }
}

/// Hash stamped into summaries: the topic config plus every setting that
/// changes annotations or findings.
pub fn settings_hash(config: &TopicConfig, settings: &PipelineSettings) -> String {
    json_hash(&(config, settings))
}

/// Summary options a run with `config` and `settings` uses.
pub fn summary_options(config: &TopicConfig, settings: &PipelineSettings, generated_at: DateTime<Utc>) -> SummaryOptions {
    SummaryOptions {
        top_k: settings.top_k,
        topics: config.names(),
        generated_at,
        config_hash: settings_hash(config, settings),
    }
}

/// Joins labels to corpus posts and extracts their features.
pub fn bot_training_set(corpus: &Corpus, labels: &[BotLabel]) -> Result<Vec<(BotFeatures, bool)>> {
    let bursts = burst_flags(corpus);
    let by_id: HashMap<&str, _> = corpus.posts().iter().map(|p| (p.post_id.as_str(), p)).collect();
    labels
        .iter()
        .map(|l| {
            let post = by_id
                .get(l.post_id.as_str())
                .ok_or_else(|| Error::not_found("post", &l.post_id))?;
            let burst = bursts.get(&l.post_id).copied().unwrap_or(false);
            Ok((extract_bot_features_with_burst(post, burst), l.is_bot))
        })
        .collect()
}

/// Annotates every post. Sources missing from `categories` are an error.
pub fn annotate(
    corpus: &Corpus,
    kb: &KnowledgeBase,
    categories: &BTreeMap<String, SourceCategory>,
    config: &TopicConfig,
    topic_model: &TopicModel,
    bot_model: &BotModel,
    epsilon: f64,
) -> Result<Vec<AnnotatedPost>> {
    let topics = classify_topics(topic_model, config, corpus)?;
    let bursts = burst_flags(corpus);
    corpus
        .posts()
        .iter()
        .zip(topics)
        .map(|(post, topic)| {
            let source = corpus.source(&post.source_id);
            let category = categories
                .get(&post.source_id)
                .cloned()
                .ok_or_else(|| Error::not_found("source category", &post.source_id))?;
            let leaning = leaning_score(post, source, kb);
            let label = leaning_label(&leaning, epsilon);
            let burst = bursts.get(&post.post_id).copied().unwrap_or(false);
            let bot = classify_features(bot_model, &post.post_id, &extract_bot_features_with_burst(post, burst))?;
            Ok(AnnotatedPost {
                post: post.clone(),
                source_name: source.map(|s| s.name.clone()).unwrap_or_default(),
                source_category: category,
                topic,
                leaning,
                leaning_label: label,
                bot,
            })
        })
        .collect()
}

/// Where the bot model comes from for a run.
pub enum BotModelSource<'a> {
    Trained(&'a BotModel),
    Labels(&'a [BotLabel]),
}

/// Everything one full run produces.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub categories: BTreeMap<String, SourceCategory>,
    pub labeled: LabeledSet,
    pub topic_model: TopicModel,
    pub bot_model: BotModel,
    pub annotated: Vec<AnnotatedPost>,
    pub summary: DashboardSummary,
    pub report: VoidReport,
}

pub struct PipelineInput<'a> {
    pub corpus: &'a Corpus,
    pub kb: &'a KnowledgeBase,
    pub overrides: &'a OverrideStore,
    pub config: &'a TopicConfig,
    /// Reused instead of retraining when its config hash matches.
    pub topic_model: Option<&'a TopicModel>,
    pub bot: BotModelSource<'a>,
    pub settings: &'a PipelineSettings,
    pub generated_at: DateTime<Utc>,
}

pub fn run(input: PipelineInput<'_>) -> Result<PipelineOutput> {
    let PipelineInput { corpus, kb, overrides, config, topic_model, bot, settings, generated_at } = input;
    let categories = categorize_all(corpus.sources(), kb, overrides);
    let labeled = weak_label(corpus, config, settings.seed);
    let topic_model = match topic_model {
        Some(m) if m.config_hash == config.hash() => m.clone(),
        Some(m) => {
            return Err(Error::ConfigMismatch { model: m.config_hash.clone(), config: config.hash() })
        }
        None => train_topic_model(&labeled, corpus, settings.seed)?,
    };
    let bot_model = match bot {
        BotModelSource::Trained(m) => m.clone(),
        BotModelSource::Labels(labels) => train_bot_model(&bot_training_set(corpus, labels)?, settings.seed)?,
    };
    let annotated = annotate(corpus, kb, &categories, config, &topic_model, &bot_model, settings.epsilon)?;
    let summary = summarize_with(&annotated, &summary_options(config, settings, generated_at));
    let report = detect_voids(&summary, &settings.thresholds);
    Ok(PipelineOutput { categories, labeled, topic_model, bot_model, annotated, summary, report })
}

/// Replaces each annotated post's source category, e.g. after an override.
pub fn recategorize(annotated: &mut [AnnotatedPost], categories: &BTreeMap<String, SourceCategory>) {
    for ap in annotated {
        if let Some(c) = categories.get(&ap.post.source_id) {
            ap.source_category = c.clone();
        }
    }
}

/// Source ids as a lookup set, for override validation.
pub fn source_ids(corpus: &Corpus) -> HashSet<&str> {
    corpus.sources().iter().map(|s| s.source_id.as_str()).collect()
}
