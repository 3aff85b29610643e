//! Data-void analysis over social-media post corpora.
//!
//! The crate ingests CrowdTangle-style JSON Lines exports ([`ingest`]), sorts
//! sources into news media, political, and citizen spaces ([`source`]),
//! assigns topics from journalist keyword lists ([`topic`]), scores political
//! leaning ([`leaning`]) and bot likelihood ([`bot`]), and aggregates the
//! result into dashboard summaries and ranked void findings ([`void`]).

pub mod bot;
pub mod digest;
pub mod error;
pub mod ingest;
pub mod kb;
pub mod leaning;
pub mod pipeline;
pub mod source;
pub mod synth;
pub mod text;
pub mod topic;
pub mod void;

pub use error::{Error, Result};
pub use ingest::{corpus_stats, parse_corpus, Corpus, CorpusStats, Post, Source};
pub use kb::{load_knowledge_base, EntityMentions, KnowledgeBase};
pub use leaning::{leaning_label, leaning_score, Leaning, LeaningLabel, LeaningScore};
pub use source::{categorize_source, Category, SourceCategory};
pub use topic::{classify_topics, train_topic_model, weak_label, TopicConfig, TopicModel};
pub use void::{deep_dive, detect_voids, summarize, AnnotatedPost, DashboardSummary, VoidReport, VoidThresholds};
