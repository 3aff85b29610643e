//! Aggregation of annotated posts into dashboard summaries, and detection of
//! topic, leaning, and source-type data voids from those summaries.

mod annotated;
mod detect;
mod summary;

pub use annotated::{read_annotated_jsonl, write_annotated_jsonl, AnnotatedPost};
pub use detect::{detect_voids, Finding, FindingEvidence, VoidLevel, VoidReport, VoidThresholds};
pub use summary::{
    deep_dive, summarize, summarize_with, DashboardSummary, EngagementShare, EngagementTotals,
    FrequentSource, LeaningCounts, LeaningShare, SourceTypeCounts, SummaryMeta, SummaryOptions,
    TopEngagement, DEFAULT_TOP_K,
};
