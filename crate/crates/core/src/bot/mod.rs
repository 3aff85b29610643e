//! Per-post bot likelihood from text features, and the binary evaluation
//! metrics used to report classifier quality.

mod features;
mod metrics;
mod model;

pub use features::{
    burst_flags, extract_bot_features, extract_bot_features_with_burst, BotFeatures,
    BURST_WINDOW_SECS, FEATURE_DIM, FEATURE_VERSION, HASH_BUCKETS,
};
pub use metrics::{compute_metrics, ConfusionMatrix, Metrics, MetricsDisplay};
pub use model::{
    classify_bot, classify_features, read_bot_labels, source_bot_scores, train_bot_model,
    train_bot_model_with, BotLabel, BotModel, BotTrainMetadata, BotTrainOptions, BotVerdict,
    DEFAULT_THRESHOLD, HIDDEN_WIDTH, MIN_CLASS_SUPPORT,
};
