//! Benchmark inputs shared by the criterion targets.

use voidlens::ingest::Corpus;
use voidlens::topic::{train_topic_model, weak_label, TopicConfig, TopicModel};

/// An 11-topic synthetic corpus with a model trained on it.
pub fn trained_topics(posts_per_topic: usize, seed: u64) -> (Corpus, TopicConfig, TopicModel) {
    let (corpus, config) = voidlens::synth::topic_benchmark(11, posts_per_topic, seed);
    let labeled = weak_label(&corpus, &config, seed);
    let model = train_topic_model(&labeled, &corpus, seed).expect("benchmark corpus trains");
    (corpus, config, model)
}
