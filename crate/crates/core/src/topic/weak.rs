use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::TopicConfig;
use crate::ingest::Corpus;
use crate::text::tokenize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledItem {
    pub post_id: String,
    pub topic: String,
}

/// Per-topic sampling outcome. `deficit` is how far `sampled` fell short of
/// `target`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceEntry {
    pub topic: String,
    pub available: usize,
    pub sampled: usize,
    pub target: usize,
    pub deficit: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledSet {
    pub config_hash: String,
    pub topics: Vec<String>,
    pub seed: u64,
    pub items: Vec<LabeledItem>,
    pub balance_report: Vec<BalanceEntry>,
}

impl LabeledSet {
    /// Sampled item count per topic, in config order.
    pub fn counts(&self) -> Vec<(String, usize)> {
        self.balance_report
            .iter()
            .map(|b| (b.topic.clone(), b.sampled))
            .collect()
    }

    pub fn is_balanced(&self) -> bool {
        self.balance_report.iter().all(|b| b.deficit == 0)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct WeakLabelOptions {
    /// Posts to sample per topic. Defaults to the smallest non-zero number of
    /// candidates across topics.
    pub target: Option<usize>,
}

pub fn weak_label(corpus: &Corpus, config: &TopicConfig, seed: u64) -> LabeledSet {
    weak_label_with(corpus, config, seed, WeakLabelOptions::default())
}

/// Labels each keyword-matching post with its best topic, then samples an
/// equal number of posts per topic without duplicating any post.
pub fn weak_label_with(
    corpus: &Corpus,
    config: &TopicConfig,
    seed: u64,
    opts: WeakLabelOptions,
) -> LabeledSet {
    let matcher = config.matcher();
    let mut candidates: Vec<Vec<usize>> = vec![Vec::new(); config.topics.len()];
    for (i, post) in corpus.posts().iter().enumerate() {
        if let Some(t) = matcher.best_topic(&tokenize(&post.text)) {
            candidates[t].push(i);
        }
    }

    let target = opts.target.unwrap_or_else(|| {
        candidates
            .iter()
            .map(Vec::len)
            .filter(|&n| n > 0)
            .min()
            .unwrap_or(0)
    });

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    let mut balance_report = Vec::with_capacity(candidates.len());
    for (t, pool) in candidates.iter().enumerate() {
        let mut pool = pool.clone();
        pool.shuffle(&mut rng);
        let sampled = target.min(pool.len());
        chosen.extend(pool[..sampled].iter().map(|&i| (i, t)));
        balance_report.push(BalanceEntry {
            topic: config.topics[t].name.clone(),
            available: pool.len(),
            sampled,
            target,
            deficit: target - sampled,
        });
    }
    chosen.sort_unstable();

    for b in balance_report.iter().filter(|b| b.deficit > 0) {
        log::warn!(
            "topic {:?}: {} labeled posts available, {} short of target {}",
            b.topic, b.available, b.deficit, b.target
        );
    }

    LabeledSet {
        config_hash: config.hash(),
        topics: config.names(),
        seed,
        items: chosen
            .into_iter()
            .map(|(i, t)| LabeledItem {
                post_id: corpus.posts()[i].post_id.clone(),
                topic: config.topics[t].name.clone(),
            })
            .collect(),
        balance_report,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{Post, Source, SourceKind};
    use crate::topic::TopicSpec;

    fn corpus(texts: &[String]) -> Corpus {
        let posts = texts
            .iter()
            .enumerate()
            .map(|(i, t)| Post {
                post_id: format!("p{i}"),
                source_id: "s".into(),
                text: t.clone(),
                created_at: "2022-10-01T00:00:00Z".parse().unwrap(),
                likes: 0,
                comments: 0,
                shares: 0,
                language_hint: None,
            })
            .collect();
        let src = Source {
            source_id: "s".into(),
            name: "s".into(),
            description: String::new(),
            kind_hint: SourceKind::Page,
        };
        Corpus::from_parts(posts, vec![src]).unwrap()
    }

    fn config() -> TopicConfig {
        TopicConfig::new(vec![
            TopicSpec { name: "A".into(), keywords: vec!["alpha".into(), "apple".into()] },
            TopicSpec { name: "B".into(), keywords: vec!["beta".into(), "banana".into()] },
            TopicSpec { name: "C".into(), keywords: vec!["gamma".into()] },
        ])
        .unwrap()
    }

    #[test]
    fn balanced_to_minimum_with_zero_topic_reported() {
        let mut texts: Vec<String> = (0..100).map(|i| format!("alpha post {i}")).collect();
        texts.extend((0..20).map(|i| format!("beta post {i}")));
        texts.push("no keywords".into());
        let c = corpus(&texts);
        let set = weak_label(&c, &config(), 7);

        assert_eq!(set.counts(), vec![("A".into(), 20), ("B".into(), 20), ("C".into(), 0)]);
        assert_eq!(set.balance_report[0].deficit, 0);
        assert_eq!(set.balance_report[1].deficit, 0);
        assert_eq!(set.balance_report[2], BalanceEntry {
            topic: "C".into(), available: 0, sampled: 0, target: 20, deficit: 20
        });
        assert!(!set.is_balanced());
        assert_eq!(set.items.len(), 40);

        // No post is sampled twice; same seed reproduces the sample.
        let mut ids: Vec<_> = set.items.iter().map(|i| &i.post_id).collect();
        ids.dedup();
        assert_eq!(ids.len(), 40);
        assert_eq!(weak_label(&c, &config(), 7), set);
        assert_ne!(weak_label(&c, &config(), 8).items, set.items);
    }

    #[test]
    fn explicit_target_reports_deficits() {
        let texts: Vec<String> = vec!["alpha".into(), "beta".into(), "beta banana".into(), "gamma".into()];
        let set = weak_label_with(&corpus(&texts), &config(), 1, WeakLabelOptions { target: Some(2) });
        let deficits: Vec<_> = set.balance_report.iter().map(|b| b.deficit).collect();
        assert_eq!(deficits, vec![1, 0, 1]);
    }

    #[test]
    fn labels_follow_max_hits_then_config_order() {
        let texts: Vec<String> = vec!["apple alpha beta".into(), "alpha beta".into(), "beta banana gamma".into()];
        let set = weak_label_with(&corpus(&texts), &config(), 3, WeakLabelOptions { target: Some(5) });
        let labels: Vec<_> = set.items.iter().map(|i| (i.post_id.as_str(), i.topic.as_str())).collect();
        assert_eq!(labels, vec![("p0", "A"), ("p1", "A"), ("p2", "B")]);
    }
}
