use std::collections::{BTreeMap, HashMap};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::annotated::AnnotatedPost;
use crate::digest::sha256_hex;
use crate::error::{Error, Result};
use crate::leaning::Leaning;
use crate::source::Category;

pub const DEFAULT_TOP_K: usize = 10;

/// Percent of a topic's posts per leaning; sums to 100.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LeaningShare {
    pub neutral: f64,
    pub conservative: f64,
    pub liberal: f64,
}

impl LeaningShare {
    pub fn get(&self, leaning: Leaning) -> f64 {
        match leaning {
            Leaning::Neutral => self.neutral,
            Leaning::Conservative => self.conservative,
            Leaning::Liberal => self.liberal,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeaningCounts {
    pub neutral: usize,
    pub conservative: usize,
    pub liberal: usize,
}

impl LeaningCounts {
    pub fn get(&self, leaning: Leaning) -> usize {
        match leaning {
            Leaning::Neutral => self.neutral,
            Leaning::Conservative => self.conservative,
            Leaning::Liberal => self.liberal,
        }
    }

    fn bump(&mut self, leaning: Leaning) {
        match leaning {
            Leaning::Neutral => self.neutral += 1,
            Leaning::Conservative => self.conservative += 1,
            Leaning::Liberal => self.liberal += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.neutral + self.conservative + self.liberal
    }
}

/// A topic's percent of all comments and of all shares.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EngagementShare {
    pub comments: f64,
    pub shares: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngagementTotals {
    pub comments: u64,
    pub shares: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceTypeCounts {
    pub news_media: usize,
    pub political: usize,
    pub citizen: usize,
}

impl SourceTypeCounts {
    pub fn get(&self, c: Category) -> usize {
        match c {
            Category::NewsMedia => self.news_media,
            Category::Political => self.political,
            Category::Citizen => self.citizen,
        }
    }

    fn bump(&mut self, c: Category) {
        match c {
            Category::NewsMedia => self.news_media += 1,
            Category::Political => self.political += 1,
            Category::Citizen => self.citizen += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequentSource {
    pub source_id: String,
    pub source_name: String,
    pub category: Category,
    pub count: usize,
}

/// The single most engaging post of a topic, for outlier flags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopEngagement {
    pub post_id: String,
    pub engagement: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryMeta {
    pub generated_at: DateTime<Utc>,
    pub corpus_hash: String,
    pub config_hash: String,
    pub post_count: usize,
    pub top_k: usize,
}

/// Per-topic aggregates behind every dashboard chart.
///
/// Topics with no posts appear only in `posts_per_topic` (with 0); the
/// percentage views need at least one post.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DashboardSummary {
    pub posts_per_topic: BTreeMap<String, usize>,
    pub leaning_distribution: BTreeMap<String, LeaningShare>,
    pub leaning_counts: BTreeMap<String, LeaningCounts>,
    pub engagement_share: BTreeMap<String, EngagementShare>,
    pub engagement_totals: BTreeMap<String, EngagementTotals>,
    pub posts_per_source_type: BTreeMap<String, SourceTypeCounts>,
    pub bot_share: BTreeMap<String, f64>,
    pub frequent_sources: BTreeMap<String, Vec<FrequentSource>>,
    pub max_post_engagement: BTreeMap<String, TopEngagement>,
    pub meta: SummaryMeta,
}

#[derive(Debug, Clone)]
pub struct SummaryOptions {
    pub top_k: usize,
    /// Topics to report even when no post carries them.
    pub topics: Vec<String>,
    pub generated_at: DateTime<Utc>,
    pub config_hash: String,
}

impl Default for SummaryOptions {
    fn default() -> Self {
        Self {
            top_k: DEFAULT_TOP_K,
            topics: Vec::new(),
            generated_at: Utc::now(),
            config_hash: String::new(),
        }
    }
}

pub fn summarize(posts: &[AnnotatedPost], k: usize) -> DashboardSummary {
    summarize_with(posts, &SummaryOptions { top_k: k, ..SummaryOptions::default() })
}

fn percent(part: u64, whole: u64) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

#[derive(Default)]
struct TopicAcc<'a> {
    count: usize,
    leanings: LeaningCounts,
    engagement: EngagementTotals,
    source_types: SourceTypeCounts,
    bots: usize,
    sources: HashMap<&'a str, (usize, &'a str, Category)>,
    top: Option<(&'a str, u64)>,
}

/// Computes every aggregate in one pass over `posts`.
pub fn summarize_with(posts: &[AnnotatedPost], opts: &SummaryOptions) -> DashboardSummary {
    let mut acc: BTreeMap<&str, TopicAcc> = opts.topics.iter().map(|t| (t.as_str(), TopicAcc::default())).collect();
    let mut total = EngagementTotals::default();
    let mut hasher_input = Vec::new();

    for ap in posts {
        let a = acc.entry(ap.topic.topic.as_str()).or_default();
        a.count += 1;
        a.leanings.bump(ap.leaning_label.label);
        a.engagement.comments += ap.post.comments;
        a.engagement.shares += ap.post.shares;
        a.source_types.bump(ap.source_category.category);
        if ap.bot.is_bot {
            a.bots += 1;
        }
        let e = a
            .sources
            .entry(ap.post.source_id.as_str())
            .or_insert((0, ap.source_name.as_str(), ap.source_category.category));
        e.0 += 1;
        let eng = ap.post.engagement();
        if a.top.is_none_or(|(_, best)| eng > best) {
            a.top = Some((ap.post.post_id.as_str(), eng));
        }
        total.comments += ap.post.comments;
        total.shares += ap.post.shares;
        hasher_input.extend(serde_json::to_vec(&ap.post).expect("post serializes"));
        hasher_input.push(b'\n');
    }

    let mut s = DashboardSummary {
        posts_per_topic: BTreeMap::new(),
        leaning_distribution: BTreeMap::new(),
        leaning_counts: BTreeMap::new(),
        engagement_share: BTreeMap::new(),
        engagement_totals: BTreeMap::new(),
        posts_per_source_type: BTreeMap::new(),
        bot_share: BTreeMap::new(),
        frequent_sources: BTreeMap::new(),
        max_post_engagement: BTreeMap::new(),
        meta: SummaryMeta {
            generated_at: opts.generated_at,
            corpus_hash: sha256_hex(&hasher_input),
            config_hash: opts.config_hash.clone(),
            post_count: posts.len(),
            top_k: opts.top_k,
        },
    };

    for (topic, a) in acc {
        let topic = topic.to_string();
        s.posts_per_topic.insert(topic.clone(), a.count);
        if a.count == 0 {
            continue;
        }
        let n = a.count as u64;
        s.leaning_distribution.insert(
            topic.clone(),
            LeaningShare {
                neutral: percent(a.leanings.neutral as u64, n),
                conservative: percent(a.leanings.conservative as u64, n),
                liberal: percent(a.leanings.liberal as u64, n),
            },
        );
        s.leaning_counts.insert(topic.clone(), a.leanings);
        s.engagement_share.insert(
            topic.clone(),
            EngagementShare {
                comments: percent(a.engagement.comments, total.comments),
                shares: percent(a.engagement.shares, total.shares),
            },
        );
        s.engagement_totals.insert(topic.clone(), a.engagement);
        s.posts_per_source_type.insert(topic.clone(), a.source_types);
        s.bot_share.insert(topic.clone(), percent(a.bots as u64, n));

        let mut ranked: Vec<FrequentSource> = a
            .sources
            .into_iter()
            .map(|(id, (count, name, category))| FrequentSource {
                source_id: id.to_string(),
                source_name: name.to_string(),
                category,
                count,
            })
            .collect();
        ranked.sort_by(|x, y| {
            y.count
                .cmp(&x.count)
                .then_with(|| x.source_name.cmp(&y.source_name))
                .then_with(|| x.source_id.cmp(&y.source_id))
        });
        ranked.truncate(opts.top_k);
        s.frequent_sources.insert(topic.clone(), ranked);

        if let Some((post_id, engagement)) = a.top {
            s.max_post_engagement.insert(
                topic,
                TopEngagement { post_id: post_id.to_string(), engagement },
            );
        }
    }
    s
}

/// Posts of `topic`, optionally of one leaning, most engaging first.
pub fn deep_dive<'a>(
    posts: &'a [AnnotatedPost],
    known_topics: &[String],
    topic: &str,
    leaning: Option<Leaning>,
) -> Result<Vec<&'a AnnotatedPost>> {
    if !known_topics.iter().any(|t| t == topic) {
        return Err(Error::not_found("topic", topic));
    }
    let mut out: Vec<&AnnotatedPost> = posts
        .iter()
        .filter(|p| p.topic.topic == topic)
        .filter(|p| leaning.is_none_or(|l| p.leaning_label.label == l))
        .collect();
    out.sort_by_key(|p| std::cmp::Reverse(p.post.engagement()));
    Ok(out)
}
