use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::ingest::Corpus;
use crate::ingest::Post;
use crate::text::tokenize;

pub const FEATURE_VERSION: u32 = 1;
/// Hashed token-frequency buckets.
pub const HASH_BUCKETS: usize = 64;
pub const FEATURE_DIM: usize = HASH_BUCKETS + 5;
/// Two posts from one source this close together count as a burst.
pub const BURST_WINDOW_SECS: i64 = 60;

const URL_COUNT: usize = HASH_BUCKETS;
const HASHTAG_COUNT: usize = HASH_BUCKETS + 1;
const MEAN_TOKEN_LEN: usize = HASH_BUCKETS + 2;
const REPETITION: usize = HASH_BUCKETS + 3;
const BURST: usize = HASH_BUCKETS + 4;

/// Fixed-length feature vector: token frequencies hashed into
/// [`HASH_BUCKETS`] buckets, then URL count, hashtag count, mean token
/// length, repetition ratio and a posting-burst flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BotFeatures(pub Vec<f64>);

impl BotFeatures {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn url_count(&self) -> f64 {
        self.0[URL_COUNT]
    }

    pub fn hashtag_count(&self) -> f64 {
        self.0[HASHTAG_COUNT]
    }

    pub fn mean_token_length(&self) -> f64 {
        self.0[MEAN_TOKEN_LEN]
    }

    pub fn repetition_ratio(&self) -> f64 {
        self.0[REPETITION]
    }

    pub fn burst(&self) -> bool {
        self.0[BURST] > 0.0
    }

    pub fn token_buckets(&self) -> &[f64] {
        &self.0[..HASH_BUCKETS]
    }
}

// FNV-1a; stable across platforms and releases, unlike std's hasher.
fn bucket(token: &str) -> usize {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in token.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    (h % HASH_BUCKETS as u64) as usize
}

pub fn extract_bot_features(post: &Post) -> BotFeatures {
    extract_bot_features_with_burst(post, false)
}

pub fn extract_bot_features_with_burst(post: &Post, burst: bool) -> BotFeatures {
    let mut v = vec![0.0; FEATURE_DIM];
    let tokens = tokenize(&post.text);
    if !tokens.is_empty() {
        let n = tokens.len() as f64;
        for t in &tokens {
            v[bucket(t)] += 1.0 / n;
        }
        v[MEAN_TOKEN_LEN] = tokens.iter().map(|t| t.chars().count()).sum::<usize>() as f64 / n;
        let distinct = tokens.iter().collect::<HashSet<_>>().len() as f64;
        v[REPETITION] = 1.0 - distinct / n;
    }
    let chunks = || post.text.split_whitespace();
    v[URL_COUNT] = chunks()
        .filter(|c| {
            let c = c.to_ascii_lowercase();
            c.contains("http://") || c.contains("https://") || c.starts_with("www.")
        })
        .count() as f64;
    v[HASHTAG_COUNT] = chunks()
        .filter(|c| c.starts_with('#') && c.chars().nth(1).is_some_and(char::is_alphanumeric))
        .count() as f64;
    v[BURST] = if burst { 1.0 } else { 0.0 };
    BotFeatures(v)
}

/// Flags posts that have another post from the same source within
/// [`BURST_WINDOW_SECS`].
pub fn burst_flags(corpus: &Corpus) -> HashMap<String, bool> {
    let mut by_source: HashMap<&str, Vec<&Post>> = HashMap::new();
    for p in corpus.posts() {
        by_source.entry(p.source_id.as_str()).or_default().push(p);
    }
    let mut flags: HashMap<String, bool> =
        corpus.posts().iter().map(|p| (p.post_id.clone(), false)).collect();
    for posts in by_source.values_mut() {
        posts.sort_by_key(|p| p.created_at);
        for pair in posts.windows(2) {
            if (pair[1].created_at - pair[0].created_at).num_seconds() <= BURST_WINDOW_SECS {
                flags.insert(pair[0].post_id.clone(), true);
                flags.insert(pair[1].post_id.clone(), true);
            }
        }
    }
    flags
}
