//! Seeded synthetic corpora for tests, benchmarks, and acceptance checks.
//!
//! Every generator is deterministic in its seed.

use chrono::{DateTime, Duration, Utc};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bot::{BotLabel, BotVerdict};
use crate::ingest::{Corpus, Post, Source, SourceKind};
use crate::kb::KnowledgeBase;
use crate::leaning::{Leaning, LeaningLabel, LeaningRule, LeaningScore, DEFAULT_EPSILON};
use crate::source::{Category, Origin, SourceCategory};
use crate::topic::{TopicAssignment, TopicConfig, TopicMethod, TopicSpec};
use crate::void::AnnotatedPost;

pub const TOPIC_NAMES: [&str; 11] = [
    "immigration",
    "economy",
    "health",
    "education",
    "climate",
    "crime",
    "elections",
    "housing",
    "technology",
    "abortion",
    "race",
];

fn epoch() -> DateTime<Utc> {
    "2022-10-01T00:00:00Z".parse().expect("valid timestamp")
}

fn post(id: String, source_id: &str, text: String, ts: DateTime<Utc>, comments: u64, shares: u64) -> Post {
    Post {
        post_id: id,
        source_id: source_id.to_string(),
        text,
        created_at: ts,
        likes: comments + shares,
        comments,
        shares,
        language_hint: None,
    }
}

fn source(id: &str, name: &str, kind: SourceKind) -> Source {
    Source {
        source_id: id.to_string(),
        name: name.to_string(),
        description: String::new(),
        kind_hint: kind,
    }
}

/// A separable topic corpus: each topic has its own keywords and topical
/// vocabulary, mixed with shared filler words. About one post in ten carries
/// no keyword so weak labeling must skip it.
pub fn topic_benchmark(n_topics: usize, posts_per_topic: usize, seed: u64) -> (Corpus, TopicConfig) {
    assert!((2..=TOPIC_NAMES.len()).contains(&n_topics));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let config = TopicConfig::new(
        TOPIC_NAMES[..n_topics]
            .iter()
            .map(|t| TopicSpec {
                name: t.to_string(),
                keywords: (0..4).map(|i| format!("{t}kw{i}")).collect(),
            })
            .collect(),
    )
    .expect("valid synthetic config");
    let filler: Vec<String> = (0..60).map(|i| format!("filler{i}")).collect();
    let sources = vec![source("s0", "Community Page", SourceKind::Page)];
    let mut posts = Vec::with_capacity(n_topics * posts_per_topic);
    for i in 0..n_topics * posts_per_topic {
        let t = TOPIC_NAMES[i % n_topics];
        let mut words: Vec<String> = Vec::new();
        if rng.random_range(0..10) > 0 {
            for _ in 0..rng.random_range(1..=2) {
                words.push(format!("{t}kw{}", rng.random_range(0..4)));
            }
        }
        for _ in 0..rng.random_range(3..=6) {
            words.push(format!("{t}w{}", rng.random_range(0..15)));
        }
        for _ in 0..rng.random_range(4..=8) {
            words.push(filler.choose(&mut rng).expect("non-empty").clone());
        }
        words.shuffle(&mut rng);
        posts.push(post(
            format!("t{i}"),
            "s0",
            words.join(" "),
            epoch() + Duration::minutes(i as i64),
            rng.random_range(0..50),
            rng.random_range(0..50),
        ));
    }
    (Corpus::from_parts(posts, sources).expect("consistent corpus"), config)
}

/// Knowledge base and corpus exercising all three leaning rules, with both
/// signs of mention leaning and of sentiment.
pub fn leaning_fixture(n_posts: usize, seed: u64) -> (Corpus, KnowledgeBase) {
    let kb = KnowledgeBase::builder()
        .website("leftnews.com", -0.7)
        .website("rightwire.com", 0.8)
        .website("centerpost.org", 0.1)
        .website("redstatedaily.com", 0.6)
        .page_website("Left News Page", "leftnews.com")
        .page_website("Right Wire Official", "rightwire.com")
        .actor("jane left", -0.9)
        .actor("john right", 0.7)
        .actor("maria centro", 0.2)
        .actor("sam", 0.5)
        .sentiment("good", 0.8)
        .sentiment("great", 1.0)
        .sentiment("bad", -0.7)
        .sentiment("terrible", -1.0)
        .sentiment("fine", 0.3)
        .build();
    let sources = vec![
        source("w1", "Left News Page", SourceKind::Page),
        source("w2", "Right Wire Official", SourceKind::Page),
        source("w3", "CenterPost", SourceKind::Page),
        source("c1", "Neighbors United", SourceKind::Group),
        source("c2", "Valley Parents", SourceKind::Group),
        source("c3", "Latinos Conservadores", SourceKind::Group),
    ];
    let sites = ["leftnews.com", "rightwire.com", "centerpost.org", "redstatedaily.com", "unlisted.net"];
    let actors = ["Jane Left", "John Right", "Maria Centro", "Sam", "Samantha"];
    let moods = ["good", "great", "bad", "terrible", "fine"];
    let filler = ["today", "the", "city", "council", "voted", "on", "a", "plan", "people", "said", "news"];

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut posts = Vec::with_capacity(n_posts);
    for i in 0..n_posts {
        let src = &sources[rng.random_range(0..sources.len())];
        let mut words: Vec<String> = (0..rng.random_range(3..8))
            .map(|_| filler.choose(&mut rng).expect("non-empty").to_string())
            .collect();
        if rng.random_bool(0.5) {
            let site = sites.choose(&mut rng).expect("non-empty");
            words.push(if rng.random_bool(0.5) { format!("https://{site}/story/{i}") } else { site.to_string() });
        }
        if rng.random_bool(0.5) {
            words.push(actors.choose(&mut rng).expect("non-empty").to_string());
        }
        for _ in 0..rng.random_range(0..3) {
            words.push(moods.choose(&mut rng).expect("non-empty").to_string());
        }
        words.shuffle(&mut rng);
        posts.push(post(
            format!("l{i}"),
            &src.source_id,
            words.join(" "),
            epoch() + Duration::minutes(i as i64),
            rng.random_range(0..20),
            rng.random_range(0..20),
        ));
    }
    (Corpus::from_parts(posts, sources).expect("consistent corpus"), kb)
}

/// Bots post repetitive hashtag- and link-heavy text in bursts; humans post
/// varied prose at a slow pace.
pub fn bot_fixture(per_class: usize, seed: u64) -> (Corpus, Vec<BotLabel>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spam = ["breaking", "share", "now", "truth", "exposed", "wake", "up", "click"];
    let prose = [
        "our", "neighborhood", "meeting", "was", "long", "but", "useful", "and", "we", "talked",
        "about", "schools", "roads", "families", "weekend", "market", "library", "volunteers",
        "thanks", "everyone", "who", "came", "tonight", "discussion", "garden", "project",
    ];
    let sources = vec![
        source("bots", "Amplifier Network", SourceKind::Page),
        source("humans", "Neighborhood Forum", SourceKind::Group),
    ];
    let mut posts = Vec::new();
    let mut labels = Vec::new();
    for i in 0..per_class {
        let mut words: Vec<String> = Vec::new();
        let word = spam.choose(&mut rng).expect("non-empty");
        for _ in 0..rng.random_range(4..8) {
            words.push(word.to_string());
        }
        for _ in 0..rng.random_range(1..=3) {
            words.push(format!("https://spam{}.example/{}", rng.random_range(0..5), rng.random_range(0..1000)));
        }
        for _ in 0..rng.random_range(2..=5) {
            words.push(format!("#{}", spam.choose(&mut rng).expect("non-empty")));
        }
        let id = format!("b{i}");
        posts.push(post(id.clone(), "bots", words.join(" "), epoch() + Duration::seconds(20 * i as i64), 0, 1));
        labels.push(BotLabel { post_id: id, is_bot: true });
    }
    for i in 0..per_class {
        let mut words: Vec<&str> = prose.to_vec();
        words.shuffle(&mut rng);
        words.truncate(rng.random_range(8..16));
        let id = format!("h{i}");
        posts.push(post(id.clone(), "humans", words.join(" "), epoch() + Duration::hours(3 * i as i64), 2, 1));
        labels.push(BotLabel { post_id: id, is_bot: false });
    }
    (Corpus::from_parts(posts, sources).expect("consistent corpus"), labels)
}

#[allow(clippy::too_many_arguments)]
pub fn annotated_post(
    post_id: &str,
    source_id: &str,
    topic: &str,
    leaning: Leaning,
    category: Category,
    is_bot: bool,
    comments: u64,
    shares: u64,
) -> AnnotatedPost {
    let final_score = match leaning {
        Leaning::Liberal => -0.5,
        Leaning::Conservative => 0.5,
        Leaning::Neutral => 0.0,
    };
    AnnotatedPost {
        post: post(post_id.to_string(), source_id, format!("{topic} post {post_id}"), epoch(), comments, shares),
        source_name: format!("Source {source_id}"),
        source_category: SourceCategory { category, origin: Origin::Automatic, matched_evidence: None },
        topic: TopicAssignment {
            post_id: post_id.to_string(),
            topic: topic.to_string(),
            confidence: 1.0,
            method: TopicMethod::Model,
        },
        leaning: LeaningScore {
            b_w: None,
            b_a: None,
            s: None,
            final_score,
            rule_used: if leaning == Leaning::Neutral { LeaningRule::NeutralDefault } else { LeaningRule::PageWebsite },
        },
        leaning_label: LeaningLabel { label: leaning, epsilon: DEFAULT_EPSILON },
        bot: BotVerdict {
            post_id: post_id.to_string(),
            probability: if is_bot { 0.9 } else { 0.1 },
            is_bot,
        },
    }
}

/// Topics {A, A, B, B} with leanings {liberal, conservative, neutral,
/// neutral}; A has 30 comments in total, B 70; one of the two A posts is a
/// bot.
pub fn four_post_fixture() -> Vec<AnnotatedPost> {
    vec![
        annotated_post("p1", "s1", "A", Leaning::Liberal, Category::Citizen, true, 10, 5),
        annotated_post("p2", "s2", "A", Leaning::Conservative, Category::NewsMedia, false, 20, 5),
        annotated_post("p3", "s1", "B", Leaning::Neutral, Category::Citizen, false, 30, 10),
        annotated_post("p4", "s3", "B", Leaning::Neutral, Category::Political, false, 40, 20),
    ]
}

/// Uniformly random annotations over `n_topics` topics and 40 sources.
pub fn random_annotated(n: usize, n_topics: usize, seed: u64) -> Vec<AnnotatedPost> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let topic = format!("topic{}", rng.random_range(0..n_topics));
            let leaning = *Leaning::ALL.choose(&mut rng).expect("non-empty");
            let category = *Category::ALL.choose(&mut rng).expect("non-empty");
            annotated_post(
                &format!("r{i}"),
                &format!("s{}", rng.random_range(0..40)),
                &topic,
                leaning,
                category,
                rng.random_bool(0.2),
                rng.random_range(0..100) + u64::from(i == 0),
                rng.random_range(0..100) + u64::from(i == 0),
            )
        })
        .collect()
}

/// A corpus with two planted voids: `sparse_topic` has far fewer posts than
/// the median topic, `one_sided_topic` has no conservative posts.
pub struct PlantedVoids {
    pub posts: Vec<AnnotatedPost>,
    pub sparse_topic: String,
    pub one_sided_topic: String,
}

pub fn planted_voids(seed: u64) -> PlantedVoids {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_topics = rng.random_range(5..=11);
    let names: Vec<String> = TOPIC_NAMES[..n_topics].iter().map(|s| s.to_string()).collect();
    let sparse = rng.random_range(0..n_topics);
    let one_sided = (sparse + rng.random_range(1..n_topics)) % n_topics;

    let mut posts = Vec::new();
    for (t, name) in names.iter().enumerate() {
        // Regular topics have 80-150 posts, so a quarter of the median is at
        // least 20 and the sparse topic stays below it.
        let count = if t == sparse { rng.random_range(1..=15) } else { rng.random_range(80..=150) };
        for _ in 0..count {
            let leaning = if t == one_sided {
                *[Leaning::Neutral, Leaning::Liberal].choose(&mut rng).expect("non-empty")
            } else {
                *Leaning::ALL.choose(&mut rng).expect("non-empty")
            };
            let category = *Category::ALL.choose(&mut rng).expect("non-empty");
            let id = format!("v{}", posts.len());
            posts.push(annotated_post(
                &id,
                &format!("s{}", rng.random_range(0..25)),
                name,
                leaning,
                category,
                rng.random_bool(0.1),
                rng.random_range(1..60),
                rng.random_range(1..60),
            ));
        }
    }
    posts.shuffle(&mut rng);
    PlantedVoids {
        posts,
        sparse_topic: names[sparse].clone(),
        one_sided_topic: names[one_sided].clone(),
    }
}
