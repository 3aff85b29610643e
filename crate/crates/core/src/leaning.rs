//! Per-post political leaning.
//!
//! Three rules, first match wins:
//! 1. the post's page represents listed websites: the score is their mean
//!    leaning `b_w`;
//! 2. the post mentions listed websites or actors: the score is `b_a * s`,
//!    the pooled mean leaning of the mentions times the post sentiment;
//! 3. otherwise the post is neutral with score 0.
//!
//! Scores run from -1 (liberal) to +1 (conservative).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ingest::{Post, Source};
use crate::kb::KnowledgeBase;
use crate::text::tokenize;

pub const DEFAULT_EPSILON: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentimentScore {
    pub s: f64,
    pub matched_token_count: usize,
}

/// Anything that maps text to a sentiment in [-1, +1].
pub trait SentimentScorer {
    fn score(&self, text: &str) -> SentimentScore;
}

/// Mean weight of the lexicon tokens in the text, counting repeats.
pub fn sentiment_score(text: &str, lexicon: &HashMap<String, f64>) -> SentimentScore {
    let weights: Vec<f64> = tokenize(text)
        .iter()
        .filter_map(|t| lexicon.get(t).copied())
        .collect();
    if weights.is_empty() {
        return SentimentScore { s: 0.0, matched_token_count: 0 };
    }
    let mean = weights.iter().sum::<f64>() / weights.len() as f64;
    SentimentScore {
        s: mean.clamp(-1.0, 1.0),
        matched_token_count: weights.len(),
    }
}

pub struct LexiconSentiment<'a>(pub &'a HashMap<String, f64>);

impl SentimentScorer for LexiconSentiment<'_> {
    fn score(&self, text: &str) -> SentimentScore {
        sentiment_score(text, self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeaningRule {
    PageWebsite,
    Mentions,
    NeutralDefault,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaningScore {
    pub b_w: Option<f64>,
    pub b_a: Option<f64>,
    pub s: Option<f64>,
    #[serde(rename = "final")]
    pub final_score: f64,
    pub rule_used: LeaningRule,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

pub fn leaning_score(post: &Post, source: Option<&Source>, kb: &KnowledgeBase) -> LeaningScore {
    leaning_score_with(post, source, kb, &LexiconSentiment(&kb.sentiment_lexicon))
}

pub fn leaning_score_with(
    post: &Post,
    source: Option<&Source>,
    kb: &KnowledgeBase,
    scorer: &dyn SentimentScorer,
) -> LeaningScore {
    let page_sites = source.map(|s| kb.websites_for_page(&s.name)).unwrap_or_default();
    if let Some(b_w) = mean(page_sites.iter().map(|(_, s)| *s)) {
        let b_w = b_w.clamp(-1.0, 1.0);
        return LeaningScore {
            b_w: Some(b_w),
            b_a: None,
            s: None,
            final_score: b_w,
            rule_used: LeaningRule::PageWebsite,
        };
    }

    let mentions = kb.match_entities(&post.text);
    if let Some(b_a) = mean(mentions.pooled_scores()) {
        let b_a = b_a.clamp(-1.0, 1.0);
        let s = scorer.score(&post.text).s.clamp(-1.0, 1.0);
        return LeaningScore {
            b_w: None,
            b_a: Some(b_a),
            s: Some(s),
            final_score: (b_a * s).clamp(-1.0, 1.0),
            rule_used: LeaningRule::Mentions,
        };
    }

    LeaningScore {
        b_w: None,
        b_a: None,
        s: None,
        final_score: 0.0,
        rule_used: LeaningRule::NeutralDefault,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Leaning {
    Neutral,
    Conservative,
    Liberal,
}

impl Leaning {
    pub const ALL: [Leaning; 3] = [Leaning::Neutral, Leaning::Conservative, Leaning::Liberal];

    pub fn as_str(self) -> &'static str {
        match self {
            Leaning::Neutral => "neutral",
            Leaning::Conservative => "conservative",
            Leaning::Liberal => "liberal",
        }
    }
}

impl fmt::Display for Leaning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Leaning {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "neutral" => Ok(Leaning::Neutral),
            "conservative" => Ok(Leaning::Conservative),
            "liberal" => Ok(Leaning::Liberal),
            other => Err(format!("unknown leaning {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeaningLabel {
    pub label: Leaning,
    pub epsilon: f64,
}

pub fn leaning_label(score: &LeaningScore, epsilon: f64) -> LeaningLabel {
    let f = score.final_score;
    let label = if f < -epsilon {
        Leaning::Liberal
    } else if f > epsilon {
        Leaning::Conservative
    } else {
        Leaning::Neutral
    };
    LeaningLabel { label, epsilon }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::SourceKind;

    fn post(text: &str) -> Post {
        Post {
            post_id: "p".into(),
            source_id: "s".into(),
            text: text.into(),
            created_at: "2022-10-01T00:00:00Z".parse().unwrap(),
            likes: 0,
            comments: 0,
            shares: 0,
            language_hint: None,
        }
    }

    fn source(name: &str) -> Source {
        Source {
            source_id: "s".into(),
            name: name.into(),
            description: String::new(),
            kind_hint: SourceKind::Page,
        }
    }

    fn kb() -> KnowledgeBase {
        KnowledgeBase::builder()
            .website("nytimes.com", -0.6)
            .website("breitbart.com", 0.9)
            .page_website("The New York Times", "nytimes.com")
            .actor("ted cruz", 0.8)
            .actor("joe biden", -0.8)
            .sentiment("terrible", -1.0)
            .sentiment("awful", -0.5)
            .sentiment("good", 1.0)
            .sentiment("bad", -1.0)
            .build()
    }

    fn lexicon(pairs: &[(&str, f64)]) -> HashMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn sentiment_means() {
        let lex = lexicon(&[("good", 1.0), ("bad", -1.0)]);
        let s = sentiment_score("good good bad", &lex);
        assert!((s.s - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.matched_token_count, 3);
        assert_eq!(sentiment_score("neutral words only", &lex), SentimentScore { s: 0.0, matched_token_count: 0 });
        let s = sentiment_score("terrible terrible", &lexicon(&[("terrible", -1.0)]));
        assert_eq!(s.s, -1.0);
    }

    #[test]
    fn page_website_rule() {
        let sc = leaning_score(&post("Ted Cruz is terrible"), Some(&source("The New York Times")), &kb());
        assert_eq!(sc.rule_used, LeaningRule::PageWebsite);
        assert_eq!(sc.final_score, -0.6);
        assert_eq!(sc.b_w, Some(-0.6));
    }

    #[test]
    fn mentions_rule_multiplies() {
        // Actor +0.8 with sentiment -0.5.
        let sc = leaning_score(&post("Ted Cruz was awful"), Some(&source("Citizens")), &kb());
        assert_eq!(sc.rule_used, LeaningRule::Mentions);
        assert_eq!(sc.b_a, Some(0.8));
        assert_eq!(sc.s, Some(-0.5));
        assert!((sc.final_score - -0.4).abs() < 1e-12);
    }

    #[test]
    fn mentions_pool_actors_and_websites() {
        let sc = leaning_score(&post("joe biden on breitbart.com good"), None, &kb());
        let b_a = (-0.8 + 0.9) / 2.0;
        assert!((sc.b_a.unwrap() - b_a).abs() < 1e-12);
        assert!((sc.final_score - b_a).abs() < 1e-12);
    }

    #[test]
    fn neutral_default() {
        let sc = leaning_score(&post("weather is good"), Some(&source("Citizens")), &kb());
        assert_eq!(sc.rule_used, LeaningRule::NeutralDefault);
        assert_eq!(sc.final_score, 0.0);
        assert_eq!(leaning_label(&sc, DEFAULT_EPSILON).label, Leaning::Neutral);
    }

    #[test]
    fn label_thresholds() {
        let mk = |f| LeaningScore { b_w: None, b_a: None, s: None, final_score: f, rule_used: LeaningRule::Mentions };
        assert_eq!(leaning_label(&mk(-0.4), 0.1).label, Leaning::Liberal);
        assert_eq!(leaning_label(&mk(0.05), 0.1).label, Leaning::Neutral);
        assert_eq!(leaning_label(&mk(0.11), 0.1).label, Leaning::Conservative);
        assert_eq!(leaning_label(&mk(0.1), 0.1).label, Leaning::Neutral);
        assert_eq!(leaning_label(&mk(-0.1), 0.1).label, Leaning::Neutral);
        assert_eq!(leaning_label(&mk(0.0), 0.0).label, Leaning::Neutral);
    }

    #[test]
    fn serialized_field_is_final() {
        let sc = leaning_score(&post("nothing"), None, &kb());
        let json = serde_json::to_value(&sc).unwrap();
        assert_eq!(json["final"], 0.0);
        assert_eq!(json["rule_used"], "neutral_default");
    }
}
