use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::digest::json_hash;
use crate::error::{Error, Result};
use crate::text::{tokenize, Phrase};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicSpec {
    pub name: String,
    pub keywords: Vec<String>,
}

/// Ordered topics with their keyword phrases. Order matters: it breaks ties
/// between topics with equal keyword hits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicConfig {
    pub topics: Vec<TopicSpec>,
}

impl TopicConfig {
    pub fn new(topics: Vec<TopicSpec>) -> Result<Self> {
        let config = Self { topics };
        config.validate()?;
        Ok(config)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(json)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.topics.len() < 2 {
            return Err(Error::InvalidConfig("at least two topics are required".into()));
        }
        let mut names = HashSet::new();
        for t in &self.topics {
            if t.name.trim().is_empty() {
                return Err(Error::InvalidConfig("topic name must not be empty".into()));
            }
            if !names.insert(t.name.as_str()) {
                return Err(Error::InvalidConfig(format!("duplicate topic {}", t.name)));
            }
            if t.keywords.iter().all(|k| tokenize(k).is_empty()) {
                return Err(Error::InvalidConfig(format!("topic {} has no keywords", t.name)));
            }
        }
        Ok(())
    }

    pub fn names(&self) -> Vec<String> {
        self.topics.iter().map(|t| t.name.clone()).collect()
    }

    pub fn contains(&self, topic: &str) -> bool {
        self.topics.iter().any(|t| t.name == topic)
    }

    pub fn hash(&self) -> String {
        json_hash(self)
    }

    pub fn matcher(&self) -> KeywordMatcher {
        KeywordMatcher {
            topics: self
                .topics
                .iter()
                .map(|t| {
                    let mut phrases: Vec<Phrase> =
                        t.keywords.iter().map(|k| Phrase::new(k)).filter(|p| !p.is_empty()).collect();
                    // "Health" and "health" are the same keyword.
                    phrases.sort_by(|a, b| a.tokens.cmp(&b.tokens));
                    phrases.dedup_by(|a, b| a.tokens == b.tokens);
                    phrases
                })
                .collect(),
        }
    }
}

/// Pre-tokenized keyword phrases per topic, in config order.
#[derive(Debug, Clone)]
pub struct KeywordMatcher {
    topics: Vec<Vec<Phrase>>,
}

impl KeywordMatcher {
    /// Distinct keywords of each topic found in `tokens`.
    pub fn hits(&self, tokens: &[String]) -> Vec<usize> {
        self.topics
            .iter()
            .map(|phrases| phrases.iter().filter(|p| p.occurs_in(tokens)).count())
            .collect()
    }

    /// Index of the topic with the most distinct keyword hits; the earliest
    /// topic wins ties. `None` when nothing matches.
    pub fn best_topic(&self, tokens: &[String]) -> Option<usize> {
        let hits = self.hits(tokens);
        let mut best: Option<(usize, usize)> = None;
        for (i, &h) in hits.iter().enumerate() {
            if h > 0 && best.is_none_or(|(_, bh)| h > bh) {
                best = Some((i, h));
            }
        }
        best.map(|(i, _)| i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn spec(name: &str, kws: &[&str]) -> TopicSpec {
        TopicSpec { name: name.into(), keywords: kws.iter().map(|s| s.to_string()).collect() }
    }

    #[test]
    fn validation() {
        assert!(TopicConfig::new(vec![spec("a", &["x"])]).is_err());
        assert!(TopicConfig::new(vec![spec("a", &["x"]), spec("a", &["y"])]).is_err());
        assert!(TopicConfig::new(vec![spec("a", &["x"]), spec("b", &[])]).is_err());
        assert!(TopicConfig::new(vec![spec("a", &["x"]), spec("b", &["  "])]).is_err());
        assert!(TopicConfig::new(vec![spec("a", &["x"]), spec("b", &["y"])]).is_ok());
    }

    #[test]
    fn parses_topics_json() {
        let c = TopicConfig::from_json(
            r#"{"topics":[{"name":"economy","keywords":["jobs","inflation"]},{"name":"health","keywords":["vaccine"]}]}"#,
        )
        .unwrap();
        assert_eq!(c.names(), ["economy", "health"]);
        assert_eq!(c.hash(), c.clone().hash());
        assert!(TopicConfig::from_json(r#"{"topics":[]}"#).is_err());
    }

    #[test]
    fn max_hits_and_tie_rule() {
        let c = TopicConfig::new(vec![
            spec("health", &["vaccine", "hospital"]),
            spec("economy", &["jobs", "inflation", "gas prices"]),
        ])
        .unwrap();
        let m = c.matcher();
        // Two economy keywords beat one health keyword.
        assert_eq!(m.best_topic(&tokenize("Jobs, inflation and a vaccine")), Some(1));
        // One each: first topic in config order wins.
        assert_eq!(m.best_topic(&tokenize("vaccine jobs")), Some(0));
        // Repeats of one keyword count once.
        assert_eq!(m.hits(&tokenize("jobs jobs jobs vaccine hospital")), vec![2, 1]);
        assert_eq!(m.best_topic(&tokenize("gas prices")), Some(1));
        assert_eq!(m.best_topic(&tokenize("gas is cheap")), None);
    }
}
