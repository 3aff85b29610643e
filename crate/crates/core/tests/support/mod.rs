//! Independent oracles shared by the integration and acceptance tests.
//! Nothing here calls the library's matching, scoring, or labeling code.
#![allow(dead_code)]

use std::collections::HashMap;

use voidlens::leaning::LeaningRule;
use voidlens::topic::TopicConfig;

/// Independent keyword recount: ASCII-lowercase, split on anything that is
/// not alphanumeric, count each keyword phrase at most once.
pub fn recount(text: &str, config: &TopicConfig) -> Option<usize> {
    let words: Vec<String> = text
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(|w| w.to_lowercase())
        .collect();
    let mut best: Option<(usize, usize)> = None;
    for (t, spec) in config.topics.iter().enumerate() {
        let mut distinct: Vec<Vec<String>> = spec
            .keywords
            .iter()
            .map(|k| k.split_whitespace().map(str::to_lowercase).collect::<Vec<_>>())
            .collect();
        distinct.sort();
        distinct.dedup();
        let hits = distinct
            .iter()
            .filter(|kw| !kw.is_empty() && words.windows(kw.len()).any(|w| w == kw.as_slice()))
            .count();
        if hits > 0 && best.is_none_or(|(_, b)| hits > b) {
            best = Some((t, hits));
        }
    }
    best.map(|(t, _)| t)
}

/// Straight-line leaning cascade over the tables `synth::leaning_fixture`
/// ships.
pub struct Oracle {
    websites: HashMap<&'static str, f64>,
    actors: Vec<(Vec<&'static str>, f64)>,
    pages: HashMap<&'static str, f64>,
    lexicon: HashMap<&'static str, f64>,
}

pub fn oracle() -> Oracle {
    Oracle {
        websites: HashMap::from([
            ("leftnews.com", -0.7),
            ("rightwire.com", 0.8),
            ("centerpost.org", 0.1),
            ("redstatedaily.com", 0.6),
        ]),
        actors: vec![
            (vec!["jane", "left"], -0.9),
            (vec!["john", "right"], 0.7),
            (vec!["maria", "centro"], 0.2),
            (vec!["sam"], 0.5),
        ],
        // Page name -> mean website score; "CenterPost" resolves by name.
        pages: HashMap::from([
            ("Left News Page", -0.7),
            ("Right Wire Official", 0.8),
            ("CenterPost", 0.1),
        ]),
        lexicon: HashMap::from([("good", 0.8), ("great", 1.0), ("bad", -0.7), ("terrible", -1.0), ("fine", 0.3)]),
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

impl Oracle {
    pub fn score(&self, page: &str, text: &str) -> (LeaningRule, f64) {
        if let Some(&b_w) = self.pages.get(page) {
            return (LeaningRule::PageWebsite, b_w);
        }
        let lower = text.to_lowercase();
        let words: Vec<&str> = lower.split(' ').collect();

        let mut mentioned: Vec<f64> = Vec::new();
        let mut sites: Vec<&str> = Vec::new();
        for w in &words {
            let host = w.trim_start_matches("https://").split('/').next().unwrap();
            if let Some(&s) = self.websites.get(host) {
                if !sites.contains(&host) {
                    sites.push(host);
                    mentioned.push(s);
                }
            }
        }
        for (name, s) in &self.actors {
            if words.windows(name.len()).any(|w| w == name.as_slice()) {
                mentioned.push(*s);
            }
        }
        if mentioned.is_empty() {
            return (LeaningRule::NeutralDefault, 0.0);
        }
        let weights: Vec<f64> = words.iter().filter_map(|w| self.lexicon.get(w).copied()).collect();
        let s = if weights.is_empty() { 0.0 } else { mean(&weights) };
        (LeaningRule::Mentions, mean(&mentioned) * s)
    }
}

