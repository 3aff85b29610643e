//! Tokenization and name canonicalization shared by every engine.
//!
//! Tokens are Unicode words, lower-cased, without stemming. Phrases (keywords,
//! actor names, news-site names) are matched as contiguous token runs, so a
//! phrase never matches part of a word.

use unicode_segmentation::UnicodeSegmentation;

pub fn tokenize(text: &str) -> Vec<String> {
    text.unicode_words().map(str::to_lowercase).collect()
}

/// Lower-case, drop punctuation and symbols, collapse whitespace.
pub fn canonicalize(name: &str) -> String {
    let stripped: String = name
        .chars()
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .collect();
    stripped
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Lower-case and collapse whitespace, keeping punctuation.
pub fn collapse(name: &str) -> String {
    name.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ")
}

/// A phrase pre-split into tokens for word-boundary matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phrase {
    pub text: String,
    pub tokens: Vec<String>,
}

impl Phrase {
    pub fn new(text: &str) -> Self {
        Self {
            text: text.to_string(),
            tokens: tokenize(text),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// True when the phrase occurs as a contiguous token run in `haystack`.
    pub fn occurs_in(&self, haystack: &[String]) -> bool {
        let n = self.tokens.len();
        n > 0 && haystack.windows(n).any(|w| w == self.tokens.as_slice())
    }
}
