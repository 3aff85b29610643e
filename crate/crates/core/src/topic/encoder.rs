use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::digest::sha256_hex;
use crate::error::{Error, Result};
use crate::text::tokenize;

/// Sparse feature vector as `(index, value)` pairs with ascending indices.
pub type SparseVector = Vec<(u32, f64)>;

/// Maps post text to a fixed-width feature vector.
pub trait TextEncoder {
    fn dim(&self) -> usize;
    fn encode(&self, text: &str) -> SparseVector;
}

/// Unigram counts over a fixed vocabulary with sublinear scaling
/// (`1 + ln tf`) and unit L2 norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "VocabularyRepr", into = "VocabularyRepr")]
pub struct BagOfTokens {
    vocabulary: Vec<String>,
    index: HashMap<String, u32>,
}

#[derive(Serialize, Deserialize)]
struct VocabularyRepr {
    vocabulary: Vec<String>,
}

impl From<VocabularyRepr> for BagOfTokens {
    fn from(r: VocabularyRepr) -> Self {
        Self::from_vocabulary(r.vocabulary)
    }
}

impl From<BagOfTokens> for VocabularyRepr {
    fn from(b: BagOfTokens) -> Self {
        Self { vocabulary: b.vocabulary }
    }
}

impl BagOfTokens {
    /// Builds a sorted vocabulary from every token in `texts`.
    pub fn fit<'a, I: IntoIterator<Item = &'a str>>(texts: I) -> Self {
        let vocab: BTreeSet<String> = texts.into_iter().flat_map(tokenize).collect();
        Self::from_vocabulary(vocab.into_iter().collect())
    }

    pub fn from_vocabulary(vocabulary: Vec<String>) -> Self {
        let index = vocabulary
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Self { vocabulary, index }
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn index_of(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }
}

impl TextEncoder for BagOfTokens {
    fn dim(&self) -> usize {
        self.vocabulary.len()
    }

    fn encode(&self, text: &str) -> SparseVector {
        let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
        for tok in tokenize(text) {
            if let Some(&i) = self.index.get(&tok) {
                *counts.entry(i).or_default() += 1;
            }
        }
        let mut v: SparseVector = counts
            .into_iter()
            .map(|(i, c)| (i, 1.0 + f64::from(c).ln()))
            .collect();
        let norm = v.iter().map(|(_, x)| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|(_, x)| *x /= norm);
        }
        v
    }
}

/// Externally computed embeddings keyed by the SHA-256 of the post text.
/// Texts without a vector encode to zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecomputedEmbeddings {
    dim: usize,
    vectors: BTreeMap<String, Vec<f64>>,
}

#[derive(Deserialize)]
struct EmbeddingLine {
    text_sha256: String,
    vector: Vec<f64>,
}

impl PrecomputedEmbeddings {
    /// Reads JSON Lines of `{"text_sha256", "vector"}`; all vectors must share
    /// one width.
    pub fn from_jsonl<R: BufRead>(reader: R) -> Result<Self> {
        let mut dim = None;
        let mut vectors = BTreeMap::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io("embeddings", e))?;
            if line.trim().is_empty() {
                continue;
            }
            let parse = |reason: String| Error::Parse { file: "embeddings".into(), line: i + 1, reason };
            let rec: EmbeddingLine = serde_json::from_str(&line).map_err(|e| parse(e.to_string()))?;
            if rec.vector.iter().any(|x| !x.is_finite()) {
                return Err(parse("non-finite value".into()));
            }
            match dim {
                None => dim = Some(rec.vector.len()),
                Some(d) if d != rec.vector.len() => {
                    return Err(Error::DimensionMismatch { expected: d, actual: rec.vector.len() })
                }
                Some(_) => {}
            }
            vectors.insert(rec.text_sha256.to_lowercase(), rec.vector);
        }
        Ok(Self { dim: dim.unwrap_or(0), vectors })
    }

    pub fn key_for(text: &str) -> String {
        sha256_hex(text.as_bytes())
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

impl TextEncoder for PrecomputedEmbeddings {
    fn dim(&self) -> usize {
        self.dim
    }

    fn encode(&self, text: &str) -> SparseVector {
        self.vectors
            .get(&Self::key_for(text))
            .map(|v| {
                v.iter()
                    .enumerate()
                    .filter(|(_, x)| **x != 0.0)
                    .map(|(i, &x)| (i as u32, x))
                    .collect()
            })
            .unwrap_or_default()
    }
}

/// The encoders a topic model can be saved with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Encoder {
    BagOfTokens(BagOfTokens),
    Precomputed(PrecomputedEmbeddings),
}

impl TextEncoder for Encoder {
    fn dim(&self) -> usize {
        match self {
            Encoder::BagOfTokens(e) => e.dim(),
            Encoder::Precomputed(e) => e.dim(),
        }
    }

    fn encode(&self, text: &str) -> SparseVector {
        match self {
            Encoder::BagOfTokens(e) => e.encode(text),
            Encoder::Precomputed(e) => e.encode(text),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sublinear_unit_norm_features() {
        let enc = BagOfTokens::fit(["jobs inflation", "vaccine"]);
        assert_eq!(enc.vocabulary(), ["inflation", "jobs", "vaccine"]);
        let v = enc.encode("jobs jobs vaccine unknownword");
        let raw_jobs = 1.0 + 2f64.ln();
        let norm = (raw_jobs * raw_jobs + 1.0).sqrt();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].0, 1);
        assert!((v[0].1 - raw_jobs / norm).abs() < 1e-12);
        assert!((v[1].1 - 1.0 / norm).abs() < 1e-12);
        assert!(enc.encode("").is_empty());
    }

    #[test]
    fn vocabulary_round_trips_through_json() {
        let enc = Encoder::BagOfTokens(BagOfTokens::fit(["b a", "c"]));
        let json = serde_json::to_string(&enc).unwrap();
        assert_eq!(json, r#"{"kind":"bag_of_tokens","vocabulary":["a","b","c"]}"#);
        let back: Encoder = serde_json::from_str(&json).unwrap();
        assert_eq!(back, enc);
        assert_eq!(back.encode("c").first().map(|x| x.0), Some(2));
    }

    #[test]
    fn precomputed_lookup_by_text_hash() {
        let key = PrecomputedEmbeddings::key_for("hello");
        let data = format!("{{\"text_sha256\":\"{key}\",\"vector\":[0.5,0.0,-1.0]}}\n");
        let emb = PrecomputedEmbeddings::from_jsonl(data.as_bytes()).unwrap();
        assert_eq!(emb.dim(), 3);
        assert_eq!(emb.encode("hello"), vec![(0, 0.5), (2, -1.0)]);
        assert!(emb.encode("other").is_empty());

        let mixed = format!("{data}{{\"text_sha256\":\"ab\",\"vector\":[1.0]}}\n");
        assert!(PrecomputedEmbeddings::from_jsonl(mixed.as_bytes()).is_err());
    }
}
