use std::collections::HashMap;
use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::TopicConfig;
use super::encoder::{BagOfTokens, Encoder, SparseVector, TextEncoder};
use super::weak::LabeledSet;
use crate::error::{Error, Result};
use crate::ingest::Corpus;

pub const MODEL_VERSION: u32 = 1;
/// Labeled posts every topic needs before training.
pub const MIN_TOPIC_SUPPORT: usize = 10;

#[derive(Debug, Clone)]
pub struct TrainOptions {
    pub seed: u64,
    pub epochs: usize,
    pub learning_rate: f64,
    /// Inverse-time decay: epoch `e` uses `learning_rate / (1 + lr_decay * e)`.
    pub lr_decay: f64,
    pub l2: f64,
    pub validation_fraction: f64,
    /// Fitted on the training split when `None`.
    pub encoder: Option<Encoder>,
}

impl TrainOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            epochs: 30,
            learning_rate: 0.1,
            lr_decay: 0.1,
            l2: 1e-4,
            validation_fraction: 0.2,
            encoder: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMetadata {
    pub seed: u64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub lr_decay: f64,
    pub l2: f64,
    pub train_size: usize,
    pub validation_size: usize,
}

/// Linear softmax classifier over encoded post text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicModel {
    pub version: u32,
    pub config_hash: String,
    pub topics: Vec<String>,
    pub encoder: Encoder,
    /// One row per topic, one column per feature.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub metadata: TrainingMetadata,
    pub validation_accuracy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopicMethod {
    WeakLabel,
    Model,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicAssignment {
    pub post_id: String,
    pub topic: String,
    pub confidence: f64,
    pub method: TopicMethod,
}

fn softmax_in_place(logits: &mut [f64]) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for z in logits.iter_mut() {
        *z = (*z - max).exp();
        sum += *z;
    }
    for z in logits.iter_mut() {
        *z /= sum;
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

impl TopicModel {
    fn logits(&self, x: &SparseVector) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(row, b)| b + x.iter().map(|&(j, v)| row[j as usize] * v).sum::<f64>())
            .collect()
    }

    /// Topic distribution for `text`, in `topics` order; sums to 1.
    pub fn probabilities(&self, text: &str) -> Vec<f64> {
        let mut z = self.logits(&self.encoder.encode(text));
        softmax_in_place(&mut z);
        z
    }

    pub fn predict(&self, text: &str) -> (usize, f64) {
        let p = self.probabilities(text);
        let i = argmax(&p);
        (i, p[i])
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer(out, self)?;
        Ok(())
    }

    pub fn read_json<R: Read>(input: R) -> Result<Self> {
        let model: Self = serde_json::from_reader(input)?;
        if model.version != MODEL_VERSION {
            return Err(Error::UnsupportedVersion(model.version));
        }
        let dim = model.encoder.dim();
        if model.weights.len() != model.topics.len()
            || model.bias.len() != model.topics.len()
            || model.weights.iter().any(|r| r.len() != dim)
        {
            return Err(Error::InvalidConfig("topic model shape does not match its encoder".into()));
        }
        Ok(model)
    }
}

pub fn train_topic_model(labeled: &LabeledSet, corpus: &Corpus, seed: u64) -> Result<TopicModel> {
    train_topic_model_with(labeled, corpus, &TrainOptions::with_seed(seed))
}

/// Trains on a stratified split of the labeled set and reports accuracy on
/// the held-out part. Single-threaded and bit-reproducible for a given seed.
pub fn train_topic_model_with(
    labeled: &LabeledSet,
    corpus: &Corpus,
    opts: &TrainOptions,
) -> Result<TopicModel> {
    let n_topics = labeled.topics.len();
    let topic_index: HashMap<&str, usize> = labeled
        .topics
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();
    let texts: HashMap<&str, &str> = corpus
        .posts()
        .iter()
        .map(|p| (p.post_id.as_str(), p.text.as_str()))
        .collect();

    let mut by_topic: Vec<Vec<&str>> = vec![Vec::new(); n_topics];
    for item in &labeled.items {
        let t = *topic_index
            .get(item.topic.as_str())
            .ok_or_else(|| Error::not_found("topic", &item.topic))?;
        let text = *texts
            .get(item.post_id.as_str())
            .ok_or_else(|| Error::not_found("post", &item.post_id))?;
        by_topic[t].push(text);
    }

    let short: Vec<String> = labeled
        .topics
        .iter()
        .zip(&by_topic)
        .filter(|(_, items)| items.len() < MIN_TOPIC_SUPPORT)
        .map(|(t, _)| t.clone())
        .collect();
    if !short.is_empty() {
        return Err(Error::InsufficientSupport(short));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut train: Vec<(&str, usize)> = Vec::new();
    let mut valid: Vec<(&str, usize)> = Vec::new();
    for (t, items) in by_topic.iter().enumerate() {
        let mut items = items.clone();
        items.shuffle(&mut rng);
        let n_val = ((items.len() as f64 * opts.validation_fraction).round() as usize).clamp(1, items.len() - 1);
        valid.extend(items[..n_val].iter().map(|&x| (x, t)));
        train.extend(items[n_val..].iter().map(|&x| (x, t)));
    }

    let encoder = match &opts.encoder {
        Some(e) => e.clone(),
        None => Encoder::BagOfTokens(BagOfTokens::fit(train.iter().map(|(text, _)| *text))),
    };
    let dim = encoder.dim();
    let features: Vec<(SparseVector, usize)> =
        train.iter().map(|&(text, t)| (encoder.encode(text), t)).collect();

    // Weights are stored as `scale * v` so the L2 shrink is O(1) per step.
    let mut v = vec![vec![0.0f64; dim]; n_topics];
    let mut scale = 1.0f64;
    let mut bias = vec![0.0f64; n_topics];
    let mut order: Vec<usize> = (0..features.len()).collect();
    let mut probs = vec![0.0f64; n_topics];

    for epoch in 0..opts.epochs {
        let lr = opts.learning_rate / (1.0 + opts.lr_decay * epoch as f64);
        order.shuffle(&mut rng);
        for &i in &order {
            let (x, y) = &features[i];
            for k in 0..n_topics {
                probs[k] = bias[k] + scale * x.iter().map(|&(j, xv)| v[k][j as usize] * xv).sum::<f64>();
            }
            softmax_in_place(&mut probs);

            scale *= 1.0 - lr * opts.l2;
            for k in 0..n_topics {
                let g = probs[k] - if k == *y { 1.0 } else { 0.0 };
                bias[k] -= lr * g;
                let step = lr * g / scale;
                for &(j, xv) in x {
                    v[k][j as usize] -= step * xv;
                }
            }
            if scale < 1e-6 {
                v.iter_mut().flatten().for_each(|w| *w *= scale);
                scale = 1.0;
            }
        }
    }
    let weights: Vec<Vec<f64>> = v
        .into_iter()
        .map(|row| row.into_iter().map(|w| w * scale).collect())
        .collect();
    if weights.iter().flatten().chain(&bias).any(|w| !w.is_finite()) {
        return Err(Error::InvalidConfig("training diverged to non-finite weights".into()));
    }

    let mut model = TopicModel {
        version: MODEL_VERSION,
        config_hash: labeled.config_hash.clone(),
        topics: labeled.topics.clone(),
        encoder,
        weights,
        bias,
        metadata: TrainingMetadata {
            seed: opts.seed,
            epochs: opts.epochs,
            learning_rate: opts.learning_rate,
            lr_decay: opts.lr_decay,
            l2: opts.l2,
            train_size: train.len(),
            validation_size: valid.len(),
        },
        validation_accuracy: 0.0,
    };
    let correct = valid
        .iter()
        .filter(|&&(text, t)| model.predict(text).0 == t)
        .count();
    model.validation_accuracy = correct as f64 / valid.len() as f64;
    log::info!(
        "topic model: {} train / {} validation, accuracy {:.4}",
        train.len(),
        valid.len(),
        model.validation_accuracy
    );
    Ok(model)
}

/// Assigns exactly one topic to every post in corpus order.
pub fn classify_topics(
    model: &TopicModel,
    config: &TopicConfig,
    corpus: &Corpus,
) -> Result<Vec<TopicAssignment>> {
    let config_hash = config.hash();
    if model.config_hash != config_hash || model.topics != config.names() {
        return Err(Error::ConfigMismatch {
            model: model.config_hash.clone(),
            config: config_hash,
        });
    }
    Ok(corpus
        .posts()
        .iter()
        .map(|p| {
            let (t, confidence) = model.predict(&p.text);
            TopicAssignment {
                post_id: p.post_id.clone(),
                topic: model.topics[t].clone(),
                confidence,
                method: TopicMethod::Model,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softmax_is_stable_and_normalized() {
        let mut z = vec![1000.0, 1000.0, -1000.0];
        softmax_in_place(&mut z);
        assert!((z[0] - 0.5).abs() < 1e-12);
        assert!((z.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn argmax_prefers_first_on_ties() {
        assert_eq!(argmax(&[0.2, 0.4, 0.4]), 1);
        assert_eq!(argmax(&[0.5, 0.5]), 0);
    }
}
