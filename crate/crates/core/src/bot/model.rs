use std::collections::BTreeMap;
use std::io::{BufRead, Read, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::{extract_bot_features, BotFeatures, FEATURE_VERSION};
use super::metrics::{compute_metrics, ConfusionMatrix, Metrics};
use crate::digest::json_hash;
use crate::error::{Error, Result};
use crate::ingest::Post;

pub const HIDDEN_WIDTH: usize = 32;
pub const DEFAULT_THRESHOLD: f64 = 0.5;
/// Examples each class needs before training.
pub const MIN_CLASS_SUPPORT: usize = 20;
const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct BotTrainOptions {
    pub seed: u64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub holdout_fraction: f64,
}

impl BotTrainOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            epochs: 40,
            learning_rate: 0.05,
            holdout_fraction: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BotTrainMetadata {
    pub seed: u64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub dataset_hash: String,
    pub train_size: usize,
    pub holdout_size: usize,
}

/// One-hidden-layer perceptron: standardized input, tanh hidden layer,
/// sigmoid output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BotModel {
    pub version: u32,
    pub feature_version: u32,
    pub input_dim: usize,
    pub threshold: f64,
    pub feature_mean: Vec<f64>,
    pub feature_scale: Vec<f64>,
    /// `HIDDEN_WIDTH` rows of `input_dim` weights.
    pub hidden_weights: Vec<Vec<f64>>,
    pub hidden_bias: Vec<f64>,
    pub output_weights: Vec<f64>,
    pub output_bias: f64,
    pub metadata: BotTrainMetadata,
    pub holdout_confusion: ConfusionMatrix,
    pub holdout_metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BotVerdict {
    pub post_id: String,
    pub probability: f64,
    pub is_bot: bool,
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl BotModel {
    fn standardize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.feature_mean.iter().zip(&self.feature_scale))
            .map(|(&v, (&m, &s))| {
                let z = (v - m) / s;
                if z.is_finite() { z } else { 0.0 }
            })
            .collect()
    }

    fn hidden(&self, z: &[f64]) -> Vec<f64> {
        self.hidden_weights
            .iter()
            .zip(&self.hidden_bias)
            .map(|(row, b)| (b + row.iter().zip(z).map(|(w, x)| w * x).sum::<f64>()).tanh())
            .collect()
    }

    /// Bot probability for a raw feature vector of width `input_dim`.
    pub fn probability(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                actual: x.len(),
            });
        }
        let h = self.hidden(&self.standardize(x));
        let logit = self.output_bias + h.iter().zip(&self.output_weights).map(|(a, w)| a * w).sum::<f64>();
        Ok(sigmoid(logit))
    }

    pub fn verdict(&self, post_id: &str, probability: f64) -> BotVerdict {
        BotVerdict {
            post_id: post_id.to_string(),
            probability,
            is_bot: probability >= self.threshold,
        }
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
        if model.feature_version != FEATURE_VERSION {
            return Err(Error::UnsupportedVersion(model.feature_version));
        }
        Ok(model)
    }
}

pub fn train_bot_model(labeled: &[(BotFeatures, bool)], seed: u64) -> Result<BotModel> {
    train_bot_model_with(labeled, &BotTrainOptions::with_seed(seed))
}

/// Trains on a stratified 80/20 split and reports held-out metrics (bot is
/// the positive class). Deterministic for a given seed.
pub fn train_bot_model_with(labeled: &[(BotFeatures, bool)], opts: &BotTrainOptions) -> Result<BotModel> {
    let bots: Vec<usize> = (0..labeled.len()).filter(|&i| labeled[i].1).collect();
    let humans: Vec<usize> = (0..labeled.len()).filter(|&i| !labeled[i].1).collect();
    for (name, class) in [("bot", &bots), ("human", &humans)] {
        if class.len() < MIN_CLASS_SUPPORT {
            return Err(Error::InsufficientClassSupport(format!(
                "{name} has {} examples, need {MIN_CLASS_SUPPORT}",
                class.len()
            )));
        }
    }
    let input_dim = labeled[0].0.dim();
    if let Some((f, _)) = labeled.iter().find(|(f, _)| f.dim() != input_dim) {
        return Err(Error::DimensionMismatch { expected: input_dim, actual: f.dim() });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut train = Vec::new();
    let mut holdout = Vec::new();
    for class in [bots, humans] {
        let mut class = class;
        class.shuffle(&mut rng);
        let n_hold = ((class.len() as f64 * opts.holdout_fraction).round() as usize).clamp(1, class.len() - 1);
        holdout.extend_from_slice(&class[..n_hold]);
        train.extend_from_slice(&class[n_hold..]);
    }

    let n = train.len() as f64;
    let mut feature_mean = vec![0.0; input_dim];
    for &i in &train {
        for (m, x) in feature_mean.iter_mut().zip(&labeled[i].0 .0) {
            *m += x / n;
        }
    }
    let mut feature_scale = vec![0.0; input_dim];
    for &i in &train {
        for ((s, x), m) in feature_scale.iter_mut().zip(&labeled[i].0 .0).zip(&feature_mean) {
            *s += (x - m) * (x - m) / n;
        }
    }
    for s in &mut feature_scale {
        *s = if *s > 1e-12 { s.sqrt() } else { 1.0 };
    }

    let limit = (6.0 / (input_dim + HIDDEN_WIDTH) as f64).sqrt();
    let hidden_weights: Vec<Vec<f64>> = (0..HIDDEN_WIDTH)
        .map(|_| (0..input_dim).map(|_| rng.random_range(-limit..limit)).collect())
        .collect();
    let out_limit = (6.0 / (HIDDEN_WIDTH + 1) as f64).sqrt();
    let output_weights: Vec<f64> = (0..HIDDEN_WIDTH).map(|_| rng.random_range(-out_limit..out_limit)).collect();

    let dataset_hash = json_hash(labeled);
    let mut model = BotModel {
        version: MODEL_VERSION,
        feature_version: FEATURE_VERSION,
        input_dim,
        threshold: DEFAULT_THRESHOLD,
        feature_mean,
        feature_scale,
        hidden_weights,
        hidden_bias: vec![0.0; HIDDEN_WIDTH],
        output_weights,
        output_bias: 0.0,
        metadata: BotTrainMetadata {
            seed: opts.seed,
            epochs: opts.epochs,
            learning_rate: opts.learning_rate,
            dataset_hash,
            train_size: train.len(),
            holdout_size: holdout.len(),
        },
        holdout_confusion: ConfusionMatrix::default(),
        holdout_metrics: Metrics {
            precision: None,
            recall: None,
            accuracy: 0.0,
            f1: None,
            undefined: Vec::new(),
        },
    };

    let inputs: Vec<(Vec<f64>, f64)> = train
        .iter()
        .map(|&i| (model.standardize(&labeled[i].0 .0), if labeled[i].1 { 1.0 } else { 0.0 }))
        .collect();
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    for epoch in 0..opts.epochs {
        let lr = opts.learning_rate / (1.0 + 0.05 * epoch as f64);
        order.shuffle(&mut rng);
        for &i in &order {
            let (z, y) = &inputs[i];
            let h = model.hidden(z);
            let logit = model.output_bias + h.iter().zip(&model.output_weights).map(|(a, w)| a * w).sum::<f64>();
            // d(cross-entropy)/d(logit) for a sigmoid output.
            let g = sigmoid(logit) - y;
            #[allow(clippy::needless_range_loop)]
            for j in 0..HIDDEN_WIDTH {
                let gh = g * model.output_weights[j] * (1.0 - h[j] * h[j]);
                model.output_weights[j] -= lr * g * h[j];
                model.hidden_bias[j] -= lr * gh;
                for (w, x) in model.hidden_weights[j].iter_mut().zip(z) {
                    *w -= lr * gh * x;
                }
            }
            model.output_bias -= lr * g;
        }
    }

    let mut pairs = Vec::with_capacity(holdout.len());
    for &i in &holdout {
        let p = model.probability(&labeled[i].0 .0)?;
        pairs.push((p >= model.threshold, labeled[i].1));
    }
    model.holdout_confusion = ConfusionMatrix::from_pairs(pairs);
    model.holdout_metrics = compute_metrics(&model.holdout_confusion)?;
    log::info!(
        "bot model: {} train / {} holdout, accuracy {:.4}",
        train.len(),
        holdout.len(),
        model.holdout_metrics.accuracy
    );
    Ok(model)
}

pub fn classify_features(model: &BotModel, post_id: &str, features: &BotFeatures) -> Result<BotVerdict> {
    let p = model.probability(&features.0)?;
    Ok(model.verdict(post_id, p))
}

pub fn classify_bot(model: &BotModel, post: &Post) -> Result<BotVerdict> {
    classify_features(model, &post.post_id, &extract_bot_features(post))
}

/// Mean bot probability per source.
pub fn source_bot_scores(posts: &[Post], verdicts: &[BotVerdict]) -> BTreeMap<String, f64> {
    let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for (p, v) in posts.iter().zip(verdicts) {
        let e = sums.entry(p.source_id.clone()).or_default();
        e.0 += v.probability;
        e.1 += 1;
    }
    sums.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BotLabel {
    pub post_id: String,
    pub is_bot: bool,
}

/// Reads `bot_labels.jsonl`.
pub fn read_bot_labels<R: BufRead>(reader: R) -> Result<Vec<BotLabel>> {
    let mut labels = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io("bot labels", e))?;
        if line.trim().is_empty() {
            continue;
        }
        labels.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
            file: "bot_labels.jsonl".into(),
            line: i + 1,
            reason: e.to_string(),
        })?);
    }
    Ok(labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bot::FEATURE_DIM;

    fn separable(n: usize, seed: u64) -> Vec<(BotFeatures, bool)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..2 * n)
            .map(|i| {
                let bot = i % 2 == 0;
                let mut v = vec![0.0; FEATURE_DIM];
                for x in v.iter_mut() {
                    *x = rng.random_range(0.0..0.1);
                }
                if bot {
                    v[0] += 1.0;
                } else {
                    v[1] += 1.0;
                }
                (BotFeatures(v), bot)
            })
            .collect()
    }

    #[test]
    fn sigmoid_saturates_without_nan() {
        assert_eq!(sigmoid(1000.0), 1.0);
        assert_eq!(sigmoid(-1000.0), 0.0);
        assert_eq!(sigmoid(0.0), 0.5);
    }

    #[test]
    fn insufficient_class_support() {
        let mut data = separable(30, 1);
        data.retain(|(_, bot)| !bot);
        data.extend(separable(5, 2).into_iter().filter(|(_, b)| *b));
        let err = train_bot_model(&data, 1).unwrap_err();
        assert!(err.to_string().starts_with("insufficient class support"), "{err}");
    }

    #[test]
    fn dimension_mismatch_is_fatal() {
        let model = train_bot_model(&separable(25, 3), 3).unwrap();
        assert!(matches!(
            model.probability(&[0.0; 3]),
            Err(Error::DimensionMismatch { expected: FEATURE_DIM, actual: 3 })
        ));
    }

    #[test]
    fn threshold_is_inclusive() {
        let model = train_bot_model(&separable(25, 4), 4).unwrap();
        assert!(model.verdict("p", 0.5).is_bot);
        assert!(!model.verdict("p", 0.499_999).is_bot);
    }

    #[test]
    fn model_json_round_trip() {
        let model = train_bot_model(&separable(25, 5), 5).unwrap();
        let mut buf = Vec::new();
        model.write_json(&mut buf).unwrap();
        assert_eq!(BotModel::read_json(&buf[..]).unwrap(), model);
    }

    #[test]
    fn reads_labels() {
        let labels = read_bot_labels(&b"{\"post_id\":\"p1\",\"is_bot\":true}\n\n{\"post_id\":\"p2\",\"is_bot\":false}\n"[..]).unwrap();
        assert_eq!(labels.len(), 2);
        assert!(labels[0].is_bot && !labels[1].is_bot);
        assert!(read_bot_labels(&b"{\"post_id\":1}"[..]).is_err());
    }
}
