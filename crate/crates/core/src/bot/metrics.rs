use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 2x2 confusion matrix; which class is "positive" is up to the caller.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        Self { tp, fp, fn_, tn }
    }

    /// Builds the matrix from `(predicted, actual)` pairs.
    pub fn from_pairs<I: IntoIterator<Item = (bool, bool)>>(pairs: I) -> Self {
        let mut cm = Self::default();
        for (pred, actual) in pairs {
            match (pred, actual) {
                (true, true) => cm.tp += 1,
                (true, false) => cm.fp += 1,
                (false, true) => cm.fn_ += 1,
                (false, false) => cm.tn += 1,
            }
        }
        cm
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// The same outcomes seen with the other class as positive.
    pub fn swap_positive(&self) -> Self {
        Self {
            tp: self.tn,
            fp: self.fn_,
            fn_: self.fp,
            tn: self.tp,
        }
    }
}

/// Fractions in [0, 1]. Undefined ratios are `None` with the reason listed in
/// `undefined`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub accuracy: f64,
    pub f1: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub undefined: Vec<String>,
}

/// Percentages rounded to two decimals for reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetricsDisplay {
    pub precision: Option<String>,
    pub recall: Option<String>,
    pub accuracy: String,
    pub f1: Option<String>,
}

fn pct(x: f64) -> String {
    format!("{:.2}%", x * 100.0)
}

impl Metrics {
    pub fn display(&self) -> MetricsDisplay {
        MetricsDisplay {
            precision: self.precision.map(pct),
            recall: self.recall.map(pct),
            accuracy: pct(self.accuracy),
            f1: self.f1.map(pct),
        }
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn compute_metrics(cm: &ConfusionMatrix) -> Result<Metrics> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::EmptyConfusionMatrix);
    }
    let mut undefined = Vec::new();
    let precision = ratio(cm.tp, cm.tp + cm.fp);
    if precision.is_none() {
        undefined.push("precision: no positive predictions (tp + fp = 0)".to_string());
    }
    let recall = ratio(cm.tp, cm.tp + cm.fn_);
    if recall.is_none() {
        undefined.push("recall: no positive instances (tp + fn = 0)".to_string());
    }
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        (Some(_), Some(_)) => {
            undefined.push("f1: precision + recall = 0".to_string());
            None
        }
        _ => {
            undefined.push("f1: precision or recall undefined".to_string());
            None
        }
    };
    Ok(Metrics {
        precision,
        recall,
        accuracy: (cm.tp + cm.tn) as f64 / total as f64,
        f1,
        undefined,
    })
}
