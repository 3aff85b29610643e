use serde::{Deserialize, Serialize};

use super::summary::DashboardSummary;
use crate::leaning::Leaning;
use crate::source::Category;

/// Scarcity thresholds. A topic is a void when its post count falls below
/// `alpha` times the median topic count; a leaning (or source type) is a
/// void within a topic when its share falls below `tau` (`tau_source`)
/// percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoidThresholds {
    pub alpha: f64,
    pub tau: f64,
    pub tau_source: f64,
}

impl Default for VoidThresholds {
    fn default() -> Self {
        Self {
            alpha: 0.25,
            tau: 10.0,
            tau_source: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VoidLevel {
    Topic,
    Leaning,
    SourceType,
    Combined,
}

/// The summary numbers a finding was derived from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FindingEvidence {
    pub topic_posts: usize,
    /// Posts in the scarce cell (the topic itself for topic voids). For
    /// combined findings this is an upper bound on the intersection.
    pub cell_posts: usize,
    /// Observed value compared against `threshold`: a post count for topic
    /// voids, a percentage otherwise.
    pub observed: f64,
    pub threshold: f64,
    /// Mean of the topic's comment and share fractions, in [0, 1].
    pub engagement_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub level: VoidLevel,
    pub topic: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leaning: Option<Leaning>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source_type: Option<Category>,
    /// Shortfall relative to the threshold, in (0, 1].
    pub deficit: f64,
    pub severity: f64,
    pub evidence: FindingEvidence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoidReport {
    pub thresholds: VoidThresholds,
    pub config_hash: String,
    pub corpus_hash: String,
    pub findings: Vec<Finding>,
}

impl VoidReport {
    pub fn has(&self, level: VoidLevel, topic: &str) -> bool {
        self.findings.iter().any(|f| f.level == level && f.topic == topic)
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        0.0
    } else if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Pure function of the summary and thresholds; findings are sorted by
/// severity, most severe first.
pub fn detect_voids(summary: &DashboardSummary, thresholds: &VoidThresholds) -> VoidReport {
    let mut findings = Vec::new();
    let mut counts: Vec<f64> = summary.posts_per_topic.values().map(|&c| c as f64).collect();
    let topic_bar = thresholds.alpha * median(&mut counts);

    for (topic, &count) in &summary.posts_per_topic {
        let weight = summary
            .engagement_share
            .get(topic)
            .map_or(0.0, |e| (e.comments + e.shares) / 200.0);
        let finding = |level, leaning, source_type, deficit: f64, cell_posts, observed, threshold| Finding {
            level,
            topic: topic.clone(),
            leaning,
            source_type,
            deficit,
            severity: deficit * weight,
            evidence: FindingEvidence {
                topic_posts: count,
                cell_posts,
                observed,
                threshold,
                engagement_weight: weight,
            },
        };

        if (count as f64) < topic_bar {
            let deficit = 1.0 - count as f64 / topic_bar;
            findings.push(finding(VoidLevel::Topic, None, None, deficit, count, count as f64, topic_bar));
        }

        let mut leaning_voids = Vec::new();
        if let (Some(dist), Some(lc)) = (
            summary.leaning_distribution.get(topic),
            summary.leaning_counts.get(topic),
        ) {
            for l in Leaning::ALL {
                let pct = dist.get(l);
                if pct < thresholds.tau {
                    let deficit = 1.0 - pct / thresholds.tau;
                    leaning_voids.push((l, deficit, lc.get(l), pct));
                    findings.push(finding(VoidLevel::Leaning, Some(l), None, deficit, lc.get(l), pct, thresholds.tau));
                }
            }
        }

        let mut source_voids = Vec::new();
        if let Some(st) = summary.posts_per_source_type.get(topic).filter(|_| count > 0) {
            for c in Category::ALL {
                let pct = 100.0 * st.get(c) as f64 / count as f64;
                if pct < thresholds.tau_source {
                    let deficit = 1.0 - pct / thresholds.tau_source;
                    source_voids.push((c, deficit, st.get(c), pct));
                    findings.push(finding(
                        VoidLevel::SourceType,
                        None,
                        Some(c),
                        deficit,
                        st.get(c),
                        pct,
                        thresholds.tau_source,
                    ));
                }
            }
        }

        for &(l, dl, cl, pl) in &leaning_voids {
            for &(c, dc, cc, pc) in &source_voids {
                findings.push(finding(
                    VoidLevel::Combined,
                    Some(l),
                    Some(c),
                    (dl + dc) / 2.0,
                    cl.min(cc),
                    pl.min(pc),
                    thresholds.tau.min(thresholds.tau_source),
                ));
            }
        }
    }

    findings.sort_by(|a, b| {
        b.severity
            .total_cmp(&a.severity)
            .then_with(|| a.level.cmp(&b.level))
            .then_with(|| a.topic.cmp(&b.topic))
            .then_with(|| a.leaning.cmp(&b.leaning))
            .then_with(|| a.source_type.cmp(&b.source_type))
    });

    VoidReport {
        thresholds: *thresholds,
        config_hash: summary.meta.config_hash.clone(),
        corpus_hash: summary.meta.corpus_hash.clone(),
        findings,
    }
}
