use std::collections::BTreeMap;

use proptest::prelude::*;
use voidlens::leaning::Leaning;
use voidlens::source::Category;
use voidlens::synth::{annotated_post, four_post_fixture, planted_voids, random_annotated};
use voidlens::void::{
    deep_dive, detect_voids, summarize, DashboardSummary, LeaningCounts, LeaningShare, SourceTypeCounts,
    VoidLevel, VoidThresholds,
};
use voidlens::Error;

fn topics(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

#[test]
fn four_post_fixture_summary() {
    let s = summarize(&four_post_fixture(), 10);
    assert_eq!(s.posts_per_topic, BTreeMap::from([("A".into(), 2), ("B".into(), 2)]));
    assert_eq!(s.leaning_distribution["A"], LeaningShare { neutral: 0.0, conservative: 50.0, liberal: 50.0 });
    assert_eq!(s.leaning_distribution["B"], LeaningShare { neutral: 100.0, conservative: 0.0, liberal: 0.0 });
    assert_eq!(s.engagement_share["A"].comments, 30.0);
    assert_eq!(s.engagement_share["B"].comments, 70.0);
    assert_eq!(s.bot_share["A"], 50.0);
    assert_eq!(s.bot_share["B"], 0.0);
    assert_eq!(s.posts_per_source_type["B"], SourceTypeCounts { news_media: 0, political: 1, citizen: 1 });
    assert_eq!(s.max_post_engagement["B"].post_id, "p4");
    assert_eq!(s.meta.post_count, 4);
}

#[test]
fn frequent_sources_rank_by_count_then_name() {
    let posts = vec![
        annotated_post("1", "sb", "A", Leaning::Neutral, Category::Citizen, false, 1, 1),
        annotated_post("2", "sa", "A", Leaning::Neutral, Category::Citizen, false, 1, 1),
        annotated_post("3", "sc", "A", Leaning::Neutral, Category::Political, false, 1, 1),
        annotated_post("4", "sc", "A", Leaning::Neutral, Category::Political, false, 1, 1),
    ];
    let s = summarize(&posts, 2);
    let ranked: Vec<_> = s.frequent_sources["A"].iter().map(|f| (f.source_id.as_str(), f.count)).collect();
    assert_eq!(ranked, vec![("sc", 2), ("sa", 1)]);
    assert_eq!(s.frequent_sources["A"][0].category, Category::Political);
}

#[test]
fn empty_input_gives_empty_summary() {
    let s = summarize(&[], 10);
    assert!(s.posts_per_topic.is_empty() && s.leaning_distribution.is_empty());
    assert!(detect_voids(&s, &VoidThresholds::default()).findings.is_empty());
}

#[test]
fn deep_dive_filters_and_sorts() {
    let posts = four_post_fixture();
    let known = topics(&["A", "B"]);
    let lib = deep_dive(&posts, &known, "A", Some(Leaning::Liberal)).unwrap();
    assert_eq!(lib.iter().map(|p| p.post.post_id.as_str()).collect::<Vec<_>>(), ["p1"]);
    let all = deep_dive(&posts, &known, "A", None).unwrap();
    // p2 has 25 comments+shares, p1 has 15.
    assert_eq!(all.iter().map(|p| p.post.post_id.as_str()).collect::<Vec<_>>(), ["p2", "p1"]);
    assert!(matches!(deep_dive(&posts, &known, "zzz", None), Err(Error::NotFound { .. })));
}

fn summary_from(counts: &[(&str, usize)]) -> DashboardSummary {
    let mut posts = Vec::new();
    for (topic, n) in counts {
        for i in 0..*n {
            let leaning = Leaning::ALL[i % 3];
            let category = Category::ALL[i % 3];
            posts.push(annotated_post(&format!("{topic}{i}"), "s", topic, leaning, category, false, 1, 1));
        }
    }
    summarize(&posts, 10)
}

#[test]
fn topic_void_below_quarter_median() {
    let s = summary_from(&[("A", 100), ("B", 100), ("C", 5)]);
    let report = detect_voids(&s, &VoidThresholds { alpha: 0.25, ..Default::default() });
    let topic_voids: Vec<_> = report.findings.iter().filter(|f| f.level == VoidLevel::Topic).collect();
    assert_eq!(topic_voids.len(), 1);
    assert_eq!(topic_voids[0].topic, "C");
    assert!((topic_voids[0].deficit - (1.0 - 5.0 / 25.0)).abs() < 1e-12);
    assert_eq!(topic_voids[0].evidence.threshold, 25.0);
}

#[test]
fn leaning_void_on_missing_neutral_coverage() {
    // immigration: 2 neutral, 78 conservative, 20 liberal.
    let mut posts = Vec::new();
    for (leaning, n) in [(Leaning::Neutral, 2), (Leaning::Conservative, 78), (Leaning::Liberal, 20)] {
        for i in 0..n {
            posts.push(annotated_post(&format!("{leaning}{i}"), "s", "immigration", leaning, Category::ALL[i % 3], false, 1, 1));
        }
    }
    let s = summarize(&posts, 10);
    assert_eq!(s.leaning_distribution["immigration"], LeaningShare { neutral: 2.0, conservative: 78.0, liberal: 20.0 });
    let report = detect_voids(&s, &VoidThresholds { tau: 10.0, ..Default::default() });
    let leaning: Vec<_> = report.findings.iter().filter(|f| f.level == VoidLevel::Leaning).collect();
    assert_eq!(leaning.len(), 1);
    assert_eq!((leaning[0].topic.as_str(), leaning[0].leaning), ("immigration", Some(Leaning::Neutral)));
    assert!((leaning[0].deficit - 0.8).abs() < 1e-12);
    // Single topic with all engagement: weight 1.
    assert!((leaning[0].severity - 0.8).abs() < 1e-12);
}

#[test]
fn uniform_single_topic_has_no_findings() {
    let s = summary_from(&[("A", 30)]);
    assert!(detect_voids(&s, &VoidThresholds::default()).findings.is_empty());
}

#[test]
fn combined_findings_intersect_leaning_and_source_voids() {
    let posts: Vec<_> = (0..20)
        .map(|i| annotated_post(&format!("p{i}"), "s", "A", if i % 2 == 0 { Leaning::Liberal } else { Leaning::Neutral }, if i % 2 == 0 { Category::Citizen } else { Category::Political }, false, 1, 1))
        .collect();
    let report = detect_voids(&summarize(&posts, 10), &VoidThresholds::default());
    let combined: Vec<_> = report
        .findings
        .iter()
        .filter(|f| f.level == VoidLevel::Combined)
        .map(|f| (f.leaning.unwrap(), f.source_type.unwrap()))
        .collect();
    assert_eq!(combined, vec![(Leaning::Conservative, Category::NewsMedia)]);
}

#[test]
fn findings_sorted_by_severity() {
    let report = detect_voids(&summarize(&random_annotated(2000, 12, 4), 5), &VoidThresholds { alpha: 0.99, tau: 34.0, tau_source: 34.0 });
    assert!(!report.findings.is_empty());
    assert!(report.findings.windows(2).all(|w| w[0].severity >= w[1].severity));
}

#[test]
fn findings_reproducible_from_summary_json() {
    let s = summarize(&random_annotated(3000, 9, 2), 10);
    let json = serde_json::to_string(&s).unwrap();
    let back: DashboardSummary = serde_json::from_str(&json).unwrap();
    let t = VoidThresholds { alpha: 0.9, tau: 33.0, tau_source: 33.0 };
    assert_eq!(detect_voids(&back, &t), detect_voids(&s, &t));
}

#[test]
fn injected_voids_are_recalled() {
    for seed in 0..20 {
        let planted = planted_voids(seed);
        let report = detect_voids(&summarize(&planted.posts, 10), &VoidThresholds::default());
        assert!(report.has(VoidLevel::Topic, &planted.sparse_topic), "seed {seed}");
        assert!(report.findings.iter().any(|f| f.level == VoidLevel::Leaning
            && f.topic == planted.one_sided_topic
            && f.leaning == Some(Leaning::Conservative)), "seed {seed}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conservation(n in 1usize..3000, n_topics in 1usize..15, seed in any::<u64>()) {
        let posts = random_annotated(n, n_topics, seed);
        let s = summarize(&posts, 10);
        prop_assert_eq!(s.posts_per_topic.values().sum::<usize>(), n);
        for (topic, share) in &s.leaning_distribution {
            prop_assert!((share.neutral + share.conservative + share.liberal - 100.0).abs() <= 0.01);
            let LeaningCounts { neutral, conservative, liberal } = s.leaning_counts[topic];
            prop_assert_eq!(neutral + conservative + liberal, s.posts_per_topic[topic]);
        }
        let comments: f64 = s.engagement_share.values().map(|e| e.comments).sum();
        let shares: f64 = s.engagement_share.values().map(|e| e.shares).sum();
        prop_assert!((comments - 100.0).abs() <= 0.01);
        prop_assert!((shares - 100.0).abs() <= 0.01);
    }

    #[test]
    fn monotone_in_thresholds(seed in any::<u64>(), tau in 0.0f64..60.0, dt in 0.0f64..30.0,
                              alpha in 0.0f64..1.5, da in 0.0f64..1.0) {
        let s = summarize(&random_annotated(400, 8, seed), 10);
        let count = |r: &voidlens::VoidReport, level| r.findings.iter().filter(|f| f.level == level).count();
        let base = VoidThresholds { alpha, tau, tau_source: 10.0 };
        let lower_tau = VoidThresholds { tau: (tau - dt).max(0.0), ..base };
        let higher_alpha = VoidThresholds { alpha: alpha + da, ..base };
        let r = detect_voids(&s, &base);
        prop_assert!(count(&detect_voids(&s, &lower_tau), VoidLevel::Leaning) <= count(&r, VoidLevel::Leaning));
        prop_assert!(count(&detect_voids(&s, &higher_alpha), VoidLevel::Topic) >= count(&r, VoidLevel::Topic));
        prop_assert_eq!(detect_voids(&s, &base), r);
    }
}
