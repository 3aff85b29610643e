use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;
use voidlens::bot::{compute_metrics, extract_bot_features, train_bot_model, ConfusionMatrix};
use voidlens::pipeline::bot_training_set;
use voidlens::synth::{bot_fixture, leaning_fixture, random_annotated, topic_benchmark};
use voidlens::topic::{classify_topics, weak_label};
use voidlens::void::{detect_voids, summarize, VoidThresholds};
use voidlens::leaning_score;
use voidlens_bench::trained_topics;

fn aggregation(c: &mut Criterion) {
    let mut g = c.benchmark_group("summarize");
    for n in [1_000, 10_000, 50_000] {
        let posts = random_annotated(n, 11, 1);
        g.throughput(Throughput::Elements(n as u64));
        g.bench_with_input(BenchmarkId::from_parameter(n), &posts, |b, posts| b.iter(|| summarize(black_box(posts), 10)));
    }
    g.finish();

    let summary = summarize(&random_annotated(50_000, 11, 1), 10);
    c.bench_function("detect_voids", |b| b.iter(|| detect_voids(black_box(&summary), &VoidThresholds::default())));
}

fn leaning(c: &mut Criterion) {
    let (corpus, kb) = leaning_fixture(500, 1);
    c.bench_function("leaning_score/500", |b| {
        b.iter(|| {
            for post in corpus.posts() {
                black_box(leaning_score(post, corpus.source(&post.source_id), &kb));
            }
        })
    });
}

fn topics(c: &mut Criterion) {
    let (corpus, config) = topic_benchmark(11, 200, 1);
    c.bench_function("weak_label/2200", |b| b.iter(|| weak_label(black_box(&corpus), &config, 1)));
    let (corpus, config, model) = trained_topics(200, 1);
    c.bench_function("classify_topics/2200", |b| b.iter(|| classify_topics(&model, &config, black_box(&corpus))));
}

fn bots(c: &mut Criterion) {
    let (corpus, labels) = bot_fixture(200, 1);
    let set = bot_training_set(&corpus, &labels).unwrap();
    let model = train_bot_model(&set, 1).unwrap();
    c.bench_function("bot_features", |b| b.iter(|| extract_bot_features(black_box(&corpus.posts()[0]))));
    let x = extract_bot_features(&corpus.posts()[0]);
    c.bench_function("bot_probability", |b| b.iter(|| model.probability(black_box(&x.0))));
    let cm = ConfusionMatrix::new(487, 153, 78, 465);
    c.bench_function("compute_metrics", |b| b.iter(|| compute_metrics(black_box(&cm))));
}

criterion_group!(benches, aggregation, leaning, topics, bots);
criterion_main!(benches);
