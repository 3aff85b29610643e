#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use chrono::{DateTime, Utc};
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;
use voidlens_cli::job::{self, JobConfig};
use voidlens_cli::service::{AppState, ServiceOptions, Snapshot};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn generated_at() -> DateTime<Utc> {
    "2022-11-01T00:00:00Z".parse().unwrap()
}

pub fn fixture_config() -> JobConfig {
    let dir = fixtures();
    let mut cfg = JobConfig::from_corpus_dir(&dir, &dir.join("topics.json"));
    cfg.generated_at = Some(generated_at());
    cfg
}

/// Service state over the fixture corpus, rooms stored in `data_dir`.
pub fn fixture_state(data_dir: Option<&Path>, token: Option<&str>) -> Arc<AppState> {
    let cfg = fixture_config();
    let inputs = job::load(&cfg).unwrap();
    let out = job::run(&inputs, &cfg).unwrap();
    let job::Inputs { parsed, kb, config, overrides, .. } = inputs;
    AppState::new(
        Snapshot::from_output(parsed.corpus, config, cfg.settings.clone(), out),
        kb,
        overrides,
        ServiceOptions {
            token: token.map(String::from),
            data_dir: data_dir.map(Path::to_path_buf),
            ..ServiceOptions::default()
        },
    )
}

pub async fn send(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    send_with(app, method, uri, body, None).await
}

pub async fn send_with(
    app: &Router,
    method: Method,
    uri: &str,
    body: Option<Value>,
    token: Option<&str>,
) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(t) = token {
        req = req.header("authorization", format!("Bearer {t}"));
    }
    let req = match body {
        Some(b) => req.header("content-type", "application/json").body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap_or(Value::Null) };
    (status, value)
}

/// Polls a job until it leaves the running state.
pub async fn wait_job(app: &Router, id: u64) -> Value {
    for _ in 0..600 {
        let (status, job) = send(app, Method::GET, &format!("/jobs/{id}"), None).await;
        assert_eq!(status, StatusCode::OK);
        if job["state"] != "running" {
            return job;
        }
        tokio::time::sleep(std::time::Duration::from_millis(20)).await;
    }
    panic!("job {id} did not finish");
}
