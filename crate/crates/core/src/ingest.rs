//! JSON Lines corpus ingestion.
//!
//! Posts and sources arrive as CrowdTangle-export-style JSON Lines. Every input
//! line either becomes a record or a [`Reject`]; nothing is dropped silently.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, BufReader, Read, Write};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Post {
    pub post_id: String,
    pub source_id: String,
    pub text: String,
    pub created_at: DateTime<Utc>,
    pub likes: u64,
    pub comments: u64,
    pub shares: u64,
    #[serde(rename = "language", default, skip_serializing_if = "Option::is_none")]
    pub language_hint: Option<String>,
}

impl Post {
    /// Comments plus shares, the engagement measure used for ranking.
    pub fn engagement(&self) -> u64 {
        self.comments + self.shares
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Page,
    Group,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Source {
    pub source_id: String,
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(rename = "kind")]
    pub kind_hint: SourceKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
}

impl TimeWindow {
    pub fn contains(&self, ts: DateTime<Utc>) -> bool {
        self.start <= ts && ts <= self.end
    }
}

/// An immutable, referentially consistent set of posts and sources.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    posts: Vec<Post>,
    sources: Vec<Source>,
    source_index: HashMap<String, usize>,
    time_window: Option<TimeWindow>,
}

impl Corpus {
    pub fn empty() -> Self {
        Self {
            posts: Vec::new(),
            sources: Vec::new(),
            source_index: HashMap::new(),
            time_window: None,
        }
    }

    /// Builds a corpus from already-validated records, checking id uniqueness
    /// and that every post resolves to a source.
    pub fn from_parts(posts: Vec<Post>, sources: Vec<Source>) -> Result<Self> {
        let mut source_index = HashMap::with_capacity(sources.len());
        for (i, s) in sources.iter().enumerate() {
            if source_index.insert(s.source_id.clone(), i).is_some() {
                return Err(Error::InvalidCorpus(format!(
                    "duplicate source_id {}",
                    s.source_id
                )));
            }
        }
        let mut seen = HashSet::with_capacity(posts.len());
        for p in &posts {
            if !seen.insert(p.post_id.as_str()) {
                return Err(Error::InvalidCorpus(format!("duplicate post_id {}", p.post_id)));
            }
            if !source_index.contains_key(&p.source_id) {
                return Err(Error::InvalidCorpus(format!(
                    "post {} references unknown source {}",
                    p.post_id, p.source_id
                )));
            }
        }
        let time_window = observed_window(&posts);
        Ok(Self {
            posts,
            sources,
            source_index,
            time_window,
        })
    }

    pub fn posts(&self) -> &[Post] {
        &self.posts
    }

    pub fn sources(&self) -> &[Source] {
        &self.sources
    }

    pub fn source(&self, source_id: &str) -> Option<&Source> {
        self.source_index.get(source_id).map(|&i| &self.sources[i])
    }

    pub fn time_window(&self) -> Option<TimeWindow> {
        self.time_window
    }

    pub fn len(&self) -> usize {
        self.posts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posts.is_empty()
    }

    pub fn write_posts_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for p in &self.posts {
            serde_json::to_writer(&mut out, p)?;
            out.write_all(b"\n").map_err(|e| Error::io("posts output", e))?;
        }
        Ok(())
    }

    pub fn write_sources_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for s in &self.sources {
            serde_json::to_writer(&mut out, s)?;
            out.write_all(b"\n").map_err(|e| Error::io("sources output", e))?;
        }
        Ok(())
    }
}

fn observed_window(posts: &[Post]) -> Option<TimeWindow> {
    let start = posts.iter().map(|p| p.created_at).min()?;
    let end = posts.iter().map(|p| p.created_at).max()?;
    Some(TimeWindow { start, end })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reject {
    pub line_no: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Rejects {
    pub posts: Vec<Reject>,
    pub sources: Vec<Reject>,
}

impl Rejects {
    pub fn is_empty(&self) -> bool {
        self.posts.is_empty() && self.sources.is_empty()
    }

    pub fn len(&self) -> usize {
        self.posts.len() + self.sources.len()
    }
}

pub fn write_rejects<W: Write>(rejects: &[Reject], mut out: W) -> Result<()> {
    for r in rejects {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n").map_err(|e| Error::io("rejects output", e))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// When set, the corpus reports this window and posts outside it are
    /// accepted with a warning.
    pub declared_window: Option<TimeWindow>,
}

#[derive(Debug, Clone)]
pub struct ParsedCorpus {
    pub corpus: Corpus,
    pub rejects: Rejects,
    pub warnings: Vec<String>,
    pub post_lines: usize,
    pub source_lines: usize,
}

pub fn parse_corpus<P: Read, S: Read>(posts: P, sources: S) -> Result<ParsedCorpus> {
    parse_corpus_with(posts, sources, &ParseOptions::default())
}

pub fn parse_corpus_with<P: Read, S: Read>(
    posts: P,
    sources: S,
    opts: &ParseOptions,
) -> Result<ParsedCorpus> {
    let mut rejects = Rejects::default();
    let mut warnings = Vec::new();

    let source_lines = read_lines(sources, "sources stream")?;
    let mut source_list = Vec::new();
    let mut source_index = HashMap::new();
    for (line_no, line) in source_lines.iter().enumerate().map(|(i, l)| (i + 1, l)) {
        let outcome = decode_record(line).and_then(|rec| validate_source(&rec));
        match outcome {
            Ok(s) if source_index.contains_key(&s.source_id) => rejects.sources.push(Reject {
                line_no,
                reason: format!("duplicate source_id {}", s.source_id),
            }),
            Ok(s) => {
                source_index.insert(s.source_id.clone(), source_list.len());
                source_list.push(s);
            }
            Err(reason) => rejects.sources.push(Reject { line_no, reason }),
        }
    }

    let post_lines = read_lines(posts, "posts stream")?;
    let mut post_list = Vec::new();
    let mut seen = HashSet::new();
    for (line_no, line) in post_lines.iter().enumerate().map(|(i, l)| (i + 1, l)) {
        let outcome = decode_record(line).and_then(|rec| validate_post(&rec));
        let post = match outcome {
            Ok(p) => p,
            Err(reason) => {
                rejects.posts.push(Reject { line_no, reason });
                continue;
            }
        };
        if !source_index.contains_key(&post.source_id) {
            rejects.posts.push(Reject {
                line_no,
                reason: format!("unknown source_id {}", post.source_id),
            });
            continue;
        }
        if !seen.insert(post.post_id.clone()) {
            rejects.posts.push(Reject {
                line_no,
                reason: format!("duplicate post_id {}", post.post_id),
            });
            continue;
        }
        if let Some(w) = opts.declared_window {
            if !w.contains(post.created_at) {
                let msg = format!(
                    "line {line_no}: post {} at {} outside declared window",
                    post.post_id,
                    post.created_at.to_rfc3339()
                );
                log::warn!("{msg}");
                warnings.push(msg);
            }
        }
        post_list.push(post);
    }

    let time_window = opts.declared_window.or_else(|| observed_window(&post_list));
    let corpus = Corpus {
        posts: post_list,
        sources: source_list,
        source_index,
        time_window,
    };
    Ok(ParsedCorpus {
        corpus,
        rejects,
        warnings,
        post_lines: post_lines.len(),
        source_lines: source_lines.len(),
    })
}

/// Splits a stream into lines. Invalid UTF-8 is kept as `Err` so it can be
/// rejected per line; only a failing reader is fatal.
fn read_lines<R: Read>(reader: R, what: &str) -> Result<Vec<std::result::Result<String, String>>> {
    let mut reader = BufReader::new(reader);
    let mut lines = Vec::new();
    let mut buf = Vec::new();
    loop {
        buf.clear();
        let n = reader
            .read_until(b'\n', &mut buf)
            .map_err(|e| Error::io(what, e))?;
        if n == 0 {
            break;
        }
        if buf.last() == Some(&b'\n') {
            buf.pop();
        }
        if buf.last() == Some(&b'\r') {
            buf.pop();
        }
        lines.push(String::from_utf8(buf.clone()).map_err(|_| "invalid utf-8".to_string()));
    }
    Ok(lines)
}

fn decode_record(
    line: &std::result::Result<String, String>,
) -> std::result::Result<Map<String, Value>, String> {
    let line = line.as_ref().map_err(Clone::clone)?;
    if line.trim().is_empty() {
        return Err("empty line".into());
    }
    match serde_json::from_str::<Value>(line) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err("malformed json: expected object".into()),
        Err(e) => Err(format!("malformed json: {e}")),
    }
}

fn required_str<'a>(rec: &'a Map<String, Value>, field: &str) -> std::result::Result<&'a str, String> {
    match rec.get(field) {
        None | Some(Value::Null) => Err(format!("missing {field}")),
        Some(Value::String(s)) => Ok(s),
        Some(_) => Err(format!("invalid {field}: expected string")),
    }
}

fn required_id<'a>(rec: &'a Map<String, Value>, field: &str) -> std::result::Result<&'a str, String> {
    let v = required_str(rec, field)?;
    if v.trim().is_empty() {
        return Err(format!("missing {field}"));
    }
    Ok(v)
}

/// Parses an engagement count. Integers and integer strings are accepted.
fn count(rec: &Map<String, Value>, field: &str) -> std::result::Result<u64, String> {
    let value = rec.get(field).filter(|v| !v.is_null()).ok_or_else(|| format!("missing {field}"))?;
    let parsed: Option<i128> = match value {
        Value::Number(n) => n.as_i64().map(i128::from).or_else(|| n.as_u64().map(i128::from)),
        Value::String(s) => s.trim().parse::<i128>().ok(),
        _ => None,
    };
    match parsed {
        Some(n) if n < 0 => Err("negative engagement".into()),
        Some(n) => u64::try_from(n).map_err(|_| format!("invalid {field}: out of range")),
        None => {
            if value.as_f64().is_some_and(|f| f < 0.0) {
                Err("negative engagement".into())
            } else {
                Err(format!("invalid {field}: expected non-negative integer"))
            }
        }
    }
}

/// Validates one decoded post record.
pub fn validate_post(rec: &Map<String, Value>) -> std::result::Result<Post, String> {
    let post_id = required_id(rec, "post_id")?;
    let source_id = required_id(rec, "source_id")?;
    let text = required_str(rec, "text")?;
    let created_at = required_str(rec, "created_at")?;
    let created_at = DateTime::parse_from_rfc3339(created_at)
        .map_err(|_| "invalid created_at: expected RFC3339".to_string())?
        .with_timezone(&Utc);
    let likes = count(rec, "likes")?;
    let comments = count(rec, "comments")?;
    let shares = count(rec, "shares")?;
    let language_hint = match rec.get("language") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) if s.is_empty() => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err("invalid language: expected string".into()),
    };
    Ok(Post {
        post_id: post_id.to_string(),
        source_id: source_id.to_string(),
        text: text.to_string(),
        created_at,
        likes,
        comments,
        shares,
        language_hint,
    })
}

pub fn validate_source(rec: &Map<String, Value>) -> std::result::Result<Source, String> {
    let source_id = required_id(rec, "source_id")?;
    let name = required_str(rec, "name")?;
    let description = match rec.get("description") {
        None | Some(Value::Null) => "",
        Some(Value::String(s)) => s.as_str(),
        Some(_) => return Err("invalid description: expected string".into()),
    };
    let kind_hint = match required_str(rec, "kind")? {
        "page" => SourceKind::Page,
        "group" => SourceKind::Group,
        other => return Err(format!("invalid kind: {other:?}")),
    };
    Ok(Source {
        source_id: source_id.to_string(),
        name: name.to_string(),
        description: description.to_string(),
        kind_hint,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub post_count: usize,
    pub source_count: usize,
    pub per_source: BTreeMap<String, usize>,
    pub date_range: Option<TimeWindow>,
}

pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    let mut per_source: BTreeMap<String, usize> = corpus
        .sources()
        .iter()
        .map(|s| (s.source_id.clone(), 0))
        .collect();
    for p in corpus.posts() {
        *per_source.entry(p.source_id.clone()).or_default() += 1;
    }
    CorpusStats {
        post_count: corpus.len(),
        source_count: corpus.sources().len(),
        per_source,
        date_range: observed_window(corpus.posts()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    const SOURCES: &str = r#"{"source_id":"s1","name":"Latinos Unidos","description":"","kind":"group"}"#;

    fn post_line(id: &str, comments: i64) -> String {
        json!({"post_id": id, "source_id": "s1", "text": "hola", "created_at": "2022-10-01T12:00:00Z",
               "likes": 0, "comments": comments, "shares": 0})
        .to_string()
    }

    fn rec(v: Value) -> Map<String, Value> {
        v.as_object().unwrap().clone()
    }

    #[test]
    fn empty_inputs_give_empty_corpus() {
        let parsed = parse_corpus(&b""[..], &b""[..]).unwrap();
        assert_eq!(parsed.corpus.len(), 0);
        assert_eq!(parsed.corpus.sources().len(), 0);
        assert!(parsed.rejects.is_empty());
        assert_eq!(parsed.corpus.time_window(), None);
    }

    #[test]
    fn three_valid_posts_one_source() {
        let posts = [post_line("p1", 0), post_line("p2", 1), post_line("p3", 2)].join("\n");
        let parsed = parse_corpus(posts.as_bytes(), SOURCES.as_bytes()).unwrap();
        assert_eq!(parsed.corpus.len(), 3);
        assert_eq!(parsed.corpus.sources().len(), 1);
        assert!(parsed.rejects.is_empty());
        let ids: Vec<_> = parsed.corpus.posts().iter().map(|p| p.post_id.as_str()).collect();
        assert_eq!(ids, ["p1", "p2", "p3"]);
    }

    #[test]
    fn missing_post_id_is_rejected_with_reason() {
        let bad = json!({"source_id": "s1", "text": "x", "created_at": "2022-10-01T12:00:00Z",
                         "likes": 0, "comments": 0, "shares": 0})
        .to_string();
        let posts = [post_line("p1", 0), bad, post_line("p3", 0)].join("\n");
        let parsed = parse_corpus(posts.as_bytes(), SOURCES.as_bytes()).unwrap();
        assert_eq!(parsed.corpus.len(), 2);
        assert_eq!(
            parsed.rejects.posts,
            vec![Reject { line_no: 2, reason: "missing post_id".into() }]
        );
    }

    #[test]
    fn validate_post_cases() {
        let ok = rec(json!({"post_id": "p1", "source_id": "s1", "text": "hola", "comments": 0,
                            "shares": 0, "likes": 0, "created_at": "2022-10-01T00:00:00+02:00"}));
        let post = validate_post(&ok).unwrap();
        assert_eq!(post.text, "hola");
        assert_eq!(post.created_at.to_rfc3339(), "2022-09-30T22:00:00+00:00");

        let mut neg = ok.clone();
        neg.insert("comments".into(), json!(-1));
        assert_eq!(validate_post(&neg).unwrap_err(), "negative engagement");

        let mut no_text = ok.clone();
        no_text.remove("text");
        assert!(validate_post(&no_text).unwrap_err().contains("text"));

        let mut stringy = ok.clone();
        stringy.insert("likes".into(), json!("12"));
        assert_eq!(validate_post(&stringy).unwrap().likes, 12);

        let mut frac = ok.clone();
        frac.insert("shares".into(), json!(1.5));
        assert!(validate_post(&frac).unwrap_err().contains("shares"));

        let mut bad_ts = ok;
        bad_ts.insert("created_at".into(), json!("yesterday"));
        assert!(validate_post(&bad_ts).unwrap_err().contains("created_at"));
    }

    #[test]
    fn unknown_source_duplicates_and_garbage_are_rejected() {
        let unknown = post_line("p9", 0).replace("\"s1\"", "\"s2\"");
        let posts = [post_line("p1", 0), post_line("p1", 0), unknown, "{not json".into(), "".into(), "[1]".into()]
            .join("\n");
        let parsed = parse_corpus(posts.as_bytes(), SOURCES.as_bytes()).unwrap();
        assert_eq!(parsed.corpus.len(), 1);
        let reasons: Vec<_> = parsed.rejects.posts.iter().map(|r| r.reason.as_str()).collect();
        assert_eq!(reasons[0], "duplicate post_id p1");
        assert_eq!(reasons[1], "unknown source_id s2");
        assert!(reasons[2].starts_with("malformed json"));
        assert_eq!(reasons[3], "empty line");
        assert_eq!(parsed.post_lines, parsed.corpus.len() + parsed.rejects.posts.len());
    }

    #[test]
    fn invalid_utf8_line_is_rejected_not_fatal() {
        let mut bytes = post_line("p1", 0).into_bytes();
        bytes.extend_from_slice(b"\n\xff\xfe\n");
        let parsed = parse_corpus(&bytes[..], SOURCES.as_bytes()).unwrap();
        assert_eq!(parsed.corpus.len(), 1);
        assert_eq!(parsed.rejects.posts[0].reason, "invalid utf-8");
    }

    #[test]
    fn unreadable_stream_is_fatal() {
        struct Broken;
        impl Read for Broken {
            fn read(&mut self, _: &mut [u8]) -> std::io::Result<usize> {
                Err(std::io::Error::other("disk gone"))
            }
        }
        assert!(matches!(parse_corpus(Broken, &b""[..]), Err(Error::Io { .. })));
    }

    #[test]
    fn out_of_window_posts_are_kept_with_warning() {
        let window = TimeWindow {
            start: "2022-11-01T00:00:00Z".parse().unwrap(),
            end: "2022-11-30T00:00:00Z".parse().unwrap(),
        };
        let opts = ParseOptions { declared_window: Some(window) };
        let parsed = parse_corpus_with(post_line("p1", 0).as_bytes(), SOURCES.as_bytes(), &opts).unwrap();
        assert_eq!(parsed.corpus.len(), 1);
        assert_eq!(parsed.warnings.len(), 1);
        assert_eq!(parsed.corpus.time_window(), Some(window));
    }

    #[test]
    fn stats_counts() {
        assert_eq!(
            corpus_stats(&Corpus::empty()),
            CorpusStats { post_count: 0, source_count: 0, per_source: BTreeMap::new(), date_range: None }
        );

        let sources = format!(
            "{SOURCES}\n{}",
            r#"{"source_id":"s2","name":"Other","description":"","kind":"page"}"#
        );
        let mut lines = Vec::new();
        for i in 0..10 {
            let src = if i < 6 { "s1" } else { "s2" };
            lines.push(
                json!({"post_id": format!("p{i}"), "source_id": src, "text": "t",
                       "created_at": format!("2022-10-{:02}T00:00:00Z", i + 1),
                       "likes": 1, "comments": 1, "shares": 1})
                .to_string(),
            );
        }
        let parsed = parse_corpus(lines.join("\n").as_bytes(), sources.as_bytes()).unwrap();
        let stats = corpus_stats(&parsed.corpus);
        assert_eq!(stats.post_count, 10);
        assert_eq!(stats.per_source["s1"], 6);
        assert_eq!(stats.per_source["s2"], 4);
        assert_eq!(stats.per_source.values().sum::<usize>(), stats.post_count);

        let single = parse_corpus(post_line("p1", 0).as_bytes(), SOURCES.as_bytes()).unwrap();
        let stats = corpus_stats(&single.corpus);
        let range = stats.date_range.unwrap();
        assert_eq!(stats.post_count, 1);
        assert_eq!(range.start, range.end);
    }

    #[test]
    fn from_parts_checks_integrity() {
        let parsed = parse_corpus(post_line("p1", 0).as_bytes(), SOURCES.as_bytes()).unwrap();
        let c = &parsed.corpus;
        assert!(Corpus::from_parts(c.posts().to_vec(), c.sources().to_vec()).is_ok());
        assert!(Corpus::from_parts(c.posts().to_vec(), vec![]).is_err());
        let dup = vec![c.posts()[0].clone(), c.posts()[0].clone()];
        assert!(Corpus::from_parts(dup, c.sources().to_vec()).is_err());
    }
}
