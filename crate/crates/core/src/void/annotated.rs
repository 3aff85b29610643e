use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::bot::BotVerdict;
use crate::error::{Error, Result};
use crate::ingest::Post;
use crate::leaning::{LeaningLabel, LeaningScore};
use crate::source::SourceCategory;
use crate::topic::TopicAssignment;

/// A post with every annotation the aggregations need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedPost {
    pub post: Post,
    pub source_name: String,
    pub source_category: SourceCategory,
    pub topic: TopicAssignment,
    pub leaning: LeaningScore,
    pub leaning_label: LeaningLabel,
    pub bot: BotVerdict,
}

pub fn write_annotated_jsonl<W: Write>(posts: &[AnnotatedPost], mut out: W) -> Result<()> {
    for p in posts {
        serde_json::to_writer(&mut out, p)?;
        out.write_all(b"\n").map_err(|e| Error::io("annotated corpus", e))?;
    }
    Ok(())
}

pub fn read_annotated_jsonl<R: BufRead>(reader: R) -> Result<Vec<AnnotatedPost>> {
    let mut posts = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io("annotated corpus", e))?;
        if line.trim().is_empty() {
            continue;
        }
        posts.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
            file: "annotated_corpus.jsonl".into(),
            line: i + 1,
            reason: e.to_string(),
        })?);
    }
    Ok(posts)
}
