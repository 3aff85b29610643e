//! Rule-based categorization of pages and groups into news media, political,
//! or citizen sources, with journalist overrides that survive recomputation.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Source;
use crate::kb::KnowledgeBase;
use crate::text::{canonicalize, tokenize, Phrase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    NewsMedia,
    Political,
    Citizen,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::NewsMedia, Category::Political, Category::Citizen];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::NewsMedia => "news_media",
            Category::Political => "political",
            Category::Citizen => "citizen",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "news_media" => Ok(Category::NewsMedia),
            "political" => Ok(Category::Political),
            "citizen" => Ok(Category::Citizen),
            other => Err(format!("unknown category {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Automatic,
    Override,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceCategory {
    pub category: Category,
    pub origin: Origin,
    pub matched_evidence: Option<String>,
}

/// Applies the rule cascade: news-site name, then political terms or party and
/// actor names, then citizen.
pub fn categorize_source(source: &Source, kb: &KnowledgeBase) -> SourceCategory {
    let auto = |category, evidence: Option<String>| SourceCategory {
        category,
        origin: Origin::Automatic,
        matched_evidence: evidence,
    };

    let name = canonicalize(&source.name);
    let name_tokens = tokenize(&name);
    if kb.news_site_names.contains(&name) {
        return auto(Category::NewsMedia, Some(format!("news_site:{name}")));
    }
    if let Some(site) = kb
        .news_site_names
        .iter()
        .find(|site| Phrase::new(site).occurs_in(&name_tokens))
    {
        return auto(Category::NewsMedia, Some(format!("news_site:{site}")));
    }

    let desc_tokens = tokenize(&source.description);
    if let Some(term) = kb.political_terms.iter().find(|t| {
        let p = Phrase::new(t);
        p.occurs_in(&name_tokens) || p.occurs_in(&desc_tokens)
    }) {
        return auto(Category::Political, Some(format!("political_term:{term}")));
    }
    if let Some(entity) = kb
        .party_and_actor_names
        .iter()
        .find(|n| Phrase::new(n).occurs_in(&name_tokens))
    {
        return auto(Category::Political, Some(format!("party_or_actor:{entity}")));
    }

    auto(Category::Citizen, None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverrideRecord {
    pub source_id: String,
    pub category: Category,
    pub ts: DateTime<Utc>,
}

/// Journalist corrections keyed by source id. Last write wins; when backed by
/// a file every write is appended to the `overrides.jsonl` sidecar.
#[derive(Debug, Default)]
pub struct OverrideStore {
    overrides: HashMap<String, OverrideRecord>,
    path: Option<PathBuf>,
}

impl OverrideStore {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens (or starts) a sidecar file and replays existing records.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let mut overrides = HashMap::new();
        if path.exists() {
            let content =
                fs::read_to_string(&path).map_err(|e| Error::io(path.display().to_string(), e))?;
            for (i, line) in content.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let rec: OverrideRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
                    file: path.display().to_string(),
                    line: i + 1,
                    reason: e.to_string(),
                })?;
                overrides.insert(rec.source_id.clone(), rec);
            }
        }
        Ok(Self {
            overrides,
            path: Some(path),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, source_id: &str) -> Option<&OverrideRecord> {
        self.overrides.get(source_id)
    }

    pub fn len(&self) -> usize {
        self.overrides.len()
    }

    pub fn is_empty(&self) -> bool {
        self.overrides.is_empty()
    }

    /// Records an override for a source that must exist in `known`.
    pub fn apply_override(
        &mut self,
        source_id: &str,
        category: Category,
        known: &HashSet<&str>,
    ) -> Result<SourceCategory> {
        if !known.contains(source_id) {
            return Err(Error::not_found("source", source_id));
        }
        let rec = OverrideRecord {
            source_id: source_id.to_string(),
            category,
            ts: Utc::now(),
        };
        if let Some(path) = &self.path {
            let mut line = serde_json::to_vec(&rec)?;
            line.push(b'\n');
            OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .and_then(|mut f| f.write_all(&line))
                .map_err(|e| Error::io(path.display().to_string(), e))?;
        }
        self.overrides.insert(rec.source_id.clone(), rec);
        Ok(SourceCategory {
            category,
            origin: Origin::Override,
            matched_evidence: None,
        })
    }
}

/// Categorizes every source, keeping overrides in place of the automatic
/// result.
pub fn categorize_all(
    sources: &[Source],
    kb: &KnowledgeBase,
    overrides: &OverrideStore,
) -> BTreeMap<String, SourceCategory> {
    sources
        .iter()
        .map(|s| {
            let cat = match overrides.get(&s.source_id) {
                Some(o) => SourceCategory {
                    category: o.category,
                    origin: Origin::Override,
                    matched_evidence: None,
                },
                None => categorize_source(s, kb),
            };
            (s.source_id.clone(), cat)
        })
        .collect()
}
