//! Static external knowledge: leaning scores for websites and political
//! actors, name lists for source categorization, and the sentiment lexicon.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{canonicalize, collapse, tokenize, Phrase};

pub const WEBSITES_FILE: &str = "websites.csv";
pub const ACTORS_FILE: &str = "actors.csv";
pub const NEWS_SITES_FILE: &str = "news_sites.txt";
pub const PARTIES_ACTORS_FILE: &str = "parties_actors.txt";
pub const SENTIMENT_FILE: &str = "sentiment_lexicon.csv";
pub const SYNONYMS_FILE: &str = "political_synonyms.txt";
pub const PAGE_WEBSITES_FILE: &str = "page_websites.csv";

/// Used when no synonym file is shipped.
pub const DEFAULT_POLITICAL_TERMS: [&str; 6] = [
    "political",
    "politics",
    "politician",
    "election",
    "electoral",
    "partisan",
];

#[derive(Debug, Clone, Default)]
pub struct KnowledgeBase {
    pub website_scores: BTreeMap<String, f64>,
    pub actor_scores: BTreeMap<String, f64>,
    pub news_site_names: BTreeSet<String>,
    pub political_terms: BTreeSet<String>,
    pub party_and_actor_names: BTreeSet<String>,
    pub sentiment_lexicon: HashMap<String, f64>,
    /// Canonical page/group name to the domains it represents.
    pub page_websites: BTreeMap<String, Vec<String>>,
    actor_index: HashMap<String, Vec<Phrase>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LoadCounts {
    pub websites: usize,
    pub actors: usize,
    pub news_sites: usize,
    pub political_terms: usize,
    pub parties_and_actors: usize,
    pub sentiment_tokens: usize,
    pub page_websites: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EntityMentions {
    pub websites: Vec<(String, f64)>,
    pub actors: Vec<(String, f64)>,
}

impl EntityMentions {
    pub fn is_empty(&self) -> bool {
        self.websites.is_empty() && self.actors.is_empty()
    }

    /// Scores of every mentioned website and actor, pooled.
    pub fn pooled_scores(&self) -> impl Iterator<Item = f64> + '_ {
        self.websites.iter().chain(&self.actors).map(|(_, s)| *s)
    }
}

pub fn canonical_domain(domain: &str) -> String {
    let d = domain.trim().to_lowercase();
    let d = d.trim_end_matches('.');
    d.strip_prefix("www.").unwrap_or(d).to_string()
}

impl KnowledgeBase {
    pub fn builder() -> KnowledgeBaseBuilder {
        KnowledgeBaseBuilder::default()
    }

    pub fn counts(&self) -> LoadCounts {
        LoadCounts {
            websites: self.website_scores.len(),
            actors: self.actor_scores.len(),
            news_sites: self.news_site_names.len(),
            political_terms: self.political_terms.len(),
            parties_and_actors: self.party_and_actor_names.len(),
            sentiment_tokens: self.sentiment_lexicon.len(),
            page_websites: self.page_websites.len(),
        }
    }

    /// Finds listed websites and political actors mentioned in `text`.
    ///
    /// Websites match on the host of a URL or bare domain token (subdomains
    /// included). Actors match as whole phrases on word boundaries; at each
    /// position the longest listed name wins.
    pub fn match_entities(&self, text: &str) -> EntityMentions {
        let mut mentions = EntityMentions::default();
        if text.is_empty() {
            return mentions;
        }

        let mut seen_sites = HashSet::new();
        for chunk in text.split_whitespace() {
            let Some(host) = host_of(chunk) else { continue };
            if let Some((domain, score)) = self.lookup_host(&host) {
                if seen_sites.insert(domain.clone()) {
                    mentions.websites.push((domain, score));
                }
            }
        }

        let tokens = tokenize(text);
        let mut seen_actors = HashSet::new();
        let mut i = 0;
        while i < tokens.len() {
            let best = self
                .actor_index
                .get(&tokens[i])
                .into_iter()
                .flatten()
                .filter(|p| tokens[i..].starts_with(&p.tokens))
                .max_by_key(|p| p.tokens.len());
            match best {
                Some(p) => {
                    if seen_actors.insert(p.text.clone()) {
                        mentions.actors.push((p.text.clone(), self.actor_scores[&p.text]));
                    }
                    i += p.tokens.len();
                }
                None => i += 1,
            }
        }
        mentions
    }

    /// Resolves a host against the website list, trying parent domains so
    /// `edition.cnn.com` resolves to `cnn.com`.
    fn lookup_host(&self, host: &str) -> Option<(String, f64)> {
        let mut candidate = host;
        loop {
            if let Some(&score) = self.website_scores.get(candidate) {
                return Some((candidate.to_string(), score));
            }
            let (_, rest) = candidate.split_once('.')?;
            if !rest.contains('.') {
                return None;
            }
            candidate = rest;
        }
    }

    /// Domains a page or group represents: the explicit mapping first, then a
    /// listed domain whose name (with or without TLD) equals the source name.
    pub fn websites_for_page(&self, source_name: &str) -> Vec<(String, f64)> {
        let canon = canonicalize(source_name);
        if canon.is_empty() {
            return Vec::new();
        }
        if let Some(domains) = self.page_websites.get(&canon) {
            return domains
                .iter()
                .filter_map(|d| self.website_scores.get(d).map(|&s| (d.clone(), s)))
                .collect();
        }
        let squashed = canon.replace(' ', "");
        self.website_scores
            .iter()
            .find(|(domain, _)| {
                let stem = domain.rsplit_once('.').map_or(domain.as_str(), |(s, _)| s);
                canonicalize(domain).replace(' ', "") == squashed
                    || canonicalize(stem).replace(' ', "") == squashed
            })
            .map(|(d, &s)| vec![(d.clone(), s)])
            .unwrap_or_default()
    }
}

/// Host of a URL-like or bare-domain whitespace chunk, lower-cased, without
/// `www.`. Returns `None` for chunks that are not domain-shaped.
fn host_of(chunk: &str) -> Option<String> {
    let trimmed = chunk.trim_matches(|c: char| !c.is_alphanumeric());
    let lower = trimmed.to_lowercase();
    let rest = match lower.split_once("://") {
        Some((_, rest)) => rest,
        None => lower.as_str(),
    };
    let host = rest.split(['/', '?', '#']).next()?;
    let host = host.rsplit_once('@').map_or(host, |(_, h)| h);
    let host = host.split(':').next()?;
    let host = host.strip_prefix("www.").unwrap_or(host);
    let valid = host.contains('.')
        && !host.starts_with('.')
        && !host.ends_with('.')
        && host.chars().all(|c| c.is_alphanumeric() || c == '.' || c == '-');
    valid.then(|| host.to_string())
}

#[derive(Debug, Default)]
pub struct KnowledgeBaseBuilder {
    kb: KnowledgeBase,
    synonyms: Option<Vec<String>>,
}

impl KnowledgeBaseBuilder {
    pub fn website(mut self, domain: &str, score: f64) -> Self {
        self.kb.website_scores.insert(canonical_domain(domain), score);
        self
    }

    pub fn actor(mut self, name: &str, score: f64) -> Self {
        self.kb.actor_scores.insert(collapse(name), score);
        self
    }

    pub fn news_site(mut self, name: &str) -> Self {
        self.kb.news_site_names.insert(canonicalize(name));
        self
    }

    pub fn party_or_actor(mut self, name: &str) -> Self {
        self.kb.party_and_actor_names.insert(canonicalize(name));
        self
    }

    pub fn sentiment(mut self, token: &str, weight: f64) -> Self {
        self.kb.sentiment_lexicon.insert(token.trim().to_lowercase(), weight);
        self
    }

    pub fn political_synonyms<I: IntoIterator<Item = S>, S: AsRef<str>>(mut self, terms: I) -> Self {
        self.synonyms = Some(terms.into_iter().map(|t| canonicalize(t.as_ref())).collect());
        self
    }

    pub fn page_website(mut self, source_name: &str, domain: &str) -> Self {
        self.kb
            .page_websites
            .entry(canonicalize(source_name))
            .or_default()
            .push(canonical_domain(domain));
        self
    }

    pub fn build(mut self) -> KnowledgeBase {
        let terms: BTreeSet<String> = match self.synonyms {
            None => DEFAULT_POLITICAL_TERMS.iter().map(|s| s.to_string()).collect(),
            Some(list) => list.into_iter().filter(|t| !t.is_empty()).collect(),
        };
        self.kb.political_terms = terms;
        self.kb.political_terms.insert("political".into());

        let mut index: HashMap<String, Vec<Phrase>> = HashMap::new();
        for name in self.kb.actor_scores.keys() {
            let phrase = Phrase { text: name.clone(), tokens: tokenize(name) };
            if let Some(first) = phrase.tokens.first() {
                index.entry(first.clone()).or_default().push(phrase);
            }
        }
        self.kb.actor_index = index;
        self.kb
    }
}

pub fn load_knowledge_base(dir: &Path) -> Result<KnowledgeBase> {
    let mut b = KnowledgeBase::builder();
    for (domain, score) in read_scores(dir, WEBSITES_FILE)? {
        b = b.website(&domain, score);
    }
    for (name, score) in read_scores(dir, ACTORS_FILE)? {
        b = b.actor(&name, score);
    }
    for name in read_list(dir, NEWS_SITES_FILE)? {
        b = b.news_site(&name);
    }
    for name in read_list(dir, PARTIES_ACTORS_FILE)? {
        b = b.party_or_actor(&name);
    }
    for (token, weight) in read_scores(dir, SENTIMENT_FILE)? {
        b = b.sentiment(&token, weight);
    }
    if dir.join(SYNONYMS_FILE).exists() {
        b = b.political_synonyms(read_list(dir, SYNONYMS_FILE)?);
    }
    if dir.join(PAGE_WEBSITES_FILE).exists() {
        for (line, row) in read_rows(dir, PAGE_WEBSITES_FILE)? {
            let [name, domain] = row.as_slice() else {
                return Err(parse_err(PAGE_WEBSITES_FILE, line, "expected source_name,domain"));
            };
            b = b.page_website(name, domain);
        }
    }
    let kb = b.build();
    log::info!("loaded knowledge base from {}: {:?}", dir.display(), kb.counts());
    Ok(kb)
}

fn parse_err(file: &str, line: usize, reason: impl Into<String>) -> Error {
    Error::Parse { file: file.to_string(), line, reason: reason.into() }
}

fn read_file(dir: &Path, file: &str) -> Result<String> {
    let path = dir.join(file);
    if !path.exists() {
        return Err(Error::MissingFile(path));
    }
    fs::read_to_string(&path).map_err(|e| Error::io(path.display().to_string(), e))
}

fn read_list(dir: &Path, file: &str) -> Result<Vec<String>> {
    Ok(read_file(dir, file)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

fn read_rows(dir: &Path, file: &str) -> Result<Vec<(usize, Vec<String>)>> {
    let content = read_file(dir, file)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(content.as_bytes());
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(file, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        rows.push((line, rec.iter().map(String::from).collect()));
    }
    Ok(rows)
}

/// Reads `key,score` rows. A non-numeric score on the first row is a header.
fn read_scores(dir: &Path, file: &str) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    for (idx, (line, row)) in read_rows(dir, file)?.into_iter().enumerate() {
        let [key, score] = row.as_slice() else {
            return Err(parse_err(file, line, "expected two columns"));
        };
        let score: f64 = match score.parse() {
            Ok(v) => v,
            Err(_) if idx == 0 => continue,
            Err(_) => return Err(parse_err(file, line, format!("invalid score {score:?}"))),
        };
        if !(-1.0..=1.0).contains(&score) {
            return Err(Error::ScoreOutOfRange { file: file.to_string(), line });
        }
        if key.is_empty() {
            return Err(parse_err(file, line, "empty key"));
        }
        out.push((key.clone(), score));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_kb(dir: &Path, files: &[(&str, &str)]) {
        let defaults = [
            (WEBSITES_FILE, "domain,score\nbreitbart.com,0.9\nnytimes.com,-0.6\n"),
            (ACTORS_FILE, "name,score\nJoe  Biden,-0.8\n"),
            (NEWS_SITES_FILE, "The New York Times\n"),
            (PARTIES_ACTORS_FILE, "Democratic Party\n"),
            (SENTIMENT_FILE, "good,1\nbad,-1\n"),
        ];
        for (name, content) in defaults {
            fs::write(dir.join(name), content).unwrap();
        }
        for (name, content) in files {
            fs::write(dir.join(name), content).unwrap();
        }
    }

    fn sample() -> KnowledgeBase {
        KnowledgeBase::builder()
            .website("nytimes.com", -0.6)
            .website("breitbart.com", 0.9)
            .actor("joe biden", -0.8)
            .actor("biden", -0.7)
            .actor("ted cruz", 0.8)
            .build()
    }

    #[test]
    fn loads_fixture_directory() {
        let dir = tempfile::tempdir().unwrap();
        write_kb(dir.path(), &[]);
        let kb = load_knowledge_base(dir.path()).unwrap();
        assert_eq!(kb.website_scores["breitbart.com"], 0.9);
        assert_eq!(kb.actor_scores["joe biden"], -0.8);
        assert!(kb.news_site_names.contains("the new york times"));
        assert_eq!(kb.political_terms.len(), DEFAULT_POLITICAL_TERMS.len());
        assert_eq!(kb.counts().sentiment_tokens, 2);
    }

    #[test]
    fn empty_synonym_file_leaves_political_floor() {
        let dir = tempfile::tempdir().unwrap();
        write_kb(dir.path(), &[(SYNONYMS_FILE, "")]);
        let kb = load_knowledge_base(dir.path()).unwrap();
        assert_eq!(kb.political_terms, BTreeSet::from(["political".to_string()]));
    }

    #[test]
    fn out_of_range_score_is_fatal_with_line() {
        let dir = tempfile::tempdir().unwrap();
        write_kb(dir.path(), &[(ACTORS_FILE, "name,score\nsomeone,0.5\nted cruz,2.0\n")]);
        let err = load_knowledge_base(dir.path()).unwrap_err();
        assert_eq!(err.to_string(), "actors.csv: score out of range line 3");
    }

    #[test]
    fn missing_file_is_named() {
        let dir = tempfile::tempdir().unwrap();
        write_kb(dir.path(), &[]);
        fs::remove_file(dir.path().join(NEWS_SITES_FILE)).unwrap();
        let err = load_knowledge_base(dir.path()).unwrap_err();
        assert!(err.to_string().contains("news_sites.txt"), "{err}");
    }

    #[test]
    fn matches_urls_and_bare_domains() {
        let kb = sample();
        let m = kb.match_entities("see nytimes.com/story");
        assert_eq!(m.websites, vec![("nytimes.com".to_string(), -0.6)]);
        let m = kb.match_entities("(https://www.Breitbart.com/politics?x=1) and https://edition.nytimes.com");
        assert_eq!(
            m.websites,
            vec![("breitbart.com".to_string(), 0.9), ("nytimes.com".to_string(), -0.6)]
        );
        assert!(kb.match_entities("notnytimes.com bit.ly/abc").websites.is_empty());
    }

    #[test]
    fn matches_actors_on_word_boundaries() {
        let kb = sample();
        let m = kb.match_entities("I met Joe Biden today");
        assert_eq!(m.actors, vec![("joe biden".to_string(), -0.8)]);
        assert!(kb.match_entities("Bidenomics explained").is_empty());
        let m = kb.match_entities("TED CRUZ and biden");
        assert_eq!(
            m.actors,
            vec![("ted cruz".to_string(), 0.8), ("biden".to_string(), -0.7)]
        );
        assert!(kb.match_entities("nothing here").is_empty());
        assert!(kb.match_entities("").is_empty());
    }

    #[test]
    fn page_website_resolution() {
        let kb = KnowledgeBase::builder()
            .website("breitbart.com", 0.9)
            .website("nytimes.com", -0.6)
            .page_website("The New York Times", "nytimes.com")
            .build();
        assert_eq!(kb.websites_for_page("the new york times!"), vec![("nytimes.com".into(), -0.6)]);
        assert_eq!(kb.websites_for_page("Breitbart"), vec![("breitbart.com".into(), 0.9)]);
        assert!(kb.websites_for_page("Latinos Conservadores").is_empty());
    }
}
