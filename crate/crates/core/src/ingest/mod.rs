//! Page acquisition and reduction to the statistics the scoring formulas
//! consume: a start-tag census plus a lowercase text corpus.

mod census;
mod fetch;

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::KeywordMatch;

pub use census::{census, TagCensus};
pub use fetch::{fetch_page, FetchConfig, DEFAULT_MAX_BYTES, DEFAULT_USER_AGENT, MAX_REDIRECTS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Url,
    File,
}

/// Where a page came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageSource {
    pub kind: SourceKind,
    pub locator: String,
    pub fetched_at: DateTime<Utc>,
    pub byte_length: u64,
}

/// Raw page bytes plus provenance.
#[derive(Debug, Clone)]
pub struct RawPage {
    pub bytes: Vec<u8>,
    pub source: PageSource,
}

impl RawPage {
    pub fn parse(&self) -> Result<DocumentStats> {
        parse_stats(&self.bytes).map(|stats| stats.with_source(self.source.clone()))
    }
}

/// Tag census and searchable text of one page.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentStats {
    pub total_tags: u64,
    pub tag_counts: BTreeMap<String, u64>,
    /// The whole document source, lowercased, including inline script and style.
    pub text_corpus: String,
    pub source: Option<PageSource>,
}

impl DocumentStats {
    pub fn with_source(mut self, source: PageSource) -> Self {
        self.source = Some(source);
        self
    }

    pub fn tag_count(&self, tag: &str) -> u64 {
        self.tag_counts.get(tag).copied().unwrap_or(0)
    }

    /// Case-insensitive substring search of the text corpus.
    pub fn keyword_present(&self, pattern: &str) -> bool {
        keyword_present(self, pattern)
    }
}

/// Reduces raw bytes to [`DocumentStats`]. Invalid UTF-8 is replaced lossily.
pub fn parse_stats(raw: &[u8]) -> Result<DocumentStats> {
    let text = String::from_utf8_lossy(raw);
    let TagCensus { total, counts } = census(&text);
    if total == 0 {
        return Err(Error::EmptyDocument);
    }
    Ok(DocumentStats {
        total_tags: total,
        tag_counts: counts,
        text_corpus: text.to_lowercase(),
        source: None,
    })
}

pub fn keyword_present(stats: &DocumentStats, pattern: &str) -> bool {
    keyword_present_with(stats, pattern, KeywordMatch::Substring)
}

pub fn keyword_present_with(stats: &DocumentStats, pattern: &str, mode: KeywordMatch) -> bool {
    let needle = pattern.to_lowercase();
    if needle.is_empty() {
        return false;
    }
    match mode {
        KeywordMatch::Substring => stats.text_corpus.contains(&needle),
        KeywordMatch::WordBoundary => {
            let hay = stats.text_corpus.as_str();
            hay.match_indices(&needle).any(|(at, m)| {
                let before = hay[..at].chars().next_back();
                let after = hay[at + m.len()..].chars().next();
                !before.is_some_and(char::is_alphanumeric) && !after.is_some_and(char::is_alphanumeric)
            })
        }
    }
}

/// Reads a local HTML file.
pub fn load_page(path: impl AsRef<Path>) -> Result<RawPage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(RawPage {
        source: PageSource {
            kind: SourceKind::File,
            locator: path.display().to_string(),
            fetched_at: Utc::now(),
            byte_length: bytes.len() as u64,
        },
        bytes,
    })
}

/// True when `locator` looks like an http(s) URL rather than a file path.
pub fn is_url(locator: &str) -> bool {
    let lower = locator.trim_start().to_ascii_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://")
}
