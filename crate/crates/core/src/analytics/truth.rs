use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthEntry {
    pub site: String,
    /// Conversion rate in percent.
    pub cr: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
}

/// Conversion-rate ground truth for a set of sites.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub entries: Vec<TruthEntry>,
}

#[derive(Deserialize)]
struct Row {
    site: String,
    cr: String,
    #[serde(default)]
    category: Option<String>,
}

impl GroundTruth {
    pub fn new(entries: Vec<TruthEntry>) -> Result<Self> {
        let truth = GroundTruth { entries };
        truth.validate()?;
        Ok(truth)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for e in &self.entries {
            if !(0.0..=100.0).contains(&e.cr) {
                return Err(Error::GroundTruth(format!(
                    "cr {} for `{}` is outside [0, 100]",
                    e.cr, e.site
                )));
            }
            if !seen.insert(e.site.as_str()) {
                return Err(Error::DuplicateSite(e.site.clone()));
            }
        }
        Ok(())
    }

    /// Parses `site,cr,category` CSV. A trailing `%` on `cr` is accepted and
    /// `category` may be absent or empty.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .flexible(true)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| Error::GroundTruth(e.to_string()))?
            .clone();
        if headers.get(0) != Some("site") || headers.get(1) != Some("cr") {
            return Err(Error::GroundTruth(format!(
                "expected header `site,cr,category`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut entries = Vec::new();
        for row in reader.deserialize::<Row>() {
            let row = row.map_err(|e| Error::GroundTruth(e.to_string()))?;
            let cr = row
                .cr
                .trim_end_matches('%')
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::GroundTruth(format!("bad cr `{}` for `{}`", row.cr, row.site)))?;
            entries.push(TruthEntry {
                site: row.site,
                cr,
                category: row.category.filter(|c| !c.is_empty()),
            });
        }
        GroundTruth::new(entries)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(&text)
    }

    pub fn get(&self, site: &str) -> Option<&TruthEntry> {
        self.entries.iter().find(|e| e.site == site)
    }

    pub fn sites(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.site.as_str())
    }

    pub fn values(&self) -> Vec<(String, f64)> {
        self.entries.iter().map(|e| (e.site.clone(), e.cr)).collect()
    }
}
