//! Single-site and batch evaluation shared by the CLI and the HTTP service.

use std::collections::HashSet;

use chrono::Utc;
use futures::stream::{self, StreamExt};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{fetch_page, is_url, load_page, FetchConfig, RawPage};
use crate::model::Experiment;
use crate::scoring::{score_site, SiteScore};
use crate::store::{RunRecord, SiteFailure};

pub const DEFAULT_PARALLELISM: usize = 8;

/// One entry of a site list: a display label and a URL or file path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteSpec {
    pub label: String,
    pub locator: String,
}

impl SiteSpec {
    pub fn new(locator: impl Into<String>) -> Self {
        let locator = locator.into();
        SiteSpec {
            label: locator.clone(),
            locator,
        }
    }

    pub fn labeled(label: impl Into<String>, locator: impl Into<String>) -> Self {
        SiteSpec {
            label: label.into(),
            locator: locator.into(),
        }
    }
}

/// Parses a site list: one locator per line, optionally preceded by a label
/// and a tab (`Woman Within<TAB>https://...`). Blank lines and lines starting
/// with `#` are skipped.
pub fn parse_site_list(text: &str) -> Vec<SiteSpec> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|line| match line.rsplit_once('\t') {
            Some((label, locator)) if !label.trim().is_empty() => {
                SiteSpec::labeled(label.trim(), locator.trim())
            }
            _ => SiteSpec::new(line),
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub fetch: FetchConfig,
    pub parallelism: usize,
    /// Refuse network access; only local files may be evaluated.
    pub offline: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            fetch: FetchConfig::default(),
            parallelism: DEFAULT_PARALLELISM,
            offline: false,
        }
    }
}

pub struct Evaluator {
    client: reqwest::Client,
    options: EvalOptions,
}

impl Evaluator {
    pub fn new(options: EvalOptions) -> Result<Self> {
        if options.parallelism == 0 {
            return Err(Error::Validation("parallelism must be >= 1".into()));
        }
        Ok(Evaluator {
            client: options.fetch.client()?,
            options,
        })
    }

    pub async fn acquire(&self, locator: &str) -> Result<RawPage> {
        if is_url(locator) {
            if self.options.offline {
                return Err(Error::Offline(locator.to_string()));
            }
            fetch_page(&self.client, locator, &self.options.fetch).await
        } else {
            let path = locator.to_string();
            tokio::task::spawn_blocking(move || load_page(path))
                .await
                .map_err(|e| Error::Internal(e.to_string()))?
        }
    }

    pub async fn evaluate(&self, experiment: &Experiment, site: &SiteSpec) -> Result<SiteScore> {
        let page = self.acquire(&site.locator).await?;
        let stats = page.parse()?;
        score_site(experiment, &stats, &site.label)
    }

    /// Evaluates every site with bounded parallelism. Results keep input order;
    /// per-site failures are recorded rather than aborting the batch.
    pub async fn run_batch(&self, experiment: &Experiment, sites: &[SiteSpec]) -> Result<RunRecord> {
        let mut seen = HashSet::new();
        if let Some(dup) = sites.iter().find(|s| !seen.insert(s.label.as_str())) {
            return Err(Error::DuplicateSite(dup.label.clone()));
        }
        let started_at = Utc::now();
        let outcomes: Vec<(String, Result<SiteScore>)> = stream::iter(sites.iter().cloned())
            .map(|site| async move {
                let outcome = self.evaluate(experiment, &site).await;
                (site.label, outcome)
            })
            .buffered(self.options.parallelism)
            .collect()
            .await;

        let mut run = RunRecord {
            run_id: RunRecord::new_id(started_at),
            experiment_id: experiment.id.clone(),
            started_at,
            site_scores: Vec::new(),
            failures: Vec::new(),
        };
        for (site, outcome) in outcomes {
            match outcome {
                Ok(score) => run.site_scores.push(score),
                Err(e) => run.failures.push(SiteFailure {
                    site,
                    error: e.to_string(),
                }),
            }
        }
        Ok(run)
    }
}
