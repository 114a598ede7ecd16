//! File-backed persistence for experiments, runs and reports.
//!
//! Layout under the data directory:
//!
//! ```text
//! experiments/<id>.toml          one editable file per experiment
//! runs/<run_id>.json             append-only run records
//! reports/<run_id>/*.csv         exported reports
//! ```
//!
//! Every write goes to a temporary file in the target directory and is then
//! renamed into place.

pub mod defaults;
pub mod report;

use std::collections::HashSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::analytics::RunReport;
use crate::error::{Error, Result};
use crate::model::{is_valid_id, Experiment};
use crate::scoring::SiteScore;

pub const DATA_ENV: &str = "OCTOSCORE_DATA";
pub const DEFAULT_DATA_DIR: &str = "./octoscore-data";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteFailure {
    pub site: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: String,
    pub experiment_id: String,
    pub started_at: DateTime<Utc>,
    pub site_scores: Vec<SiteScore>,
    #[serde(default)]
    pub failures: Vec<SiteFailure>,
}

impl RunRecord {
    pub fn new_id(started_at: DateTime<Utc>) -> String {
        let suffix = uuid::Uuid::new_v4().simple().to_string();
        format!("{}-{}", started_at.format("%Y%m%dT%H%M%S%3fZ"), &suffix[..8])
    }

    /// Every site appears exactly once across scores and failures.
    pub fn validate(&self) -> Result<()> {
        if !is_valid_id(&self.run_id) {
            return Err(Error::Validation(format!("bad run id `{}`", self.run_id)));
        }
        let mut seen = HashSet::new();
        let sites = self
            .site_scores
            .iter()
            .map(|s| &s.site)
            .chain(self.failures.iter().map(|f| &f.site));
        for site in sites {
            if !seen.insert(site.as_str()) {
                return Err(Error::DuplicateSite(site.clone()));
            }
        }
        Ok(())
    }

    pub fn summary(&self) -> RunSummary {
        RunSummary {
            run_id: self.run_id.clone(),
            experiment_id: self.experiment_id.clone(),
            started_at: self.started_at,
            scored: self.site_scores.len(),
            failed: self.failures.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub run_id: String,
    pub experiment_id: String,
    pub started_at: DateTime<Utc>,
    pub scored: usize,
    pub failed: usize,
}

/// Resolves the data directory: explicit value, then `OCTOSCORE_DATA`, then
/// `./octoscore-data`.
pub fn resolve_data_dir(explicit: Option<&Path>) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(DATA_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_DATA_DIR))
}

#[derive(Debug, Clone)]
pub struct Store {
    root: PathBuf,
}

impl Store {
    /// Opens (creating if needed) a data directory. A directory without an
    /// `experiments/` folder is seeded with the shipped default experiments.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let store = Store { root: root.into() };
        let experiments = store.experiments_dir();
        let fresh = !experiments.exists();
        for dir in [experiments.clone(), store.runs_dir(), store.root.join("reports")] {
            std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        }
        if fresh {
            for (id, text) in defaults::SHIPPED {
                write_atomic(&experiments.join(format!("{id}.toml")), text.as_bytes())?;
            }
        }
        Ok(store)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn experiments_dir(&self) -> PathBuf {
        self.root.join("experiments")
    }

    fn runs_dir(&self) -> PathBuf {
        self.root.join("runs")
    }

    fn experiment_path(&self, id: &str) -> Result<PathBuf> {
        if !is_valid_id(id) {
            return Err(Error::UnknownExperiment(id.to_string()));
        }
        Ok(self.experiments_dir().join(format!("{id}.toml")))
    }

    pub fn report_dir(&self, run_id: &str) -> PathBuf {
        self.root.join("reports").join(run_id)
    }

    pub fn list_experiments(&self) -> Result<Vec<String>> {
        let mut ids = list_stems(&self.experiments_dir(), "toml")?;
        ids.sort();
        Ok(ids)
    }

    pub fn has_experiment(&self, id: &str) -> bool {
        self.experiment_path(id).is_ok_and(|p| p.exists())
    }

    pub fn load_experiment(&self, id: &str) -> Result<Experiment> {
        let path = self.experiment_path(id)?;
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(Error::UnknownExperiment(id.to_string()))
            }
            Err(e) => return Err(Error::io(path, e)),
        };
        let experiment = parse_experiment(&text)?;
        if experiment.id != id {
            return Err(Error::Validation(format!(
                "{} declares id `{}`",
                path.display(),
                experiment.id
            )));
        }
        Ok(experiment)
    }

    /// Writes (or replaces) an experiment file.
    pub fn save_experiment(&self, experiment: &Experiment) -> Result<()> {
        experiment.validate()?;
        let path = self.experiment_path(&experiment.id)?;
        write_atomic(&path, experiment_to_toml(experiment)?.as_bytes())
    }

    pub fn delete_experiment(&self, id: &str) -> Result<()> {
        let path = self.experiment_path(id)?;
        match std::fs::remove_file(&path) {
            Ok(()) => Ok(()),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(Error::UnknownExperiment(id.to_string())),
            Err(e) => Err(Error::io(path, e)),
        }
    }

    /// Persists a new run. Existing runs are never overwritten.
    pub fn save_run(&self, run: &RunRecord) -> Result<()> {
        run.validate()?;
        let path = self.runs_dir().join(format!("{}.json", run.run_id));
        let body = serde_json::to_vec_pretty(run).map_err(|e| Error::Internal(e.to_string()))?;
        let dir = self.runs_dir();
        let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| Error::io(&dir, e))?;
        tmp.write_all(&body).map_err(|e| Error::io(&path, e))?;
        tmp.persist_noclobber(&path)
            .map_err(|e| Error::Validation(format!("run `{}` already stored: {}", run.run_id, e.error)))?;
        Ok(())
    }

    pub fn load_run(&self, run_id: &str) -> Result<RunRecord> {
        if !is_valid_id(run_id) {
            return Err(Error::UnknownRun(run_id.to_string()));
        }
        let path = self.runs_dir().join(format!("{run_id}.json"));
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(Error::UnknownRun(run_id.to_string())),
            Err(e) => return Err(Error::io(path, e)),
        };
        serde_json::from_str(&text).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
    }

    /// Run summaries, newest first, optionally restricted to one experiment.
    pub fn list_runs(&self, experiment_id: Option<&str>) -> Result<Vec<RunSummary>> {
        let mut out = Vec::new();
        for id in list_stems(&self.runs_dir(), "json")? {
            let run = self.load_run(&id)?;
            if experiment_id.is_none_or(|e| e == run.experiment_id) {
                out.push(run.summary());
            }
        }
        out.sort_by(|a, b| b.started_at.cmp(&a.started_at).then_with(|| b.run_id.cmp(&a.run_id)));
        Ok(out)
    }

    /// Writes the run's report CSVs and returns their paths.
    pub fn export_report(&self, run: &RunRecord, analytics: &RunReport) -> Result<Vec<PathBuf>> {
        let dir = self.report_dir(&run.run_id);
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let mut files = vec![(report::SCORES_FILE, report::scores_csv(run))];
        if let Some(rd) = &analytics.rank_diff {
            files.push((report::RANK_DIFF_FILE, report::rank_diff_csv(rd)));
        }
        if let Some(c) = &analytics.contributions {
            files.push((report::CONTRIBUTIONS_FILE, report::contributions_csv(c)));
        }
        files
            .into_iter()
            .map(|(name, body)| {
                let path = dir.join(name);
                write_atomic(&path, body.as_bytes())?;
                Ok(path)
            })
            .collect()
    }
}

pub fn parse_experiment(text: &str) -> Result<Experiment> {
    let experiment: Experiment =
        toml::from_str(text).map_err(|e| Error::Validation(format!("experiment file: {e}")))?;
    experiment.validate()?;
    Ok(experiment)
}

pub fn experiment_to_toml(experiment: &Experiment) -> Result<String> {
    toml::to_string(experiment).map_err(|e| Error::Internal(format!("serializing experiment: {e}")))
}

fn list_stems(dir: &Path, ext: &str) -> Result<Vec<String>> {
    let entries = match std::fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(Error::io(dir, e)),
    };
    let mut out = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().is_some_and(|x| x == ext) {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                out.push(stem.to_string());
            }
        }
    }
    Ok(out)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}
