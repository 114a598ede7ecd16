use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The page has no element tags, so tag ratios are undefined.
    #[error("document contains no HTML element tags")]
    EmptyDocument,

    #[error("network error fetching {url}: {message}")]
    Network { url: String, message: String },

    #[error("HTTP status {status} fetching {url}")]
    Http { url: String, status: u16 },

    #[error("response from {url} exceeds the {limit}-byte cap")]
    TooLarge { url: String, limit: u64 },

    #[error("invalid locator `{0}`: expected an absolute http(s) URL")]
    InvalidUrl(String),

    #[error("offline mode: refusing to fetch {0}")]
    Offline(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("unknown run `{0}`")]
    UnknownRun(String),

    #[error("experiment `{0}` already exists")]
    ExperimentExists(String),

    #[error("duplicate site `{0}`")]
    DuplicateSite(String),

    #[error("site sets differ: {0}")]
    SiteSetMismatch(String),

    #[error("run contains no site scores")]
    EmptyRun,

    #[error("total score over the run is zero")]
    ZeroTotal,

    #[error("dimension {0} has zero contribution")]
    ZeroContribution(crate::model::Dimension),

    #[error("no category for site `{0}`")]
    MissingCategory(String),

    #[error("scores come from more than one experiment ({0})")]
    MixedExperiments(String),

    #[error("no site could be evaluated")]
    NoSuccessfulSites,

    #[error("malformed ground truth: {0}")]
    GroundTruth(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line front end: 2 for anything caused
    /// by user input or the outside world, 3 for internal failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Internal(_) => 3,
            _ => 2,
        }
    }
}
