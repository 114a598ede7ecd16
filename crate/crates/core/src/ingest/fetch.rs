use std::time::Duration;

use chrono::Utc;
use reqwest::redirect::Policy;

use super::{PageSource, RawPage, SourceKind};
use crate::error::{Error, Result};

pub const DEFAULT_USER_AGENT: &str = "octoscore/1.0";
pub const DEFAULT_MAX_BYTES: u64 = 8 * 1024 * 1024;
pub const MAX_REDIRECTS: usize = 5;

#[derive(Debug, Clone)]
pub struct FetchConfig {
    pub timeout: Duration,
    pub user_agent: String,
    pub max_bytes: u64,
}

impl Default for FetchConfig {
    fn default() -> Self {
        FetchConfig {
            timeout: Duration::from_secs(20),
            user_agent: DEFAULT_USER_AGENT.to_string(),
            max_bytes: DEFAULT_MAX_BYTES,
        }
    }
}

impl FetchConfig {
    pub fn client(&self) -> Result<reqwest::Client> {
        reqwest::Client::builder()
            .redirect(Policy::limited(MAX_REDIRECTS))
            .timeout(self.timeout)
            .user_agent(self.user_agent.clone())
            .build()
            .map_err(|e| Error::Internal(format!("building HTTP client: {e}")))
    }
}

/// GETs a home page, following up to [`MAX_REDIRECTS`] redirects.
pub async fn fetch_page(client: &reqwest::Client, url: &str, config: &FetchConfig) -> Result<RawPage> {
    let parsed = url::Url::parse(url).map_err(|_| Error::InvalidUrl(url.to_string()))?;
    if !matches!(parsed.scheme(), "http" | "https") || parsed.host().is_none() {
        return Err(Error::InvalidUrl(url.to_string()));
    }

    let network = |e: reqwest::Error| Error::Network {
        url: url.to_string(),
        message: describe(&e),
    };

    let mut response = client.get(parsed).send().await.map_err(network)?;
    let status = response.status();
    if !status.is_success() {
        return Err(Error::Http {
            url: url.to_string(),
            status: status.as_u16(),
        });
    }
    let too_large = || Error::TooLarge {
        url: url.to_string(),
        limit: config.max_bytes,
    };
    if response.content_length().is_some_and(|n| n > config.max_bytes) {
        return Err(too_large());
    }

    let mut bytes = Vec::new();
    while let Some(chunk) = response.chunk().await.map_err(network)? {
        if (bytes.len() + chunk.len()) as u64 > config.max_bytes {
            return Err(too_large());
        }
        bytes.extend_from_slice(&chunk);
    }

    Ok(RawPage {
        source: PageSource {
            kind: SourceKind::Url,
            locator: url.to_string(),
            fetched_at: Utc::now(),
            byte_length: bytes.len() as u64,
        },
        bytes,
    })
}

fn describe(e: &reqwest::Error) -> String {
    if e.is_timeout() {
        "timed out".to_string()
    } else if e.is_redirect() {
        format!("more than {MAX_REDIRECTS} redirects")
    } else if e.is_connect() {
        format!("connection failed: {e}")
    } else {
        e.to_string()
    }
}
