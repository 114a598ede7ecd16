use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedSite {
    pub site: String,
    pub value: f64,
    /// 1-based competition rank.
    pub rank: usize,
}

/// Sites in descending value order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub ordered: Vec<RankedSite>,
}

impl Ranking {
    pub fn rank_of(&self, site: &str) -> Option<usize> {
        self.ordered.iter().find(|r| r.site == site).map(|r| r.rank)
    }

    pub fn len(&self) -> usize {
        self.ordered.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordered.is_empty()
    }

    pub fn sites(&self) -> Vec<&str> {
        self.ordered.iter().map(|r| r.site.as_str()).collect()
    }
}

/// Orders sites by descending value. Ties are listed by ascending site name
/// and share a rank; the following rank skips ("1, 1, 3").
pub fn rank_by(values: &[(String, f64)]) -> Result<Ranking> {
    let mut seen = HashSet::new();
    for (site, _) in values {
        if !seen.insert(site.as_str()) {
            return Err(Error::DuplicateSite(site.clone()));
        }
    }
    let mut sorted: Vec<&(String, f64)> = values.iter().collect();
    sorted.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.0.cmp(&b.0))
    });

    let mut ordered: Vec<RankedSite> = Vec::with_capacity(sorted.len());
    for (pos, (site, value)) in sorted.into_iter().enumerate() {
        let rank = match ordered.last() {
            Some(prev) if prev.value == *value => prev.rank,
            _ => pos + 1,
        };
        ordered.push(RankedSite {
            site: site.clone(),
            value: *value,
            rank,
        });
    }
    Ok(Ranking { ordered })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteRankDiff {
    pub site: String,
    pub expected_rank: usize,
    pub actual_rank: usize,
    pub abs_diff: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankDiffReport {
    /// In expected-order.
    pub per_site: Vec<SiteRankDiff>,
    pub mean_abs_diff: f64,
}

/// Per-site absolute rank displacement between two rankings of the same sites.
pub fn rank_diff(expected: &Ranking, actual: &Ranking) -> Result<RankDiffReport> {
    let actual_ranks: HashMap<&str, usize> = actual
        .ordered
        .iter()
        .map(|r| (r.site.as_str(), r.rank))
        .collect();
    let expected_sites: BTreeSet<&str> = expected.ordered.iter().map(|r| r.site.as_str()).collect();
    let actual_sites: BTreeSet<&str> = actual_ranks.keys().copied().collect();
    if expected_sites != actual_sites {
        let only_expected: Vec<_> = expected_sites.difference(&actual_sites).collect();
        let only_actual: Vec<_> = actual_sites.difference(&expected_sites).collect();
        return Err(Error::SiteSetMismatch(format!(
            "only in expected: {only_expected:?}; only in actual: {only_actual:?}"
        )));
    }

    let per_site: Vec<SiteRankDiff> = expected
        .ordered
        .iter()
        .map(|e| {
            let actual_rank = actual_ranks[e.site.as_str()];
            SiteRankDiff {
                site: e.site.clone(),
                expected_rank: e.rank,
                actual_rank,
                abs_diff: e.rank.abs_diff(actual_rank),
            }
        })
        .collect();
    let mean_abs_diff = if per_site.is_empty() {
        0.0
    } else {
        per_site.iter().map(|d| d.abs_diff as f64).sum::<f64>() / per_site.len() as f64
    };
    Ok(RankDiffReport {
        per_site,
        mean_abs_diff,
    })
}
