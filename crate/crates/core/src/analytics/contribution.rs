use serde::{Deserialize, Serialize};

use super::truth::GroundTruth;
use crate::error::{Error, Result};
use crate::model::Dimension;
use crate::scoring::SiteScore;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContributionRow {
    pub dimension: Dimension,
    pub attribute_count: usize,
    /// Share of the run's summed raw total, in percent.
    pub contribution_pct: f64,
    /// Population standard deviation of the subtotal across sites.
    pub std_dev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContributionReport {
    pub experiment_id: String,
    pub site_count: usize,
    pub mean_total_raw: f64,
    /// One row per dimension, in [`Dimension::ALL`] order.
    pub rows: Vec<ContributionRow>,
}

impl ContributionReport {
    pub fn row(&self, dimension: Dimension) -> &ContributionRow {
        &self.rows[dimension.index()]
    }
}

pub(crate) fn single_experiment(scores: &[SiteScore]) -> Result<&str> {
    let first = scores.first().ok_or(Error::EmptyRun)?;
    if let Some(other) = scores.iter().find(|s| s.experiment_id != first.experiment_id) {
        return Err(Error::MixedExperiments(format!(
            "{}, {}",
            first.experiment_id, other.experiment_id
        )));
    }
    Ok(&first.experiment_id)
}

/// Each dimension's share of the summed raw total over all sites, plus the
/// dispersion of its subtotal.
pub fn contribution_table(scores: &[SiteScore]) -> Result<ContributionReport> {
    let experiment_id = single_experiment(scores)?.to_string();
    let grand_total: f64 = scores.iter().map(|s| s.total_raw).sum();
    if grand_total == 0.0 {
        return Err(Error::ZeroTotal);
    }
    let n = scores.len() as f64;

    let rows = Dimension::ALL
        .iter()
        .map(|&dimension| {
            let values: Vec<f64> = scores.iter().map(|s| s.subtotal(dimension)).collect();
            let sum: f64 = values.iter().sum();
            let mean = sum / n;
            let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            ContributionRow {
                dimension,
                attribute_count: scores[0]
                    .dimension(dimension)
                    .map_or(0, |d| d.relation_scores.len()),
                contribution_pct: 100.0 * sum / grand_total,
                std_dev: variance.sqrt(),
            }
        })
        .collect();

    Ok(ContributionReport {
        experiment_id,
        site_count: scores.len(),
        mean_total_raw: grand_total / n,
        rows,
    })
}

/// Mean scaled total per ground-truth category, in order of first appearance
/// in `truth`.
pub fn category_averages(scores: &[SiteScore], truth: &GroundTruth) -> Result<Vec<(String, f64)>> {
    if scores.is_empty() {
        return Err(Error::MissingCategory("<empty run>".into()));
    }
    let mut buckets: Vec<(String, f64, usize)> = Vec::new();
    for entry in &truth.entries {
        if let Some(cat) = &entry.category {
            if !buckets.iter().any(|(c, _, _)| c == cat) {
                buckets.push((cat.clone(), 0.0, 0));
            }
        }
    }
    for score in scores {
        let category = truth
            .get(&score.site)
            .and_then(|e| e.category.as_ref())
            .ok_or_else(|| Error::MissingCategory(score.site.clone()))?;
        let bucket = buckets
            .iter_mut()
            .find(|(c, _, _)| c == category)
            .expect("category collected above");
        bucket.1 += score.total_scaled;
        bucket.2 += 1;
    }
    Ok(buckets
        .into_iter()
        .filter(|(_, _, n)| *n > 0)
        .map(|(c, sum, n)| (c, sum / n as f64))
        .collect())
}
