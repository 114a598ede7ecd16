//! Run analytics: rank agreement against conversion-rate ground truth,
//! dimension contributions, category averages and the revision advisor.

mod advise;
mod contribution;
mod ranking;
mod truth;

use serde::{Deserialize, Serialize};

pub use advise::{advise, suggest_scale, Advice, AdviseThresholds};
pub use contribution::{category_averages, contribution_table, ContributionReport, ContributionRow};
pub use ranking::{rank_by, rank_diff, RankDiffReport, RankedSite, Ranking, SiteRankDiff};
pub use truth::{GroundTruth, TruthEntry};

use crate::error::Result;
use crate::model::Experiment;
use crate::scoring::SiteScore;

/// Ranks the scored sites by scaled total and compares against the
/// conversion-rate order.
pub fn compare_to_truth(scores: &[SiteScore], truth: &GroundTruth) -> Result<RankDiffReport> {
    let expected = rank_by(&truth.values())?;
    let actual = rank_by(
        &scores
            .iter()
            .map(|s| (s.site.clone(), s.total_scaled))
            .collect::<Vec<_>>(),
    )?;
    rank_diff(&expected, &actual)
}

/// Analytics attached to a finished run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_diff: Option<RankDiffReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contributions: Option<ContributionReport>,
    #[serde(default)]
    pub advices: Vec<Advice>,
}

impl RunReport {
    /// Computes whatever analytics the run supports. Contribution and advice
    /// are skipped for runs with no scores or a zero total.
    pub fn build(
        scores: &[SiteScore],
        experiment: &Experiment,
        truth: Option<&GroundTruth>,
        thresholds: &AdviseThresholds,
    ) -> Result<Self> {
        let rank_diff = truth.map(|t| compare_to_truth(scores, t)).transpose()?;
        let contributions = contribution_table(scores).ok();
        let advices = if contributions.is_some() {
            advise(scores, experiment, thresholds)?
        } else {
            Vec::new()
        };
        Ok(RunReport {
            rank_diff,
            contributions,
            advices,
        })
    }
}
