//! Mechanized mapping-revision guideline.
//!
//! The guideline has three steps: damp any relation that dominates its
//! dimension, rescale any dimension that dominates the total, and recheck every
//! mapping against the meaning of its dimension. The first two are detected
//! from run data; the third cannot be automated and is always emitted as a
//! reminder.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::contribution::{contribution_table, single_experiment, ContributionReport};
use crate::error::{Error, Result};
use crate::model::{Dimension, Experiment, ScaleVector};
use crate::scoring::SiteScore;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdviseThresholds {
    /// Mean share of a dimension subtotal above which one relation dominates.
    pub relation_dominance: f64,
    /// Share of the run total above which one dimension dominates.
    pub dimension_dominance: f64,
    /// Share of the run total below which a dimension is negligible.
    pub dimension_negligible: f64,
    /// Dimensions with at least this many relations are checked for low dispersion.
    pub low_dispersion_min_attributes: usize,
}

impl Default for AdviseThresholds {
    fn default() -> Self {
        AdviseThresholds {
            relation_dominance: 0.6,
            dimension_dominance: 0.25,
            dimension_negligible: 0.05,
            low_dispersion_min_attributes: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Advice {
    RelationDominates {
        dimension: Dimension,
        relation: String,
        mean_share: f64,
    },
    DimensionDominates {
        dimension: Dimension,
        contribution_pct: f64,
    },
    DimensionNegligible {
        dimension: Dimension,
        contribution_pct: f64,
    },
    LowDispersion {
        dimension: Dimension,
        std_dev: f64,
        attribute_count: usize,
    },
    /// A one-relation mapping always "dominates" itself, so it is not checked.
    SingleRelation { dimension: Dimension },
    RecheckMappings,
}

impl Advice {
    pub fn is_dominance(&self) -> bool {
        matches!(self, Advice::RelationDominates { .. } | Advice::DimensionDominates { .. })
    }

    pub fn suggested_action(&self) -> String {
        match self {
            Advice::RelationDominates { relation, dimension, .. } => format!(
                "lower the weight of `{relation}` so it no longer drowns out the other {dimension} relations"
            ),
            Advice::DimensionDominates { dimension, .. } => {
                format!("scale down {dimension} (reduce its scale parameter relative to the others)")
            }
            Advice::DimensionNegligible { dimension, .. } => {
                format!("scale up {dimension} or add relations so it can influence the total")
            }
            Advice::LowDispersion { dimension, .. } => format!(
                "{dimension} barely varies across sites despite many relations; check for overlapping relations"
            ),
            Advice::SingleRelation { dimension } => {
                format!("{dimension} has a single relation; relation dominance is not assessed")
            }
            Advice::RecheckMappings => {
                "recheck every mapping against the meaning of its 8C dimension; add or delete relations as needed"
                    .to_string()
            }
        }
    }
}

impl fmt::Display for Advice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Advice::RelationDominates {
                dimension,
                relation,
                mean_share,
            } => write!(
                f,
                "RelationDominates({dimension}, {relation}, {:.2}%)",
                mean_share * 100.0
            ),
            Advice::DimensionDominates {
                dimension,
                contribution_pct,
            } => write!(f, "DimensionDominates({dimension}, {contribution_pct:.2}%)"),
            Advice::DimensionNegligible {
                dimension,
                contribution_pct,
            } => write!(f, "DimensionNegligible({dimension}, {contribution_pct:.2}%)"),
            Advice::LowDispersion {
                dimension,
                std_dev,
                attribute_count,
            } => write!(
                f,
                "LowDispersion({dimension}, std_dev {std_dev:.2}, {attribute_count} relations)"
            ),
            Advice::SingleRelation { dimension } => write!(f, "Note({dimension}: single relation)"),
            Advice::RecheckMappings => f.write_str("Recheck"),
        }?;
        write!(f, ": {}", self.suggested_action())
    }
}

pub fn advise(scores: &[SiteScore], experiment: &Experiment, thresholds: &AdviseThresholds) -> Result<Vec<Advice>> {
    let run_experiment = single_experiment(scores)?;
    if run_experiment != experiment.id {
        return Err(Error::MixedExperiments(format!(
            "run uses {run_experiment}, advice requested for {}",
            experiment.id
        )));
    }
    let report = contribution_table(scores)?;
    let mut out = Vec::new();

    for dimension in Dimension::ALL {
        let count = experiment.relation_count(dimension);
        if count == 1 {
            out.push(Advice::SingleRelation { dimension });
            continue;
        }
        for (i, relation) in experiment.mapping(dimension).into_iter().flat_map(|m| &m.relations).enumerate() {
            if let Some(mean_share) = mean_relation_share(scores, dimension, i) {
                if mean_share > thresholds.relation_dominance {
                    out.push(Advice::RelationDominates {
                        dimension,
                        relation: relation.name.clone(),
                        mean_share,
                    });
                }
            }
        }
    }

    for row in &report.rows {
        let share = row.contribution_pct / 100.0;
        if share > thresholds.dimension_dominance {
            out.push(Advice::DimensionDominates {
                dimension: row.dimension,
                contribution_pct: row.contribution_pct,
            });
        } else if share < thresholds.dimension_negligible {
            out.push(Advice::DimensionNegligible {
                dimension: row.dimension,
                contribution_pct: row.contribution_pct,
            });
        }
    }

    if let Some(row) = unique_min_dispersion(&report) {
        if row.attribute_count >= thresholds.low_dispersion_min_attributes {
            out.push(Advice::LowDispersion {
                dimension: row.dimension,
                std_dev: row.std_dev,
                attribute_count: row.attribute_count,
            });
        }
    }

    out.push(Advice::RecheckMappings);
    Ok(out)
}

/// Mean over sites (with a non-zero subtotal) of relation `index`'s share of
/// its dimension subtotal.
fn mean_relation_share(scores: &[SiteScore], dimension: Dimension, index: usize) -> Option<f64> {
    let shares: Vec<f64> = scores
        .iter()
        .filter_map(|s| {
            let d = s.dimension(dimension)?;
            let rs = d.relation_scores.get(index)?;
            (d.subtotal > 0.0).then(|| rs.score / d.subtotal)
        })
        .collect();
    (!shares.is_empty()).then(|| shares.iter().sum::<f64>() / shares.len() as f64)
}

fn unique_min_dispersion(report: &ContributionReport) -> Option<&super::contribution::ContributionRow> {
    let min = report.rows.iter().map(|r| r.std_dev).fold(f64::INFINITY, f64::min);
    let mut at_min = report.rows.iter().filter(|r| r.std_dev == min);
    let row = at_min.next()?;
    at_min.next().is_none().then_some(row)
}

/// Proposes a scale vector that equalizes dimension contributions.
///
/// Each `p_j` is inversely proportional to the dimension's contribution,
/// normalized so the smallest is 1 and rounded to two decimals. The divisor is
/// the power of ten that brings the mean scaled total into `[10, 100)`.
pub fn suggest_scale(contributions: &ContributionReport) -> Result<ScaleVector> {
    if let Some(row) = contributions.rows.iter().find(|r| r.contribution_pct.is_nan() || r.contribution_pct <= 0.0) {
        return Err(Error::ZeroContribution(row.dimension));
    }
    let max = contributions
        .rows
        .iter()
        .map(|r| r.contribution_pct)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut p = [1.0; 8];
    for row in &contributions.rows {
        p[row.dimension.index()] = round2(max / row.contribution_pct);
    }

    let mean_scaled: f64 = contributions.mean_total_raw
        * contributions
            .rows
            .iter()
            .map(|r| r.contribution_pct / 100.0 * p[r.dimension.index()])
            .sum::<f64>();
    let post_divisor = if mean_scaled > 0.0 && mean_scaled.is_finite() {
        decade_divisor(mean_scaled)
    } else {
        1.0
    };
    ScaleVector::new(p, post_divisor)
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn decade_divisor(value: f64) -> f64 {
    let mut exp = value.log10().floor() as i32 - 1;
    // correct for log10 rounding at exact decades
    while value / 10f64.powi(exp) >= 100.0 {
        exp += 1;
    }
    while value / 10f64.powi(exp) < 10.0 {
        exp -= 1;
    }
    10f64.powi(exp)
}
