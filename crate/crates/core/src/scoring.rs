//! Relation, dimension and site scores.
//!
//! A tag relation scores `count / total_tags * scalar * weight`; a keyword
//! relation scores its weight when the keyword appears in the page and zero
//! otherwise. A dimension's subtotal is the sum of its relation scores, the raw
//! total is the sum of the eight subtotals, and the scaled total is
//! `sum(subtotal_j * p_j) / post_divisor`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{keyword_present_with, DocumentStats};
use crate::model::{Dimension, Experiment, KeywordMatch, Mapping, Relation, RelationKind, ScaleVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationScore {
    pub relation: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionScore {
    pub dimension: Dimension,
    pub relation_scores: Vec<RelationScore>,
    pub subtotal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteScore {
    pub site: String,
    pub experiment_id: String,
    /// One entry per dimension, in [`Dimension::ALL`] order.
    pub dimension_scores: Vec<DimensionScore>,
    pub total_raw: f64,
    pub total_scaled: f64,
}

impl SiteScore {
    pub fn subtotal(&self, dimension: Dimension) -> f64 {
        self.dimension_scores
            .iter()
            .find(|d| d.dimension == dimension)
            .map_or(0.0, |d| d.subtotal)
    }

    /// The eight subtotals in [`Dimension::ALL`] order.
    pub fn subtotals(&self) -> [f64; 8] {
        Dimension::ALL.map(|d| self.subtotal(d))
    }

    pub fn dimension(&self, dimension: Dimension) -> Option<&DimensionScore> {
        self.dimension_scores.iter().find(|d| d.dimension == dimension)
    }
}

/// Scoring knobs carried by an experiment.
#[derive(Debug, Clone, Copy)]
pub struct ScoreParams {
    pub scalar: f64,
    pub keyword_match: KeywordMatch,
}

impl Default for ScoreParams {
    fn default() -> Self {
        ScoreParams {
            scalar: crate::model::DEFAULT_SCALAR,
            keyword_match: KeywordMatch::Substring,
        }
    }
}

impl From<&Experiment> for ScoreParams {
    fn from(e: &Experiment) -> Self {
        ScoreParams {
            scalar: e.scalar,
            keyword_match: e.keyword_match,
        }
    }
}

pub fn score_relation(relation: &Relation, stats: &DocumentStats) -> Result<f64> {
    score_relation_with(relation, stats, ScoreParams::default())
}

pub fn score_relation_with(relation: &Relation, stats: &DocumentStats, params: ScoreParams) -> Result<f64> {
    match relation.kind {
        RelationKind::Keyword => {
            let present = keyword_present_with(stats, &relation.pattern, params.keyword_match);
            Ok(if present { relation.weight } else { 0.0 })
        }
        RelationKind::HtmlTag => {
            if stats.total_tags == 0 {
                return Err(Error::EmptyDocument);
            }
            let ratio = stats.tag_count(&relation.pattern) as f64 / stats.total_tags as f64;
            Ok(ratio * params.scalar * relation.weight)
        }
    }
}

pub fn score_dimension(mapping: &Mapping, stats: &DocumentStats) -> Result<DimensionScore> {
    score_dimension_with(mapping, stats, ScoreParams::default())
}

pub fn score_dimension_with(mapping: &Mapping, stats: &DocumentStats, params: ScoreParams) -> Result<DimensionScore> {
    let relation_scores = mapping
        .relations
        .iter()
        .map(|r| {
            Ok(RelationScore {
                relation: r.name.clone(),
                score: score_relation_with(r, stats, params)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let subtotal = relation_scores.iter().fold(0.0, |acc, r| acc + r.score);
    Ok(DimensionScore {
        dimension: mapping.dimension,
        relation_scores,
        subtotal,
    })
}

pub fn score_site(experiment: &Experiment, stats: &DocumentStats, site: &str) -> Result<SiteScore> {
    let params = ScoreParams::from(experiment);
    let dimension_scores = Dimension::ALL
        .iter()
        .map(|d| {
            let mapping = experiment
                .mapping(*d)
                .ok_or_else(|| Error::Validation(format!("experiment `{}` lacks {d}", experiment.id)))?;
            score_dimension_with(mapping, stats, params)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(site, &experiment.id, dimension_scores, &experiment.scale))
}

/// Builds a [`SiteScore`] from already computed dimension scores.
pub fn assemble(site: &str, experiment_id: &str, dimension_scores: Vec<DimensionScore>, scale: &ScaleVector) -> SiteScore {
    let mut score = SiteScore {
        site: site.to_string(),
        experiment_id: experiment_id.to_string(),
        total_raw: dimension_scores.iter().fold(0.0, |acc, d| acc + d.subtotal),
        dimension_scores,
        total_scaled: 0.0,
    };
    score.total_scaled = scaled_total(&score, scale);
    score
}

fn scaled_total(score: &SiteScore, scale: &ScaleVector) -> f64 {
    let weighted: f64 = score
        .dimension_scores
        .iter()
        .fold(0.0, |acc, d| acc + d.subtotal * scale.factor(d.dimension));
    weighted / scale.post_divisor
}

/// Recomputes the scaled total from existing subtotals.
pub fn rescale(site_score: &SiteScore, scale: &ScaleVector) -> SiteScore {
    let mut out = site_score.clone();
    out.total_scaled = scaled_total(site_score, scale);
    out
}
