//! The 8C domain model: dimensions, relations, mappings, scale vectors and
//! experiments.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default multiplier applied to tag-frequency ratios.
pub const DEFAULT_SCALAR: f64 = 100.0;

/// One of the eight interface-design dimensions of the 8C framework.
///
/// The declaration order is the canonical order used everywhere a per-dimension
/// vector appears (scale vectors, CSV columns, contribution tables).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dimension {
    Context,
    Content,
    Community,
    Customization,
    Communication,
    Connection,
    Commerce,
    Collaboration,
}

impl Dimension {
    pub const ALL: [Dimension; 8] = [
        Dimension::Context,
        Dimension::Content,
        Dimension::Community,
        Dimension::Customization,
        Dimension::Communication,
        Dimension::Connection,
        Dimension::Commerce,
        Dimension::Collaboration,
    ];

    /// Position in [`Dimension::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Dimension::Context => "Context",
            Dimension::Content => "Content",
            Dimension::Community => "Community",
            Dimension::Customization => "Customization",
            Dimension::Communication => "Communication",
            Dimension::Connection => "Connection",
            Dimension::Commerce => "Commerce",
            Dimension::Collaboration => "Collaboration",
        }
    }

    /// Lowercase key used in CSV column names (`sc_context`, ...).
    pub fn key(self) -> &'static str {
        match self {
            Dimension::Context => "context",
            Dimension::Content => "content",
            Dimension::Community => "community",
            Dimension::Customization => "customization",
            Dimension::Communication => "communication",
            Dimension::Connection => "connection",
            Dimension::Commerce => "commerce",
            Dimension::Collaboration => "collaboration",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Dimension::Context => "How the site is organized and how content is presented",
            Dimension::Content => "What the site offers",
            Dimension::Community => "Non-interactive and interactive communication between users",
            Dimension::Customization => "The site's ability to tailor itself or be tailored",
            Dimension::Communication => "Site-to-user communication",
            Dimension::Connection => "Formal linkage from the site to others",
            Dimension::Commerce => "Interface supporting the aspects of e-commerce",
            Dimension::Collaboration => "Feedback forms, forums and bulletin boards",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Dimension::ALL
            .into_iter()
            .find(|d| d.key().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Validation(format!("unknown dimension `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    HtmlTag,
    Keyword,
}

/// A weighted link between a dimension and an HTML tag or keyword.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    pub name: String,
    pub kind: RelationKind,
    /// Element name for tag relations, search phrase for keyword relations.
    pub pattern: String,
    pub weight: f64,
}

impl Relation {
    pub fn tag(name: impl Into<String>, pattern: impl Into<String>, weight: f64) -> Self {
        Relation {
            name: name.into(),
            kind: RelationKind::HtmlTag,
            pattern: pattern.into(),
            weight,
        }
    }

    pub fn keyword(name: impl Into<String>, pattern: impl Into<String>, weight: f64) -> Self {
        Relation {
            name: name.into(),
            kind: RelationKind::Keyword,
            pattern: pattern.into(),
            weight,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::Validation("relation name is empty".into()));
        }
        if self.pattern.is_empty() {
            return Err(Error::Validation(format!(
                "relation `{}` has an empty pattern",
                self.name
            )));
        }
        if !(self.weight.is_finite() && self.weight >= 0.0) {
            return Err(Error::Validation(format!(
                "relation `{}` has invalid weight {}",
                self.name, self.weight
            )));
        }
        if self.kind == RelationKind::HtmlTag && !is_element_name(&self.pattern) {
            return Err(Error::Validation(format!(
                "relation `{}`: tag pattern `{}` is not a lowercase element name",
                self.name, self.pattern
            )));
        }
        Ok(())
    }
}

fn is_element_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-' || c == ':')
}

/// All relations attached to one dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mapping {
    pub dimension: Dimension,
    #[serde(default)]
    pub relations: Vec<Relation>,
}

impl Mapping {
    pub fn new(dimension: Dimension, relations: Vec<Relation>) -> Self {
        Mapping {
            dimension,
            relations,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for relation in &self.relations {
            relation.validate()?;
            if !seen.insert(relation.name.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate relation `{}` in {} mapping",
                    relation.name, self.dimension
                )));
            }
        }
        Ok(())
    }
}

/// Per-dimension multipliers plus a final divisor applied to the weighted total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleVector {
    /// Multipliers in [`Dimension::ALL`] order.
    pub p: [f64; 8],
    pub post_divisor: f64,
}

impl ScaleVector {
    pub fn identity() -> Self {
        ScaleVector {
            p: [1.0; 8],
            post_divisor: 1.0,
        }
    }

    pub fn new(p: [f64; 8], post_divisor: f64) -> Result<Self> {
        let scale = ScaleVector { p, post_divisor };
        scale.validate()?;
        Ok(scale)
    }

    pub fn factor(&self, dimension: Dimension) -> f64 {
        self.p[dimension.index()]
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(bad) = self.p.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Validation(format!("scale entry {bad} must be >= 0")));
        }
        if !(self.post_divisor.is_finite() && self.post_divisor > 0.0) {
            return Err(Error::Validation(format!(
                "post_divisor {} must be > 0",
                self.post_divisor
            )));
        }
        Ok(())
    }
}

impl Default for ScaleVector {
    fn default() -> Self {
        ScaleVector::identity()
    }
}

/// How keyword relations are matched against the page text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeywordMatch {
    #[default]
    Substring,
    /// The match must not be flanked by alphanumeric characters.
    WordBoundary,
}

fn default_scalar() -> f64 {
    DEFAULT_SCALAR
}

fn is_default_match(m: &KeywordMatch) -> bool {
    *m == KeywordMatch::Substring
}

/// A versioned snapshot of all eight mappings and the scaling parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    pub id: String,
    #[serde(default)]
    pub label: String,
    #[serde(default = "default_scalar")]
    pub scalar: f64,
    #[serde(default, skip_serializing_if = "is_default_match")]
    pub keyword_match: KeywordMatch,
    pub created_at: DateTime<Utc>,
    #[serde(default)]
    pub scale: ScaleVector,
    pub mappings: Vec<Mapping>,
}

impl Experiment {
    /// Builds and validates an experiment.
    pub fn new(
        id: impl Into<String>,
        label: impl Into<String>,
        mappings: Vec<Mapping>,
        scale: ScaleVector,
    ) -> Result<Self> {
        let mut experiment = Experiment {
            id: id.into(),
            label: label.into(),
            scalar: DEFAULT_SCALAR,
            keyword_match: KeywordMatch::Substring,
            created_at: Utc::now(),
            scale,
            mappings,
        };
        experiment.mappings.sort_by_key(|m| m.dimension);
        experiment.validate()?;
        Ok(experiment)
    }

    pub fn validate(&self) -> Result<()> {
        if !is_valid_id(&self.id) {
            return Err(Error::Validation(format!(
                "experiment id `{}` must be non-empty and use only [A-Za-z0-9._-]",
                self.id
            )));
        }
        if !(self.scalar.is_finite() && self.scalar > 0.0) {
            return Err(Error::Validation(format!("scalar {} must be > 0", self.scalar)));
        }
        self.scale.validate()?;
        let mut seen = [false; 8];
        for mapping in &self.mappings {
            let slot = &mut seen[mapping.dimension.index()];
            if *slot {
                return Err(Error::Validation(format!(
                    "dimension {} is mapped more than once",
                    mapping.dimension
                )));
            }
            *slot = true;
            mapping.validate()?;
        }
        if let Some(missing) = Dimension::ALL.iter().find(|d| !seen[d.index()]) {
            return Err(Error::Validation(format!(
                "experiment `{}` has no mapping for {missing} ({} of 8 dimensions present)",
                self.id,
                self.mappings.len()
            )));
        }
        Ok(())
    }

    pub fn mapping(&self, dimension: Dimension) -> Option<&Mapping> {
        self.mappings.iter().find(|m| m.dimension == dimension)
    }

    pub fn mapping_mut(&mut self, dimension: Dimension) -> Option<&mut Mapping> {
        self.mappings.iter_mut().find(|m| m.dimension == dimension)
    }

    /// Number of relations mapped to `dimension`.
    pub fn relation_count(&self, dimension: Dimension) -> usize {
        self.mapping(dimension).map_or(0, |m| m.relations.len())
    }

    /// Clones this experiment under a new id, ready for the next revision.
    pub fn derive(&self, id: impl Into<String>) -> Result<Experiment> {
        let mut next = self.clone();
        next.id = id.into();
        next.label = format!("derived from {}", self.id);
        next.created_at = Utc::now();
        next.validate()?;
        Ok(next)
    }
}

pub(crate) fn is_valid_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-'))
}
