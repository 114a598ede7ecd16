//! Quantitative heuristic evaluation of e-commerce home pages against the 8C
//! framework.
//!
//! Each of the eight dimensions maps to weighted relations on HTML tags or
//! keywords. A page is reduced to a tag census plus its lowercased source,
//! every relation is scored, and the dimension subtotals roll up into a raw
//! and a scaled site total. Runs over many sites are then ranked against
//! conversion-rate ground truth, and the advisor points at relations or
//! dimensions that dominate the score, so the mappings can be revised into the
//! next experiment.
//!
//! ```
//! use octoscore::{ingest, scoring, model::Relation};
//!
//! let stats = ingest::parse_stats(b"<html><body><img><img><p>Forums</p></body></html>").unwrap();
//! assert_eq!(stats.total_tags, 5);
//! let img = scoring::score_relation(&Relation::tag("Images", "img", 3.0), &stats).unwrap();
//! assert_eq!(img, 2.0 / 5.0 * 100.0 * 3.0);
//! let forums = scoring::score_relation(&Relation::keyword("Forums", "forums", 3.0), &stats).unwrap();
//! assert_eq!(forums, 3.0);
//! ```

pub mod analytics;
pub mod cli;
pub mod error;
pub mod evaluate;
pub mod ingest;
pub mod model;
pub mod scoring;
pub mod service;
pub mod store;

pub use error::{Error, Result};
pub use model::{Dimension, Experiment, Mapping, Relation, RelationKind, ScaleVector};
pub use scoring::{score_site, DimensionScore, SiteScore};
