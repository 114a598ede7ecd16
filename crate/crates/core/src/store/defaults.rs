//! Experiments seeded into a fresh data directory.
//!
//! Only the Collaboration mappings are reference values; every file says so in
//! its header.

use crate::error::Result;
use crate::model::Experiment;

pub const SHIPPED: &[(&str, &str)] = &[
    ("exp1", include_str!("../../experiments/exp1.toml")),
    ("exp6", include_str!("../../experiments/exp6.toml")),
    ("exp8", include_str!("../../experiments/exp8.toml")),
];

pub fn shipped(id: &str) -> Option<Result<Experiment>> {
    SHIPPED
        .iter()
        .find(|(sid, _)| *sid == id)
        .map(|(_, text)| super::parse_experiment(text))
}
