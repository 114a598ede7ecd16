#![allow(dead_code)]

use std::path::{Path, PathBuf};

use chrono::{TimeZone, Utc};
use octoscore::model::{Dimension, Experiment, KeywordMatch, Mapping, Relation, ScaleVector};
use octoscore::scoring::{assemble, DimensionScore, RelationScore, SiteScore};
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};

pub const TAGS: &[&str] = &[
    "div", "p", "a", "img", "li", "ul", "span", "h1", "h2", "button", "input", "form", "nav", "section",
    "table", "video",
];

pub const KEYWORDS: &[&str] = &[
    "forums", "faq", "feedback", "review", "cart", "checkout", "blog", "newsletter", "price", "shipping",
    "sign in", "ajax",
];

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn experiment_from(id: &str, mappings: Vec<Mapping>, scale: ScaleVector) -> Experiment {
    Experiment {
        id: id.to_string(),
        label: String::new(),
        scalar: 100.0,
        keyword_match: KeywordMatch::Substring,
        created_at: Utc.with_ymd_and_hms(2026, 1, 1, 0, 0, 0).unwrap(),
        scale,
        mappings,
    }
}

pub fn random_experiment(rng: &mut StdRng, id: &str) -> Experiment {
    let mappings = Dimension::ALL
        .iter()
        .map(|d| {
            let n = rng.random_range(0..6);
            let relations = (0..n)
                .map(|i| {
                    let weight = rng.random_range(0.0..10.0);
                    if rng.random_bool(0.5) {
                        Relation::tag(format!("r{i}"), *TAGS.choose(rng).unwrap(), weight)
                    } else {
                        Relation::keyword(format!("r{i}"), *KEYWORDS.choose(rng).unwrap(), weight)
                    }
                })
                .collect();
            Mapping::new(*d, relations)
        })
        .collect();
    let e = experiment_from(id, mappings, ScaleVector::identity());
    e.validate().unwrap();
    e
}

/// A page with random tag counts (at least one tag) and a random subset of keywords.
pub fn random_page(rng: &mut StdRng) -> String {
    let mut html = String::from("<html>");
    for tag in TAGS {
        for _ in 0..rng.random_range(0..30) {
            html.push_str(&format!("<{tag}>"));
        }
    }
    html.push_str("<p>");
    for kw in KEYWORDS {
        if rng.random_bool(0.5) {
            html.push_str(kw);
            html.push(' ');
        }
    }
    html.push_str("</p></html>");
    html
}

/// A site score whose dimension `j` subtotal is split evenly over
/// `relation_counts[j]` relations.
pub fn synthetic_site(
    site: &str,
    experiment_id: &str,
    subtotals: [f64; 8],
    relation_counts: [usize; 8],
    scale: &ScaleVector,
) -> SiteScore {
    let dims = Dimension::ALL
        .iter()
        .map(|d| {
            let n = relation_counts[d.index()];
            let sub = subtotals[d.index()];
            let relation_scores: Vec<RelationScore> = (0..n)
                .map(|i| RelationScore {
                    relation: format!("k{i}"),
                    score: sub / n as f64,
                })
                .collect();
            DimensionScore {
                dimension: *d,
                subtotal: relation_scores.iter().map(|r| r.score).sum(),
                relation_scores,
            }
        })
        .collect();
    assemble(site, experiment_id, dims, scale)
}

/// An experiment with `relation_counts[j]` placeholder keyword relations per dimension.
pub fn placeholder_experiment(id: &str, relation_counts: [usize; 8]) -> Experiment {
    let mappings = Dimension::ALL
        .iter()
        .map(|d| {
            Mapping::new(
                *d,
                (0..relation_counts[d.index()])
                    .map(|i| Relation::keyword(format!("k{i}"), format!("kw{i}"), 1.0))
                    .collect(),
            )
        })
        .collect();
    experiment_from(id, mappings, ScaleVector::identity())
}

/// Writes `n` deterministic pages plus a `sites.txt` list into `dir`.
pub fn write_corpus(dir: &Path, n: usize, seed: u64) -> PathBuf {
    let mut r = rng(seed);
    let mut list = String::from("# generated corpus\n\n");
    for i in 0..n {
        let path = dir.join(format!("site{i:03}.html"));
        std::fs::write(&path, random_page(&mut r)).unwrap();
        list.push_str(&format!("{}\n", path.display()));
    }
    let list_path = dir.join("sites.txt");
    std::fs::write(&list_path, list).unwrap();
    list_path
}

/// Every permutation of `0..n`.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            prefix.push(x);
            go(prefix, rest, out);
            prefix.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..n).collect(), &mut out);
    out
}

pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let output = std::process::Command::new(env!("CARGO_BIN_EXE_octoscore"))
        .args(args)
        .env_remove("OCTOSCORE_DATA")
        .output()
        .expect("spawn octoscore");
    (
        output.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&output.stdout).into_owned(),
        String::from_utf8_lossy(&output.stderr).into_owned(),
    )
}
