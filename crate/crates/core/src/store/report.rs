//! CSV report rendering. Column order is fixed, numbers carry four decimals,
//! and lines end in LF, so identical runs render byte-identical files.

use crate::analytics::{ContributionReport, RankDiffReport};
use crate::error::{Error, Result};
use crate::model::Dimension;

use super::RunRecord;

pub const SCORES_FILE: &str = "scores.csv";
pub const RANK_DIFF_FILE: &str = "rank_diff.csv";
pub const CONTRIBUTIONS_FILE: &str = "contributions.csv";

/// Marker line that opens the failures section of the scores CSV.
pub const FAILURES_MARKER: &str = "failures";

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .flexible(true)
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("in-memory writer cannot fail");
    String::from_utf8(bytes).expect("csv output is UTF-8")
}

fn num(x: f64) -> String {
    format!("{x:.4}")
}

pub fn scores_header() -> Vec<String> {
    let mut h = vec!["site".to_string()];
    h.extend(Dimension::ALL.iter().map(|d| format!("sc_{}", d.key())));
    h.push("total_raw".into());
    h.push("total_scaled".into());
    h
}

/// Per-site subtotals and totals, followed by a `failures` section when any
/// site could not be evaluated.
pub fn scores_csv(run: &RunRecord) -> String {
    let mut w = writer();
    w.write_record(scores_header()).unwrap();
    for s in &run.site_scores {
        let mut row = vec![s.site.clone()];
        row.extend(s.subtotals().iter().map(|v| num(*v)));
        row.push(num(s.total_raw));
        row.push(num(s.total_scaled));
        w.write_record(&row).unwrap();
    }
    let mut out = finish(w);
    if !run.failures.is_empty() {
        let mut w = writer();
        w.write_record(["site", "error"]).unwrap();
        for f in &run.failures {
            w.write_record([&f.site, &f.error]).unwrap();
        }
        out.push('\n');
        out.push_str(FAILURES_MARKER);
        out.push('\n');
        out.push_str(&finish(w));
    }
    out
}

pub fn rank_diff_csv(report: &RankDiffReport) -> String {
    let mut w = writer();
    w.write_record(["site", "expected_rank", "actual_rank", "abs_diff"]).unwrap();
    for d in &report.per_site {
        w.write_record([
            d.site.clone(),
            d.expected_rank.to_string(),
            d.actual_rank.to_string(),
            d.abs_diff.to_string(),
        ])
        .unwrap();
    }
    w.write_record(["mean_abs_diff", "", "", &num(report.mean_abs_diff)]).unwrap();
    finish(w)
}

pub fn contributions_csv(report: &ContributionReport) -> String {
    let mut w = writer();
    w.write_record(["dimension", "attribute_count", "contribution_pct", "std_dev"]).unwrap();
    for r in &report.rows {
        w.write_record([
            r.dimension.name().to_string(),
            r.attribute_count.to_string(),
            num(r.contribution_pct),
            num(r.std_dev),
        ])
        .unwrap();
    }
    finish(w)
}

/// `(site, error)` from the failures section.
pub type Failure = (String, String);

/// One row of a parsed scores CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub site: String,
    pub subtotals: [f64; 8],
    pub total_raw: f64,
    pub total_scaled: f64,
}

/// Reads back the scores section and the failures section of a scores CSV.
pub fn parse_scores_csv(text: &str) -> Result<(Vec<ScoreRow>, Vec<Failure>)> {
    let marker = format!("\n\n{FAILURES_MARKER}\n");
    let (scores_part, failures_part) = match text.find(&marker) {
        Some(at) => (&text[..at + 1], Some(&text[at + marker.len()..])),
        None => (text, None),
    };
    let bad = |e: csv::Error| Error::Validation(format!("scores csv: {e}"));

    let mut reader = csv::Reader::from_reader(scores_part.as_bytes());
    let header: Vec<String> = reader.headers().map_err(bad)?.iter().map(str::to_string).collect();
    if header != scores_header() {
        return Err(Error::Validation(format!("unexpected scores header {header:?}")));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(bad)?;
        let field = |i: usize| -> Result<f64> {
            record
                .get(i)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Validation(format!("bad number in column {i}")))
        };
        let mut subtotals = [0.0; 8];
        for (j, slot) in subtotals.iter_mut().enumerate() {
            *slot = field(j + 1)?;
        }
        rows.push(ScoreRow {
            site: record[0].to_string(),
            subtotals,
            total_raw: field(9)?,
            total_scaled: field(10)?,
        });
    }

    let mut failures = Vec::new();
    if let Some(part) = failures_part {
        let mut reader = csv::Reader::from_reader(part.as_bytes());
        for record in reader.records() {
            let record = record.map_err(bad)?;
            failures.push((record[0].to_string(), record.get(1).unwrap_or("").to_string()));
        }
    }
    Ok((rows, failures))
}
