//! Compare a score ordering against conversion-rate order.
//!
//! cargo run --example rank_agreement

use octoscore::analytics::{rank_by, rank_diff, GroundTruth};

fn main() -> octoscore::Result<()> {
    let truth = GroundTruth::load(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/stores.csv"))?;
    let expected = rank_by(&truth.values())?;

    // hypothetical scaled totals for the same seven stores
    let scores = [
        ("Woman Within", 61.2),
        ("Blair", 48.0),
        ("1800petmeds", 52.5),
        ("qvc", 70.1),
        ("ProFlowers", 33.3),
        ("Oriental Trading Company", 40.0),
        ("Roamans", 40.0),
    ];
    let actual = rank_by(&scores.map(|(s, v)| (s.to_string(), v)))?;

    let report = rank_diff(&expected, &actual)?;
    println!("{:<26} {:>8} {:>6} {:>6}", "site", "expected", "actual", "|d|");
    for d in &report.per_site {
        println!("{:<26} {:>8} {:>6} {:>6}", d.site, d.expected_rank, d.actual_rank, d.abs_diff);
    }
    println!("mean |rank diff| = {:.4}", report.mean_abs_diff);
    Ok(())
}
