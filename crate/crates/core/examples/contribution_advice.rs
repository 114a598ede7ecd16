//! Contribution table and mapping advice for a run that leans on Context.
//!
//! cargo run --example contribution_advice

use octoscore::analytics::{advise, contribution_table, AdviseThresholds};
use octoscore::evaluate::{EvalOptions, Evaluator, SiteSpec};
use octoscore::model::{Dimension, Relation};
use octoscore::store::defaults;

#[tokio::main]
async fn main() -> octoscore::Result<()> {
    let mut experiment = defaults::shipped("exp8").expect("exp8 ships with the crate")?;
    experiment.id = "exp8-heavy".into();
    // an oversized div weight swamps every other dimension
    experiment
        .mapping_mut(Dimension::Context)
        .expect("all dimensions present")
        .relations
        .push(Relation::tag("Layout blocks", "div", 8.0));

    let fixtures = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let sites: Vec<_> = ["minimal", "collaboration", "ajax", "shop"]
        .iter()
        .map(|n| SiteSpec::labeled(*n, format!("{fixtures}/{n}.html")))
        .collect();
    let run = Evaluator::new(EvalOptions::default())?.run_batch(&experiment, &sites).await?;

    let table = contribution_table(&run.site_scores)?;
    println!("{:<14} {:>4} {:>8} {:>8}", "dimension", "NR", "pct", "std");
    for row in &table.rows {
        println!(
            "{:<14} {:>4} {:>7.2}% {:>8.3}",
            row.dimension.name(),
            row.attribute_count,
            row.contribution_pct,
            row.std_dev
        );
    }
    println!();
    for advice in advise(&run.site_scores, &experiment, &AdviseThresholds::default())? {
        println!("{advice}");
    }
    Ok(())
}
