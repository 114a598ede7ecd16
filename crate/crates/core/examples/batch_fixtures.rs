//! Evaluate a list of local pages concurrently and print the scores CSV.
//!
//! cargo run --example batch_fixtures

use octoscore::evaluate::{EvalOptions, Evaluator, SiteSpec};
use octoscore::store::{defaults, report};

#[tokio::main]
async fn main() -> octoscore::Result<()> {
    let fixtures = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let sites: Vec<SiteSpec> = ["minimal", "collaboration", "ajax", "shop", "missing"]
        .iter()
        .map(|name| SiteSpec::labeled(*name, format!("{fixtures}/{name}.html")))
        .collect();

    let experiment = defaults::shipped("exp6").expect("exp6 ships with the crate")?;
    let evaluator = Evaluator::new(EvalOptions {
        offline: true,
        parallelism: 4,
        ..EvalOptions::default()
    })?;
    // the missing page lands in the failures section instead of aborting
    let run = evaluator.run_batch(&experiment, &sites).await?;
    print!("{}", report::scores_csv(&run));
    Ok(())
}
