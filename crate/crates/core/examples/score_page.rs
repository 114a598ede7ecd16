//! Score one HTML file against the shipped Experiment 8 mapping.
//!
//! cargo run --example score_page -- [path/to/page.html]

use octoscore::ingest::load_page;
use octoscore::store::defaults;

fn main() -> octoscore::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/shop.html").to_string());
    let experiment = defaults::shipped("exp8").expect("exp8 ships with the crate")?;

    let stats = load_page(&path)?.parse()?;
    println!("{path}: {} tags, {} distinct", stats.total_tags, stats.tag_counts.len());

    let score = octoscore::score_site(&experiment, &stats, &path)?;
    for d in &score.dimension_scores {
        println!("{:<14} {:>9.3}", d.dimension.name(), d.subtotal);
        for r in d.relation_scores.iter().filter(|r| r.score > 0.0) {
            println!("    {:<22} {:>9.3}", r.relation, r.score);
        }
    }
    println!("total          {:>9.3}", score.total_raw);
    Ok(())
}
