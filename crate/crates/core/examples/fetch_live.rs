//! Fetch a live home page and print its tag census.
//!
//! cargo run --example fetch_live -- https://example.com/

use octoscore::ingest::{fetch_page, FetchConfig};

#[tokio::main]
async fn main() -> octoscore::Result<()> {
    let url = std::env::args().nth(1).unwrap_or_else(|| "https://example.com/".into());
    let config = FetchConfig::default();
    let page = fetch_page(&config.client()?, &url, &config).await?;
    let stats = page.parse()?;

    println!("{url}: {} bytes, {} tags", page.source.byte_length, stats.total_tags);
    let mut counts: Vec<_> = stats.tag_counts.iter().collect();
    counts.sort_by(|a, b| b.1.cmp(a.1).then(a.0.cmp(b.0)));
    for (tag, n) in counts.into_iter().take(15) {
        println!("  {tag:<10} {n:>5}  {:>6.2}%", *n as f64 * 100.0 / stats.total_tags as f64);
    }
    Ok(())
}
