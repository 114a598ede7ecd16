//! Derive balancing multipliers from a run and compare totals before and after.
//!
//! cargo run --example suggest_scale

use octoscore::analytics::{contribution_table, suggest_scale};
use octoscore::ingest::parse_stats;
use octoscore::scoring::rescale;
use octoscore::store::defaults;

fn main() -> octoscore::Result<()> {
    let experiment = defaults::shipped("exp8").expect("exp8 ships with the crate")?;
    let pages = [
        "<html><body><div><img><img><a>cart</a><a>faq</a><a>blog</a></div><form><input></form></body></html>",
        "<html><body><nav><a>forums</a><a>review</a></nav><p>feedback, comment, share</p><video></video></body></html>",
        "<html><body><ul><li><a>price</a><li><a>checkout</a></ul><img><button>sign in</button><p>members</p></body></html>",
    ];
    let scores = pages
        .iter()
        .enumerate()
        .map(|(i, html)| octoscore::score_site(&experiment, &parse_stats(html.as_bytes())?, &format!("page{i}")))
        .collect::<octoscore::Result<Vec<_>>>()?;

    let table = contribution_table(&scores)?;
    match suggest_scale(&table) {
        Ok(scale) => {
            println!("p = {:?}", scale.p);
            println!("post_divisor = {}", scale.post_divisor);
            for s in &scores {
                println!("{:<6} raw {:>9.3}  scaled {:>9.3}", s.site, s.total_raw, rescale(s, &scale).total_scaled);
            }
        }
        // a dimension that scored nothing cannot be balanced by a multiplier
        Err(e) => println!("no suggestion: {e}"),
    }
    Ok(())
}
