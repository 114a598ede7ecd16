//! Start the HTTP service on a temporary data directory.
//!
//! cargo run --example serve_api
//! curl -H 'Authorization: Bearer demo-admin' http://127.0.0.1:8470/experiments

use octoscore::analytics::AdviseThresholds;
use octoscore::evaluate::EvalOptions;
use octoscore::service::{serve, Role, ServiceConfig, TokenEntry, DEFAULT_LISTEN};
use octoscore::store::Store;

#[tokio::main]
async fn main() -> octoscore::Result<()> {
    let data = std::env::temp_dir().join("octoscore-serve-demo");
    let store = Store::open(&data)?;
    let config = ServiceConfig {
        listen: DEFAULT_LISTEN.parse().expect("valid default address"),
        tokens: vec![
            TokenEntry {
                token: "demo-admin".into(),
                role: Role::Administrator,
            },
            TokenEntry {
                token: "demo-researcher".into(),
                role: Role::Researcher,
            },
        ],
        cors_origin: None,
        eval: EvalOptions::default(),
        thresholds: AdviseThresholds::default(),
    };
    println!("data in {}, listening on http://{}", data.display(), config.listen);
    serve(store, config).await
}
