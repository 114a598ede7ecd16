//! Grow Experiment 1 into a new revision and keep both in a data directory.
//!
//! cargo run --example experiment_revision -- [data-dir]

use octoscore::model::{Dimension, Relation, ScaleVector};
use octoscore::store::{experiment_to_toml, Store};

fn main() -> octoscore::Result<()> {
    let dir = std::env::args().nth(1).map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("octoscore-revision"));
    let store = Store::open(&dir)?;

    let base = store.load_experiment("exp1")?;
    let mut next = base.derive(format!("exp1-rev{}", store.list_experiments()?.len()))?;
    next.label = "exp1 plus feedback".into();
    next.mapping_mut(Dimension::Collaboration)
        .expect("all dimensions present")
        .relations
        .push(Relation::keyword("Feedback", "feedback", 5.0));
    next.scale = ScaleVector::new([1.0, 4.0, 4.0, 4.0, 4.0, 4.0, 3.0, 9.0], 10.0)?;
    store.save_experiment(&next)?;

    println!("{}", dir.display());
    for id in store.list_experiments()? {
        let e = store.load_experiment(&id)?;
        println!("  {id:<12} {} relations", Dimension::ALL.iter().map(|d| e.relation_count(*d)).sum::<usize>());
    }
    println!("\n{}", experiment_to_toml(&next)?);
    Ok(())
}
