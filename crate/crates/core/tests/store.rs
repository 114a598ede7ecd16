mod common;

use chrono::{TimeZone, Utc};
use common::*;
use octoscore::analytics::{AdviseThresholds, GroundTruth, RunReport};
use octoscore::model::{Dimension, Relation, ScaleVector};
use octoscore::store::report::{parse_scores_csv, scores_csv, CONTRIBUTIONS_FILE, RANK_DIFF_FILE, SCORES_FILE};
use octoscore::store::{experiment_to_toml, parse_experiment, RunRecord, SiteFailure, Store};
use octoscore::Error;

fn store() -> (tempfile::TempDir, Store) {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path()).unwrap();
    (dir, store)
}

fn run_of(scores: Vec<octoscore::SiteScore>, experiment_id: &str) -> RunRecord {
    let started_at = Utc.with_ymd_and_hms(2026, 3, 1, 12, 0, 0).unwrap();
    RunRecord {
        run_id: RunRecord::new_id(started_at),
        experiment_id: experiment_id.into(),
        started_at,
        site_scores: scores,
        failures: vec![],
    }
}

#[test]
fn shipped_experiments_round_trip() {
    let (_dir, store) = store();
    assert_eq!(store.list_experiments().unwrap(), ["exp1", "exp6", "exp8"]);
    for id in ["exp1", "exp6", "exp8"] {
        let e = store.load_experiment(id).unwrap();
        let text = experiment_to_toml(&e).unwrap();
        assert_eq!(parse_experiment(&text).unwrap(), e);

        let mut copy = e.derive(format!("{id}-copy")).unwrap();
        copy.mapping_mut(Dimension::Context).unwrap().relations.push(Relation::tag("Video", "video", 2.0));
        store.save_experiment(&copy).unwrap();
        assert_eq!(store.load_experiment(&copy.id).unwrap(), copy);
    }
}

#[test]
fn seven_dimension_file_is_rejected() {
    let (_dir, store) = store();
    let text = experiment_to_toml(&store.load_experiment("exp1").unwrap()).unwrap();
    let mut e: toml::Table = toml::from_str(&text).unwrap();
    e["mappings"].as_array_mut().unwrap().pop();
    let err = parse_experiment(&toml::to_string(&e).unwrap()).unwrap_err();
    assert!(matches!(err, Error::Validation(_)), "{err}");

    let bogus = text.replacen("dimension = \"Context\"", "dimension = \"Clarity\"", 1);
    assert_ne!(bogus, text);
    assert!(matches!(parse_experiment(&bogus), Err(Error::Validation(_))));
}

#[test]
fn unknown_experiment_and_run() {
    let (_dir, store) = store();
    assert!(matches!(store.load_experiment("exp42"), Err(Error::UnknownExperiment(_))));
    assert!(matches!(store.load_run("nope"), Err(Error::UnknownRun(_))));
}

#[test]
fn runs_are_append_only_and_listed_newest_first() {
    let (_dir, store) = store();
    let mut r = rng(11);
    let e = random_experiment(&mut r, "exp1");
    let site = |name: &str, r: &mut rand::rngs::StdRng| {
        octoscore::score_site(&e, &octoscore::ingest::parse_stats(random_page(r).as_bytes()).unwrap(), name).unwrap()
    };
    let first = run_of(vec![site("a", &mut r)], "exp1");
    store.save_run(&first).unwrap();
    assert!(store.save_run(&first).is_err(), "runs must not be overwritten");

    let mut second = run_of(vec![site("b", &mut r)], "exp1");
    second.started_at = first.started_at + chrono::Duration::hours(1);
    second.run_id = RunRecord::new_id(second.started_at);
    store.save_run(&second).unwrap();

    let listed: Vec<_> = store.list_runs(Some("exp1")).unwrap().into_iter().map(|s| s.run_id).collect();
    assert_eq!(listed, [second.run_id.clone(), first.run_id.clone()]);
    assert!(store.list_runs(Some("exp6")).unwrap().is_empty());
    assert_eq!(store.load_run(&first.run_id).unwrap(), first);
}

#[test]
fn scores_csv_round_trips_to_four_decimals() {
    let mut r = rng(12);
    let e = random_experiment(&mut r, "e");
    let scores: Vec<_> = (0..6)
        .map(|i| {
            let stats = octoscore::ingest::parse_stats(random_page(&mut r).as_bytes()).unwrap();
            octoscore::score_site(&e, &stats, &format!("site, \"{i}\"")).unwrap()
        })
        .collect();
    let mut run = run_of(scores, "e");
    run.failures.push(SiteFailure {
        site: "https://dead.invalid/".into(),
        error: "network error fetching https://dead.invalid/: connection failed".into(),
    });

    let text = scores_csv(&run);
    let (rows, failures) = parse_scores_csv(&text).unwrap();
    assert_eq!(rows.len(), run.site_scores.len());
    for (row, score) in rows.iter().zip(&run.site_scores) {
        assert_eq!(row.site, score.site);
        for (a, b) in row.subtotals.iter().zip(score.subtotals()) {
            assert!((a - b).abs() <= 5e-5, "{a} vs {b}");
        }
        assert!((row.total_raw - score.total_raw).abs() <= 5e-5);
        assert!((row.total_scaled - score.total_scaled).abs() <= 5e-5);
    }
    assert_eq!(failures, [(run.failures[0].site.clone(), run.failures[0].error.clone())]);
}

#[test]
fn export_is_stable() {
    let (_dir, store) = store();
    let counts = [2; 8];
    let scores: Vec<_> = (0..5)
        .map(|i| {
            let s = [10.0 + i as f64, 5.0, 3.0, 1.0, 2.0 * i as f64, 4.0, 6.0, 0.5];
            synthetic_site(&format!("Site {i}"), "shape", s, counts, &ScaleVector::identity())
        })
        .collect();
    let e = placeholder_experiment("shape", counts);
    let truth = GroundTruth::from_csv("site,cr\nSite 0,1\nSite 1,2\nSite 2,3\nSite 3,4\nSite 4,5\n").unwrap();
    let run = run_of(scores, "shape");
    let report = RunReport::build(&run.site_scores, &e, Some(&truth), &AdviseThresholds::default()).unwrap();
    assert_eq!(report.rank_diff.as_ref().unwrap().mean_abs_diff, 0.0);

    let first = store.export_report(&run, &report).unwrap();
    let names: Vec<_> = first.iter().map(|p| p.file_name().unwrap().to_str().unwrap()).collect();
    assert_eq!(names, [SCORES_FILE, RANK_DIFF_FILE, CONTRIBUTIONS_FILE]);
    let snapshot: Vec<_> = first.iter().map(|p| std::fs::read(p).unwrap()).collect();
    let second = store.export_report(&run, &report).unwrap();
    let again: Vec<_> = second.iter().map(|p| std::fs::read(p).unwrap()).collect();
    assert_eq!(snapshot, again);
    assert_eq!(String::from_utf8(snapshot[0].clone()).unwrap(), scores_csv(&run));
    assert!(snapshot.iter().all(|b| !b.contains(&b'\r')));
}
