use serde_json::json;

use renormlab::analyzer::VerdictKind;
use renormlab::config::{apply_param, preset, RunConfig, PRESETS};
use renormlab::pipeline::{run, run_analyze, run_qa_scan, run_tower, run_tree_export, Command};
use renormlab::report::{Report, CSV_HEADER};
use renormlab::Error;

fn config(name: &str) -> RunConfig {
    RunConfig::from_value(preset(name).unwrap()).unwrap()
}

fn column(report: &Report, f: impl Fn(&renormlab::report::LevelRow) -> String) -> Vec<String> {
    report.levels.iter().map(f).collect()
}

#[test]
fn heisenberg_table() {
    let r = run_analyze(&config("heisenberg")).unwrap();
    let row = &r.levels[3];
    assert_eq!((row.size, row.quotient_order.as_str(), row.discriminant_order.as_str()), (46656, "10077696", "216"));
    assert_eq!(row.discriminant_shape, "Z/216");
    assert!(r.probes.qa.as_ref().unwrap().witness().is_none());
}

#[test]
fn affine_unit_discriminants_double() {
    let mut cfg = config("affine-unit");
    cfg.depth = 6;
    let r = run_analyze(&cfg).unwrap();
    assert_eq!(column(&r, |l| l.discriminant_order.clone())[1..], ["1", "2", "4", "8", "16", "32"]);
    assert_eq!(r.verdict.unwrap().kind, VerdictKind::Growing);
}

#[test]
fn grigorchuk_qa_scan_runs_without_phi() {
    let mut cfg = config("grigorchuk");
    cfg.probes.self_replicating = None;
    let r = run_qa_scan(&cfg).unwrap();
    let w = r.probes.qa.as_ref().unwrap().witness().expect("witness");
    assert_eq!((w.level, w.cylinder_depth), (6, 1));
    assert!(r.levels.is_empty());
    assert_eq!(r.chain.as_str(), "vertex_stabilizer");
}

#[test]
fn every_preset_analyzes() {
    let verdicts: Vec<String> = PRESETS
        .iter()
        .map(|p| run_analyze(&config(p)).unwrap().verdict.unwrap().kind.label())
        .collect();
    assert_eq!(verdicts, ["Growing", "FiniteStable(3)", "Growing", "TrivialInLimit", "Growing"]);
}

#[test]
fn reports_round_trip_and_are_deterministic() {
    for p in PRESETS {
        let cfg = config(p);
        let a = run_analyze(&cfg).unwrap();
        let b = run_analyze(&cfg).unwrap();
        assert_eq!(a.deterministic_json(), b.deterministic_json(), "{p}");
        let back: Report = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(back.to_json(), a.to_json(), "{p}");
        assert_eq!(back.config, cfg);
        assert_eq!(back.format, "renormlab-report");
        assert_eq!(back.version, 1);
    }
}

#[test]
fn csv_rows_equal_the_table() {
    let r = run_tower(&config("lattice")).unwrap();
    let csv = r.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), r.levels.len());
    for (row, level) in rows.iter().zip(&r.levels) {
        assert_eq!(row[0], level.level.to_string());
        assert_eq!(row[1], level.size.to_string());
        assert_eq!(row[2], level.quotient_order);
        assert_eq!(row[3], level.discriminant_order);
        assert_eq!(row[4], level.discriminant_shape);
        assert_eq!(row[5], level.bonding_surjective.map_or(String::new(), |b| b.to_string()));
    }
    assert!(r.verdict.is_none());
}

#[test]
fn cache_hit_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config("heisenberg");
    cfg.cache_dir = Some(dir.path().to_path_buf());
    let first = run_tower(&cfg).unwrap();
    let second = run_tower(&cfg).unwrap();
    assert!(!first.runtime.cache_hit);
    assert!(second.runtime.cache_hit);
    assert_eq!(first.deterministic_json(), second.deterministic_json());
}

#[test]
fn tree_export_builds_deeper_levels() {
    let mut cfg = config("odometer");
    cfg.depth = 2;
    cfg.tree_depth = Some(5);
    let r = run_tree_export(&cfg).unwrap();
    let tree = r.tree.unwrap();
    assert_eq!(tree.depth, 5);
    assert_eq!(tree.vertex_count, 63);
    assert!(tree.dot.contains("\"5:31\""));
}

#[test]
fn invalid_configs_are_rejected_before_computing() {
    let mut v = preset("heisenberg").unwrap();
    v["backend"]["name"] = json!("quaternion");
    assert!(matches!(RunConfig::from_value(v), Err(Error::ConfigInvalid(_))));

    let mut v = preset("heisenberg").unwrap();
    apply_param(&mut v, "q=1").unwrap();
    assert!(matches!(RunConfig::from_value(v), Err(Error::ConfigInvalid(_))));

    let mut v = preset("lattice").unwrap();
    v["backend"]["extra"] = json!(1);
    assert!(matches!(RunConfig::from_value(v), Err(Error::ConfigInvalid(_))));

    let mut v = preset("grigorchuk").unwrap();
    v["chain"] = json!("renormalization");
    assert!(matches!(RunConfig::from_value(v), Err(Error::UnsupportedForChainKind(_))));

    let mut v = preset("lattice").unwrap();
    v["probes"]["self_replicating"] = json!({"word_bound": 2, "depth": 2});
    assert!(matches!(RunConfig::from_value(v), Err(Error::UnsupportedBackend(_))));
}

#[test]
fn budgets_are_enforced() {
    let mut cfg = config("lattice");
    cfg.max_index = 1000;
    match run(Command::Tower, &cfg) {
        Err(Error::IndexBudgetExceeded { level, limit }) => assert_eq!((level, limit), (4, 1000)),
        other => panic!("expected an index budget error, got {other:?}"),
    }
    let mut v = preset("heisenberg").unwrap();
    v["depth"] = json!(40);
    v["probes"] = json!({});
    let cfg = RunConfig::from_value(v).unwrap();
    assert!(matches!(run(Command::Tower, &cfg), Err(Error::LevelBudgetExceeded { .. })));
}
