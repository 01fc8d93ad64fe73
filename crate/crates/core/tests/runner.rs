use std::path::{Path, PathBuf};

use annealdiag::error::Error;
use annealdiag::runner::{
    emit_figure_data, figure_csv, ingest_replay, parse_replay_str, read_ndjson, run_campaign, CampaignConfig,
    ConditionRecord, FigureId, RunOptions, RECORDS_FILE,
};
use serde_json::{json, Value};

fn config(extra: Value) -> CampaignConfig {
    let mut base = json!({
        "backend": "glauber",
        "environment_sizes": [4, 8],
        "lambdas": [0.2, 0.5],
        "seeds": [0, 1],
        "reads": 200,
        "sweeps": 400,
        "beta": {"fixed": 7.22},
        "bootstrap_resamples": 20,
    });
    for (k, v) in extra.as_object().unwrap() {
        base[k] = v.clone();
    }
    CampaignConfig::from_json(&base.to_string()).unwrap()
}

fn lines(records: &[ConditionRecord]) -> Vec<String> {
    records.iter().map(ConditionRecord::without_wall_time).collect()
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

#[test]
fn single_point_campaign_has_one_record_with_three_preparations() {
    let cfg = config(json!({"environment_sizes": [4], "lambdas": [0.5], "seeds": [0]}));
    let out = run_campaign(&cfg, &RunOptions::default()).unwrap();
    assert_eq!(out.records.len(), 1);
    assert_eq!(out.records[0].preparations.len(), 3);
    assert!(out.errors.is_empty());
}

#[test]
fn reruns_are_identical_and_worker_count_does_not_matter() {
    let cfg = config(json!({}));
    let a = run_campaign(&cfg, &RunOptions::default()).unwrap();
    let b = run_campaign(&cfg, &RunOptions { workers: 3, ..RunOptions::default() }).unwrap();
    assert_eq!(a.records.len(), 8);
    assert_eq!(lines(&a.records), lines(&b.records));
}

#[test]
fn resume_after_interrupt_matches_uninterrupted_run() {
    let cfg = config(json!({}));
    let full_dir = tempfile::tempdir().unwrap();
    let part_dir = tempfile::tempdir().unwrap();
    let full = run_campaign(&cfg, &RunOptions { output_dir: Some(full_dir.path().into()), ..RunOptions::default() }).unwrap();

    let opts = |max, resume| RunOptions {
        output_dir: Some(part_dir.path().into()),
        max_conditions: max,
        resume,
        ..RunOptions::default()
    };
    let first = run_campaign(&cfg, &opts(Some(3), false)).unwrap();
    assert_eq!((first.executed, first.remaining), (3, 5));
    // a torn trailing line from a crash mid-write
    let path = part_dir.path().join(RECORDS_FILE);
    let mut text = std::fs::read_to_string(&path).unwrap();
    text.push_str("{\"condition_hash\":\"trunc");
    std::fs::write(&path, text).unwrap();

    let rest = run_campaign(&cfg, &RunOptions { workers: 2, ..opts(None, true) }).unwrap();
    assert_eq!((rest.skipped, rest.executed), (3, 5));
    let on_disk: Vec<ConditionRecord> = read_ndjson(&path, false).unwrap();
    assert_eq!(lines(&on_disk), lines(&full.records));
    assert_eq!(rest.summary, full.summary);
}

#[test]
fn resume_refuses_a_directory_from_another_campaign() {
    let dir = tempfile::tempdir().unwrap();
    let opts = RunOptions { output_dir: Some(dir.path().into()), resume: true, ..RunOptions::default() };
    run_campaign(&config(json!({"seeds": [0]})), &opts).unwrap();
    let err = run_campaign(&config(json!({"seeds": [5]})), &opts).unwrap_err();
    assert!(matches!(err, Error::Config(_)), "{err}");
}

#[test]
fn records_are_recomputable_from_their_metadata() {
    let out = run_campaign(&config(json!({})), &RunOptions::default()).unwrap();
    let r = &out.records[5];
    let c = r.condition.as_ref().unwrap();
    assert_eq!(r.instance.meta.seed, c.seed);
    let single = config(json!({
        "environment_sizes": [r.instance.n - r.instance.subsystem.len()],
        "lambdas": [r.instance.meta.lambda],
        "disorders": [r.instance.meta.disorder],
        "frustrations": [r.instance.meta.frustration],
        "seeds": [r.instance.meta.seed],
    }));
    let again = run_campaign(&single, &RunOptions::default()).unwrap();
    let s = &again.records[0];
    assert_eq!(s.preparations, r.preparations);
    assert_eq!(s.memory, r.memory);
    assert_eq!(s.thermal, r.thermal);
}

#[test]
fn backend_caps_are_reported_per_condition() {
    let cfg = config(json!({
        "backend": "ed",
        "environment_sizes": [4, 10],
        "lambdas": [0.5],
        "seeds": [0],
        "pause_time_us": 0.01,
        "quantum_reference": true,
    }));
    let out = run_campaign(&cfg, &RunOptions::default()).unwrap();
    assert_eq!(out.records.len(), 1);
    assert_eq!(out.errors.len(), 1);
    assert_eq!(out.errors[0].kind, "resource");
    assert!(out.records[0].thermal.d_tv_quantum_conditional.is_some());
}

#[test]
fn lindblad_backend_runs() {
    let cfg = config(json!({
        "backend": "lindblad",
        "environment_sizes": [2],
        "lambdas": [0.5],
        "seeds": [0],
        "pause_time_us": 0.01,
        "lindblad": {"gamma": 0.01},
    }));
    let out = run_campaign(&cfg, &RunOptions::default()).unwrap();
    assert!(out.errors.is_empty(), "{:?}", out.errors);
    assert_eq!(out.records[0].preparations.len(), 3);
}

#[test]
fn missing_schedule_is_a_startup_error() {
    let cfg = config(json!({"schedule": "/nonexistent/schedule.csv"}));
    assert!(matches!(run_campaign(&cfg, &RunOptions::default()), Err(Error::Config(_))));
}

#[test]
fn replay_fixtures_match_the_oracle() {
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(fixtures().join("replay_manifest.json")).unwrap()).unwrap();
    let cfg = CampaignConfig::from_json(
        &json!({
            "backend": "replay",
            "replay": fixtures().join("replay"),
            "beta": {"fixed": manifest["beta"]},
            "bootstrap_resamples": 0,
        })
        .to_string(),
    )
    .unwrap();
    let out = run_campaign(&cfg, &RunOptions::default()).unwrap();
    assert!(out.errors.is_empty(), "{:?}", out.errors);
    let expected = manifest["conditions"].as_object().unwrap();
    assert_eq!(out.records.len(), expected.len());
    for r in &out.records {
        let key = r.replay_condition.as_deref().unwrap();
        let name = key.split('|').next().unwrap();
        let want = &expected[name];
        assert!((r.memory.m - want["M"].as_f64().unwrap()).abs() < 1e-12, "{name}");
        assert!((r.thermal.d_tv_classical - want["d_tv"].as_f64().unwrap()).abs() < 1e-9, "{name}");
        assert_eq!(r.classification().label(), want["classification"].as_str().unwrap(), "{name}");
        for (a, b) in r.thermal.reference.probs().iter().zip(want["reference"].as_array().unwrap()) {
            assert!((a - b.as_f64().unwrap()).abs() < 1e-12);
        }
    }
    let counts = manifest["counts"].as_object().unwrap();
    for (label, n) in &out.summary.classification_counts {
        assert_eq!(*n as u64, counts.get(label).and_then(Value::as_u64).unwrap_or(0), "{label}");
    }
}

fn one_set() -> Value {
    let text = std::fs::read_to_string(fixtures().join("replay/classification.ndjson")).unwrap();
    serde_json::from_str(text.lines().next().unwrap()).unwrap()
}

#[test]
fn replay_schema_errors() {
    let mut empty = one_set();
    empty["reads"] = json!([]);
    let err = parse_replay_str(&empty.to_string(), "t").unwrap_err();
    assert!(matches!(&err, Error::Parse { field, .. } if field == "reads"), "{err}");

    let mut zero = one_set();
    zero["reads"][3][2] = json!(0);
    assert!(matches!(parse_replay_str(&zero.to_string(), "t"), Err(Error::Validation(_))));

    let mut short = one_set();
    short["reads"][1] = json!([1, 1]);
    assert!(matches!(parse_replay_str(&short.to_string(), "t"), Err(Error::Validation(_))));

    let mut unknown = one_set();
    unknown["variables"][7] = json!(42);
    assert!(matches!(parse_replay_str(&unknown.to_string(), "t"), Err(Error::Mapping(_))));

    let mut typo = one_set();
    typo["variables"] = json!("all");
    let text = format!("{}\n{}\n", one_set(), typo);
    match parse_replay_str(&text, "t").unwrap_err() {
        Error::Parse { line, field, .. } => assert_eq!((line, field.as_str()), (2, "variables")),
        other => panic!("{other}"),
    }

    let mut extra = one_set();
    extra["colour"] = json!("blue");
    assert!(matches!(parse_replay_str(&extra.to_string(), "t"), Err(Error::Parse { .. })));
}

#[test]
fn replay_variables_may_be_permuted() {
    let base = one_set();
    let mut permuted = base.clone();
    let order: Vec<usize> = vec![7, 3, 5, 1, 0, 2, 4, 6];
    permuted["variables"] = json!(order);
    permuted["reads"] = Value::Array(
        base["reads"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| Value::Array(order.iter().map(|&q| r[q].clone()).collect()))
            .collect(),
    );
    let a = parse_replay_str(&base.to_string(), "a").unwrap();
    let b = parse_replay_str(&permuted.to_string(), "b").unwrap();
    assert_eq!(a[0].set.subsystem_indices().unwrap(), b[0].set.subsystem_indices().unwrap());
    assert_eq!(ingest_replay(&fixtures().join("replay")).unwrap().len(), 15);
}

#[test]
fn figure_csvs() {
    let out = run_campaign(&config(json!({"lambdas": [0.5, 0.2, 0.8]})), &RunOptions::default()).unwrap();
    let files = figure_csv(&out.records, FigureId::Coupling).unwrap();
    let detail = &files[0].1;
    let mut rows = detail.lines();
    assert_eq!(rows.next(), Some("lambda,seed,M,M_bootstrap_std,d_tv,sampling_floor,classification"));
    let lambdas: Vec<f64> = rows.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(lambdas.len(), out.records.len());
    assert!(lambdas.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(files[1].1.lines().count(), 4);

    let scatter = &figure_csv(&out.records, FigureId::Scatter).unwrap()[0].1;
    assert_eq!(scatter.lines().next(), Some("condition,M,d_tv,classification"));

    let dir = tempfile::tempdir().unwrap();
    let written = emit_figure_data(&out.records, FigureId::GapHistogram, dir.path()).unwrap();
    let hist = std::fs::read_to_string(&written[0]).unwrap();
    let gaps: usize = hist.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(gaps, out.records.iter().filter(|r| r.landscape.as_ref().is_some_and(|l| l.gap.is_some())).count());
    assert!(figure_csv(&[], FigureId::Scatter).is_err());
}
