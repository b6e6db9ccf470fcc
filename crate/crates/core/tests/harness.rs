use std::path::PathBuf;

use lojex::harness::{self, run, run_scenario, CheckSpec, Scenario, Status};
use lojex::{seed, Error};

fn set(form: &str) -> String {
    format!(r#"{{"ambient_dim": 2, "base_point": [[0, 0], [0, 0]], "form": {form}}}"#)
}

fn scenario(x: &str, y: Option<&str>, checks: &str) -> String {
    let y = y.map(|y| format!(r#""y": {},"#, set(y))).unwrap_or_default();
    format!(
        r#"{{"name": "t", "seed": 3, "ambient_dim": 2, "base_point": [[0, 0], [0, 0]],
            "x": {}, {y}
            "estimator": {{"shells": 8, "per_shell": 16}},
            "checks": {checks}}}"#,
        set(x)
    )
}

const PARABOLA: &str = r#"{"kind": "graph", "param_dim": 1, "components": ["x1^2"]}"#;
const ZERO_GRAPH: &str = r#"{"kind": "graph", "param_dim": 1, "components": ["0"]}"#;
const AXIS: &str = r#"{"kind": "implicit", "equations": ["x2"]}"#;

fn scenarios_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

#[test]
fn shipped_scenarios_parse() {
    let mut n = 0;
    for entry in std::fs::read_dir(scenarios_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let s = Scenario::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert!(!s.checks.is_empty());
            n += 1;
        }
    }
    assert!(n >= 3);
}

#[test]
fn defaults_fill_in_check_parameters() {
    let s = Scenario::from_json(&scenario(PARABOLA, Some(AXIS), r#"[{"kind": "section_monotonicity"}]"#)).unwrap();
    let CheckSpec::SectionMonotonicity(p) = &s.checks[0] else { panic!() };
    assert_eq!(p.trials, 20);
    assert_eq!(p.tol_section, 0.2);
    assert_eq!(s.estimator.shells, 8);
    assert_eq!(s.estimator.radius, 1.0);
}

#[test]
fn invalid_scenarios_are_rejected() {
    let unknown = scenario(PARABOLA, Some(AXIS), "[]").replace(r#""name""#, r#""bogus": 1, "name""#);
    assert!(matches!(Scenario::from_json(&unknown), Err(Error::Json(_))));
    let no_y = scenario(PARABOLA, None, r#"[{"kind": "estimate"}]"#);
    assert!(matches!(Scenario::from_json(&no_y), Err(Error::Invalid(_))));
    let not_graphs = scenario(PARABOLA, Some(AXIS), r#"[{"kind": "tangency"}]"#);
    assert!(matches!(Scenario::from_json(&not_graphs), Err(Error::Invalid(_))));
    let bad_angle = scenario(PARABOLA, None, r#"[{"kind": "lemma1", "angle": 2.0}]"#);
    assert!(Scenario::from_json(&bad_angle).is_err());
    let no_trials = scenario(PARABOLA, None, r#"[{"kind": "distance_comparability", "trials": 0}]"#);
    assert!(Scenario::from_json(&no_trials).is_err());
}

#[test]
fn missing_file_is_an_io_error() {
    assert!(matches!(run_scenario(&scenarios_dir().join("nope.json")), Err(Error::Io { .. })));
}

#[test]
fn statuses_cover_pass_fail_skip_and_error() {
    let checks = r#"[
        {"kind": "estimate", "expected": [1.8, 2.2]},
        {"kind": "estimate", "expected": [3.0, 3.5]},
        {"kind": "tangency"},
        {"kind": "lemma1", "configs": 5, "attempts_per_config": 10}
    ]"#;
    let s = Scenario::from_json(&scenario(PARABOLA, Some(ZERO_GRAPH), checks)).unwrap();
    let r = run(&s, None);
    let statuses: Vec<Status> = r.checks.iter().map(|c| c.status).collect();
    // The sweep at the default angle finds no admissible configuration.
    assert_eq!(statuses, [Status::Pass, Status::Fail, Status::Pass, Status::Skip]);
    assert_eq!((r.summary.passed, r.summary.failed, r.summary.skipped), (2, 1, 1));
    assert!(!r.success());
    assert_eq!(r.checks[0].tolerances["expected_low"], 1.8);

    let contained = Scenario::from_json(&scenario(
        AXIS,
        Some(r#"{"kind": "implicit", "equations": ["x1*x2"]}"#),
        r#"[{"kind": "estimate"}]"#,
    ))
    .unwrap();
    let r = run(&contained, None);
    assert_eq!(r.checks[0].status, Status::Error);
    assert!(r.checks[0].message.as_deref().unwrap().contains("containment"));
    assert!(!r.success());
}

#[test]
fn tangency_beyond_truncation_is_skipped() {
    let s = Scenario::from_json(&scenario(ZERO_GRAPH, Some(ZERO_GRAPH), r#"[{"kind": "tangency", "K": 4}]"#));
    // Identical sets intersect everywhere, but the tangency check stops
    // before any estimate is attempted.
    let r = run(&s.unwrap(), None);
    assert_eq!(r.checks[0].status, Status::Skip);
    assert!(r.success());
}

#[test]
fn seeds_derive_from_the_scenario_seed() {
    let s = Scenario::from_json(&scenario(PARABOLA, Some(AXIS), r#"[{"kind": "estimate"}, {"kind": "modes_consistency"}]"#)).unwrap();
    let a = run(&s, None);
    assert_eq!(a.seed, 3);
    for c in &a.checks {
        assert_eq!(c.seed, seed::derive(3, &[c.index as u64]));
    }
    let b = run(&s, Some(99));
    assert_eq!(b.seed, 99);
    assert_eq!(b.checks[0].seed, seed::derive(99, &[0]));
    assert_ne!(a.checks[0].headline, b.checks[0].headline);
    let again = run(&s, Some(99)).without_durations();
    assert_eq!(again.to_json(), b.without_durations().to_json());
}

#[test]
fn exports_are_consistent() {
    let s = Scenario::from_json(&scenario(PARABOLA, Some(AXIS), r#"[{"kind": "estimate"}]"#)).unwrap();
    let r = run(&s, None);
    let back: harness::Report = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(back, r);
    assert_eq!(r.schema_version, harness::SCHEMA_VERSION);
    let csv = r.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("index,kind,status"));
    assert!(lines[1].starts_with("0,estimate,pass,"));
    assert!(r.shell_tables().contains("shell,log_r_center,envelope,count"));
    assert!(r.without_durations().checks.iter().all(|c| c.duration_ms == 0.0));
}
