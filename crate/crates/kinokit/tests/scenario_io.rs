use kinokit::harness::{emit, reference_scenarios, run, Format, Report, Scenario};
use kinokit::ModelParams;
use std::path::PathBuf;

fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

#[test]
fn shipped_scenarios_load_and_round_trip() {
    let mut n = 0;
    for entry in std::fs::read_dir(scenario_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let s = Scenario::load(&path).unwrap();
            let canon = s.to_toml().unwrap();
            let again = Scenario::parse(&canon).unwrap();
            assert_eq!(again, s, "{}", path.display());
            assert_eq!(again.to_toml().unwrap(), canon);
            assert_eq!(again.digest().unwrap(), s.digest().unwrap());
            n += 1;
        }
    }
    assert!(n >= 3);
}

#[test]
fn reference_scenarios_are_valid_and_distinct() {
    let refs = reference_scenarios();
    assert_eq!(refs.len(), 4);
    let mut digests: Vec<String> = refs.iter().map(|(_, s)| s.digest().unwrap()).collect();
    for (_, s) in &refs {
        s.validate().unwrap();
        assert_eq!(s.seed, 42);
    }
    digests.dedup();
    assert_eq!(digests.len(), 4);
}

#[test]
fn save_and_load_preserve_the_digest() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.toml");
    let s = Scenario::new(ModelParams::new(2, 0.75, -0.5).unwrap(), 9).with_checks(&["nondeg1", "cone"]);
    s.save(&path).unwrap();
    assert_eq!(Scenario::load(&path).unwrap().digest().unwrap(), s.digest().unwrap());
}

#[test]
fn invalid_scenarios_name_every_problem() {
    let text = "seed = 1\nmc = 10\nchecks = [\"nope\"]\n[params]\nd = 4\ns = 1.5\ngamma = 0.0\n";
    let err = Scenario::parse(text).unwrap_err().to_string();
    for needle in ["d must be 2 or 3", "mc must be at least 1000", "unknown check id 'nope'"] {
        assert!(err.contains(needle), "{err}");
    }
    assert!(Scenario::parse("seed = 1\nbogus = 2\n[params]\nd = 3\ns = 0.5\ngamma = 0.0\n").is_err());
    assert!(Scenario::parse("[params]\nd = 3\ns = 0.5\ngamma = 0.0\n").is_err());
}

#[test]
fn report_survives_a_json_round_trip_and_emits_tables() {
    let mut s = Scenario::new(ModelParams::new(3, 0.25, 0.0).unwrap(), 42).with_checks(&["tail_mass", "cancel_ratio"]);
    s.sweep.v0_magnitudes = vec![2.0, 8.0, 32.0];
    let report = run(&s, 1).unwrap();
    assert!(report.all_pass(), "{:?}", report.summary);
    assert_eq!(report.exit_code(), 0);
    let json = report.to_json().unwrap();
    let back: Report = serde_json::from_str(&json).unwrap();
    assert_eq!(back.to_json().unwrap(), json);

    let dir = tempfile::tempdir().unwrap();
    emit(&report, dir.path(), Format::Csv).unwrap();
    let table = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(table.starts_with("check_id,v0,r,constant,value,pass"));
    let series = std::fs::read_to_string(dir.path().join("series_tail_mass.csv")).unwrap();
    assert!(series.lines().any(|l| l.starts_with("fit,,exponent,")), "{series}");
    assert!(dir.path().join("timing.json").exists());
}

#[test]
fn tolerance_scale_only_loosens() {
    let mut s = Scenario::new(ModelParams::new(3, 0.25, 0.0).unwrap(), 42).with_checks(&["cancel_ratio"]);
    let strict = run(&s, 1).unwrap();
    s.tolerance_scale = 2.0;
    let loose = run(&s, 1).unwrap();
    assert!(loose.summary.passed >= strict.summary.passed);
    assert!(Scenario { tolerance_scale: 0.5, ..s }.validate().is_err());
}
