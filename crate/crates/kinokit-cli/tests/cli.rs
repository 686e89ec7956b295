use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn kinokit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kinokit")).args(args).env_remove("KINOKIT_WORKERS").output().unwrap()
}

fn scenario(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_scenario(dir: &Path, extra: &str) -> String {
    let path = dir.join("s.toml");
    let text = format!(
        "seed = 42\nchecks = [\"tail_mass\", \"cancel_ratio\"]\n\n[params]\nd = 3\ns = 0.25\ngamma = 0.0\n\n\
         [sweep]\nv0_magnitudes = [2.0, 8.0, 32.0]\n{extra}"
    );
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn distance_prints_the_kinetic_distance() {
    let o = kinokit(&["distance", "--s", "0.3", "--z1", "0,0,0,0,1,0,0", "--z2", "0,0,0,0,-1,0,0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!((stdout(&o).trim().parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    let o = kinokit(&["distance", "--s", "0.5", "--d", "2", "--z1", "0.5,0,0,0,0", "--z2", "0,0,0,0,0"]);
    assert!((stdout(&o).trim().parse::<f64>().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn malformed_input_exits_with_two() {
    for args in [
        vec!["distance", "--s", "1.5", "--z1", "0,0,0,0,0,0,0", "--z2", "0,0,0,0,0,0,0"],
        vec!["distance", "--s", "0.5", "--z1", "0,0,0", "--z2", "0,0,0,0,0,0,0"],
        vec!["verify"],
        vec!["verify", "--config", "/nonexistent/scenario.toml"],
        vec!["sweep", "--config", "/nonexistent/scenario.toml"],
    ] {
        let o = kinokit(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    }
}

#[test]
fn kernel_and_hydro_print_json() {
    let cfg = scenario("maxwellian_d3.toml");
    let o = kinokit(&["kernel", "--config", &cfg, "--v", "0,0,0", "--vp", "1,0,0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.6166).abs() < 1e-4);
    let o = kinokit(&["kernel", "--config", &cfg, "--v", "0,0,0", "--vp", "0,0,0"]);
    assert_eq!(o.status.code(), Some(2));

    let o = kinokit(&["hydro", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let h: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(h["admitted"], true);
}

#[test]
fn verify_writes_outputs_independent_of_workers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path(), "");
    let one = dir.path().join("one");
    let o = kinokit(&["verify", "--config", &cfg, "--out", one.to_str().unwrap(), "--workers", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS tail_mass"));
    for f in ["report.json", "series_tail_mass.csv", "series_cancel_ratio.csv", "timing.json"] {
        assert!(one.join(f).exists(), "{f}");
    }

    let two = dir.path().join("two");
    let o = Command::new(env!("CARGO_BIN_EXE_kinokit"))
        .args(["verify", "--config", &cfg, "--out", two.to_str().unwrap()])
        .env("KINOKIT_WORKERS", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(one.join("report.json")).unwrap(), std::fs::read(two.join("report.json")).unwrap());

    let bad = Command::new(env!("CARGO_BIN_EXE_kinokit"))
        .args(["verify", "--config", &cfg, "--out", two.to_str().unwrap()])
        .env("KINOKIT_WORKERS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));

    let csv = dir.path().join("csv");
    let o = kinokit(&["report", "--input", one.join("report.json").to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let table = std::fs::read_to_string(csv.join("report.csv")).unwrap();
    assert!(table.lines().next().unwrap().starts_with("check_id,"));
}

#[test]
fn failing_checks_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path(), "\n[tolerances]\ncancel_ratio_spread = 1e-9\n");
    let out = dir.path().join("out");
    let o = kinokit(&["verify", "--config", &cfg, "--out", out.to_str().unwrap(), "--checks", "cancel_ratio"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL cancel_ratio"));
    let o = kinokit(&["report", "--input", out.join("report.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_needs_an_explicit_check_list() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path(), "");
    let out = dir.path().join("out");
    let o = kinokit(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o =
        kinokit(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap(), "--checks", "tail_mass", "--v0", "2,4,8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let series = std::fs::read_to_string(out.join("series_tail_mass.csv")).unwrap();
    assert_eq!(series.lines().filter(|l| l.starts_with("speed,")).count(), 3, "{series}");
}
