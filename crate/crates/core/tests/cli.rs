use std::fs;
use std::path::Path;
use std::process::Command;

fn wignerlab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_wignerlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

#[test]
fn scenarios_lists_catalog() {
    let out = wignerlab(&["scenarios"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["uniform-gauss", "rademacher", "checkerboard", "block", "heavy-tail", "truncation-pipeline", "custom"] {
        assert!(text.contains(name), "{name}");
    }
}

#[test]
fn simulate_writes_tables_with_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = wignerlab(&[
        "simulate", "--scenario", "checkerboard", "--n", "8,16", "--trials", "2", "--k-max", "4",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let names = listing(&out);
    for f in ["conditions.csv", "distances.csv", "moments.csv", "histogram.csv", "mean_esd.csv", "trend.csv"] {
        assert!(names.contains(&f.to_string()), "{f}");
        assert!(names.contains(&format!("{f}.meta.json")), "{f} sidecar");
    }
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("moments.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["scenario"], "checkerboard");
    assert!(meta["version"].as_str().unwrap().starts_with('v'));
    let hist = fs::read_to_string(out.join("histogram.csv")).unwrap();
    assert_eq!(hist.lines().count(), 1 + 2 * 200);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "scenario=block\nn=10\ntrials=2\nformat=json\n").unwrap();
    let out = dir.path().join("o");
    let o = wignerlab(&[
        "conditions", "--config", cfg.to_str().unwrap(), "--n", "20", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("conditions.json")).unwrap()).unwrap();
    assert_eq!(doc[0]["report"]["n"], 20);
    let row_one = doc[0]["report"]["row_one"].as_f64().unwrap();
    assert!((row_one - (0.25 - 1.0 / 40.0)).abs() < 1e-12);
}

#[test]
fn other_subcommands_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = |s: &str| dir.path().join(s).to_string_lossy().into_owned();
    let runs: Vec<Vec<String>> = vec![
        vec!["moments".into(), "--scenario".into(), "rademacher".into(), "--n".into(), "4,6".into(), "--trials".into(), "2".into(), "--out".into(), d("m")],
        vec!["walks".into(), "--k-max".into(), "6".into(), "--out".into(), d("w")],
        vec!["gauss".into(), "--n".into(), "8".into(), "--resamples".into(), "100".into(), "--out".into(), d("g")],
        vec!["concentrate".into(), "--n".into(), "12".into(), "--trials".into(), "10".into(), "--out".into(), d("c")],
    ];
    for args in runs {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = wignerlab(&refs);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let walks = fs::read_to_string(dir.path().join("w/walks.csv")).unwrap();
    assert_eq!(walks.lines().count(), 1 + 203);
    let gauss = fs::read_to_string(dir.path().join("g/gauss.csv")).unwrap();
    assert!(gauss.starts_with("row,levy,n,resamples\n"));
    let conc = fs::read_to_string(dir.path().join("c/concentration.csv")).unwrap();
    assert!(conc.starts_with("n,t,empirical,bound,satisfied\n"));
}

#[test]
fn bad_input_fails() {
    assert!(!wignerlab(&["simulate", "--scenario", "nope"]).status.success());
    assert!(!wignerlab(&["simulate", "--n", "20,10"]).status.success());
    assert!(!wignerlab(&["moments", "--k-max", "12"]).status.success());
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "colour=blue\n").unwrap();
    assert!(!wignerlab(&["conditions", "--config", cfg.to_str().unwrap()]).status.success());
    let file = dir.path().join("file");
    fs::write(&file, "x").unwrap();
    let o = wignerlab(&["walks", "--k-max", "2", "--out", file.join("sub").to_str().unwrap()]);
    assert!(!o.status.success());
}
