use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn billiard(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_billiard"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const TABLE: [&str; 8] = ["table", "--alpha1-cf", "3,3,[1]", "--alpha2-cf", "2,5,[2]", "--K", "4", "--n"];

#[test]
fn identical_runs_give_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [a.path(), b.path()] {
        let mut args = TABLE.to_vec();
        args.push("2");
        assert!(billiard(d, &args).status.success());
        let o = billiard(d, &["solve", "--alpha", "200/509", "--K", "12", "--precision", "ext", "--csv"]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for f in ["table.csv", "table.csv.manifest.json", "f.json", "f.csv", "f.json.manifest.json"] {
        let x = fs::read(a.path().join(f)).unwrap();
        let y = fs::read(b.path().join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
    let m: serde_json::Value =
        serde_json::from_slice(&fs::read(a.path().join("f.json.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["precision"], "ext");
    assert_eq!(m["outputs"].as_array().unwrap().len(), 2);
    assert_eq!(m["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn flags_override_the_config_file() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"n": 2, "frequencies": ["3,3,[1]", "2,5,[2]"], "K": 3, "out": "from_config.csv"}"#,
    )
    .unwrap();
    let o = billiard(d.path(), &["table", "--config", "run.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(d.path().join("from_config.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 + 4);

    let o = billiard(d.path(), &["table", "--config", "run.json", "--K", "4", "--out", "flag.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(d.path().join("flag.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 + 4 + 5);
    assert!(text.starts_with("k,j1,entry\n4,4,5.02769"));

    // frequencies as numbers and fractions in the config; flags replace them
    fs::write(&cfg, r#"{"frequencies": [0.31], "K": 6}"#).unwrap();
    let o = billiard(d.path(), &["solve", "--config", "run.json", "--alpha", "200/509"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let state: serde_json::Value = serde_json::from_slice(&fs::read(d.path().join("f.json")).unwrap()).unwrap();
    let t = state["frequencies"]["turns"][0].as_f64().unwrap();
    assert!((t - 200.0 / 509.0).abs() < 1e-15, "{t}");
}

#[test]
fn invalid_configs_exit_1_and_name_the_field() {
    let d = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &str); 6] = [
        (&["solve", "--alpha", "0.31"], "`K`"),
        (&["solve", "--K", "4"], "`frequencies`"),
        (&["solve", "--alpha", "0.31", "--K", "4", "--precision", "quad"], "`precision`"),
        (&["solve", "--alpha", "0.31", "--K", "4", "--f0", "0.5"], "`f0`"),
        (&["solve", "--alpha", "0.31", "--K", "4", "--n", "2"], "`n`"),
        (&["solve", "--alpha", "0.31", "--K", "4", "--gauge-a", "1,2"], "`gauge_a`"),
    ];
    for (args, field) in cases {
        let o = billiard(d.path(), args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).contains(field), "{args:?}: {}", stderr(&o));
    }
    fs::write(d.path().join("bad.json"), r#"{"K": 4, "colour": "red"}"#).unwrap();
    let o = billiard(d.path(), &["solve", "--config", "bad.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("colour"));
    let o = billiard(d.path(), &["scan", "--config", "grid.json"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    fs::write(d.path().join("grid.json"), r#"{"grid": ["1/3", 0.7]}"#).unwrap();
    let o = billiard(d.path(), &["scan", "--config", "grid.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`grid[1]`"), "{}", stderr(&o));
    assert!(fs::read_dir(d.path()).unwrap().all(|e| {
        let n = e.unwrap().file_name();
        n == "bad.json" || n == "grid.json"
    }));
}

#[test]
fn resonance_and_io_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let o = billiard(d.path(), &["solve", "--alpha", "1/4", "--K", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let o = billiard(d.path(), &["fit", "--alpha", "2/5", "--K", "30"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = billiard(d.path(), &["plot", "--input", "missing.csv"]);
    assert_eq!(o.status.code(), Some(4));
    let o = billiard(d.path(), &["fit", "--input", "missing.json"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn fit_verify_scan_plot_pipeline() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    let o = billiard(p, &["solve", "--alpha", "200/509", "--K", "40", "--out", "s.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = billiard(p, &["fit", "--input", "s.json", "--window", "10,40"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(fs::read_to_string(p.join("ratios.csv")).unwrap().starts_with("j,f_2j,b_j\n"));
    let fit: serde_json::Value = serde_json::from_slice(&fs::read(p.join("ratios.fit.json")).unwrap()).unwrap();
    assert_eq!(fit["fit"]["window"], serde_json::json!([10, 40]));
    let sigma = fit["fit"]["sigma"].as_f64().unwrap();
    assert!((sigma + 1.5).abs() < 0.05, "{sigma}");

    let o = billiard(p, &["verify", "--alpha", "200/509", "--seed", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rep: serde_json::Value = serde_json::from_slice(&fs::read(p.join("verify.json")).unwrap()).unwrap();
    for key in ["slope_checks", "fermat_max", "poly_residual_max", "sphere_limit"] {
        assert!(rep.get(key).is_some(), "{key}");
    }
    assert_eq!(rep["pass"], true);

    fs::write(
        p.join("scan.json"),
        r#"{"grid": ["3/10", "180/509", "1/3", "200/509"], "K": 30, "workers": 2, "plot": {"title": "test"}}"#,
    )
    .unwrap();
    let o = billiard(p, &["scan", "--config", "scan.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(p.join("scan.csv")).unwrap();
    let status: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(status, ["gap", "ok", "gap", "ok"]);
    let o = billiard(p, &["plot", "--config", "scan.json", "--input", "scan.csv", "--out", "scan.svg"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let svg = fs::read_to_string(p.join("scan.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains(">test</text>"));
    assert!(p.join("scan.csv.manifest.json").exists() && p.join("scan.svg.manifest.json").exists());
}

#[test]
fn usage_errors_exit_1() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(billiard(d.path(), &["solve", "--bogus"]).status.code(), Some(1));
    assert_eq!(billiard(d.path(), &["fit", "--window", "3"]).status.code(), Some(1));
    assert_eq!(billiard(d.path(), &["--help"]).status.code(), Some(0));
}
