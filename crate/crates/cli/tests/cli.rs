use std::path::Path;
use std::process::Command;

const SMALL: &str = r#"
name = "cli-small"
eps = [0.2, 0.1, 0.05]

[grid]
n_polar = 16
finest = 0.25
grading = 1.3
max_cell = 0.1

[milne]
n_polar = 16
max_cell = 0.2
ratio = 1.1
first = 1e-3

[characteristics]
samples = 40
mask_eta = 15
mask_phi = 15
"#;

fn nte(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_nte"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn setup() -> (tempfile::TempDir, String) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(&cfg, SMALL).unwrap();
    let cfg = cfg.to_str().unwrap().to_owned();
    (dir, cfg)
}

fn header(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap().lines().next().unwrap().to_owned()
}

#[test]
fn milne_writes_tables_and_report() {
    let (dir, cfg) = setup();
    let out = dir.path().join("m");
    let o = nte(&[
        "milne",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--threads",
        "1",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS milne"));
    assert_eq!(header(&out.join("milne").join("cosine.csv")), "eta,phi,value");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema"], "nte-report/1");
    assert_eq!(report["config"]["studies"], serde_json::json!(["milne"]));
}

#[test]
fn characteristics_writes_paths() {
    let (dir, cfg) = setup();
    let out = dir.path().join("c");
    let o = nte(&[
        "characteristics",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--threads",
        "1",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let path = out.join("characteristics").join("convex").join("path-000.csv");
    assert_eq!(header(&path), "t,eta,phi,E");
    assert_eq!(
        header(&out.join("characteristics").join("hollow-non-convex.csv")),
        "eta,phi"
    );
}

#[test]
fn failing_band_exits_with_one() {
    let (dir, cfg) = setup();
    let text = format!("{SMALL}\n[[bands]]\nquantity = \"S0/L2\"\nmin = 5.0\n");
    std::fs::write(&cfg, text).unwrap();
    let out = dir.path().join("s");
    let o = nte(&[
        "sources",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--threads",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL slope S0/L2"));
    let norms = std::fs::read_to_string(out.join("norms.csv")).unwrap();
    assert_eq!(norms.lines().next(), Some("field,norm,eps,value"));
}

#[test]
fn bad_config_exits_with_two() {
    let (dir, cfg) = setup();
    std::fs::write(&cfg, "eps = [0.1, 0.2]\n").unwrap();
    let o = nte(&[
        "converge",
        "--config",
        &cfg,
        "--out",
        dir.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    let o = nte(&[
        "converge",
        "--config",
        dir.path().join("missing.toml").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(&cfg, "no_such_key = 1\n").unwrap();
    assert_eq!(nte(&["milne", "--config", &cfg]).status.code(), Some(2));
}
