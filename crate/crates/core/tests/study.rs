use std::path::Path;

use nte_core::data::BoundaryData;
use nte_core::study::{run_study, Band, Study, StudyConfig, REPORT_SCHEMA};
use nte_core::transport::{import_field, GridSpec};

fn small(out: &Path) -> StudyConfig {
    let mut c = StudyConfig {
        name: "small".into(),
        studies: vec![Study::Convergence, Study::Sources],
        eps: vec![0.2, 0.1, 0.05],
        output: out.to_path_buf(),
        grid: GridSpec {
            n_polar: 16,
            finest: 0.25,
            grading: 1.3,
            max_cell: 0.1,
            ..GridSpec::default()
        },
        ..StudyConfig::default()
    };
    c.milne.n_polar = 16;
    c.milne.max_cell = 0.2;
    c.milne.ratio = 1.1;
    c.milne.first = 1e-3;
    c
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn runs_are_byte_for_byte_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_study(&small(&dir.path().join("a"))).unwrap();
    let b = run_study(&small(&dir.path().join("b"))).unwrap();
    assert_eq!(a.norms, b.norms);
    for f in ["norms.csv", "slopes.csv", "norms.json"] {
        assert_eq!(
            read(&dir.path().join("a").join(f)),
            read(&dir.path().join("b").join(f)),
            "{f}"
        );
    }
}

#[test]
fn report_layout() {
    let dir = tempfile::tempdir().unwrap();
    let r = run_study(&small(dir.path())).unwrap();
    assert_eq!(r.schema, REPORT_SCHEMA);
    let json: serde_json::Value = serde_json::from_str(&read(&dir.path().join("report.json"))).unwrap();
    for key in [
        "schema", "config", "norms", "slopes", "bands", "checks", "grids", "warnings", "pass",
    ] {
        assert!(json.get(key).is_some(), "{key}");
    }
    let norms: serde_json::Value = serde_json::from_str(&read(&dir.path().join("norms.json"))).unwrap();
    assert_eq!(norms["schema"], "nte-norms/1");
    for e in norms["entries"].as_array().unwrap() {
        let mut keys: Vec<&str> = e.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        keys.sort();
        assert_eq!(keys, ["eps", "field", "norm", "value"]);
    }
    let csv = read(&dir.path().join("norms.csv"));
    assert_eq!(csv.lines().next(), Some("field,norm,eps,value"));
    assert_eq!(csv.lines().count(), r.norms.entries.len() + 1);
    // every quantity is sampled at all three eps, so every one is fitted
    assert!(r.slope("u-U0/L2").is_some() && r.slope("S0/L2").is_some());
    assert_eq!(r.grids.len(), 3);
    let echoed = StudyConfig::from_toml(&read(&dir.path().join("config.toml"))).unwrap();
    assert_eq!(echoed, small(dir.path()));
}

#[test]
fn pass_flag_follows_the_bands() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = small(dir.path());
    c.studies = vec![Study::Sources];
    c.bands = vec![Band::new("S0/L2", Some(1.8), Some(2.2))];
    assert!(run_study(&c).unwrap().pass);
    c.bands = vec![Band::new("S0/L2", Some(2.5), None)];
    assert!(!run_study(&c).unwrap().pass);
    c.bands = vec![Band::new("no-such/quantity", None, None)];
    let r = run_study(&c).unwrap();
    assert!(!r.pass && r.bands[0].slope.is_nan());
}

#[test]
fn exported_fields_read_back() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = small(dir.path());
    c.studies = vec![Study::Convergence];
    c.export_fields = true;
    run_study(&c).unwrap();
    let (header, values) = import_field(&dir.path().join("fields").join("u-eps0.1.json")).unwrap();
    assert_eq!(header.schema, "nte-field/1");
    assert_eq!(values.len(), header.shape.iter().product::<usize>());
    assert!(values.iter().all(|v| v.is_finite()));
    let (bounds_lo, bounds_hi) = BoundaryData::default().bounds();
    assert!(values.iter().all(|v| *v >= bounds_lo - 1e-9 && *v <= bounds_hi + 1e-9));
}

#[test]
fn milne_and_characteristic_tables() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = small(dir.path());
    c.studies = vec![Study::Milne, Study::Characteristics];
    c.characteristics.samples = 50;
    c.characteristics.mask_eta = 21;
    c.characteristics.mask_phi = 21;
    let r = run_study(&c).unwrap();
    assert!(r.pass, "{:?}", r.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
    let m = read(&dir.path().join("milne").join("cosine.csv"));
    assert_eq!(m.lines().next(), Some("eta,phi,value"));
    let mesh = c.milne.mesh().unwrap();
    assert_eq!(m.lines().count(), 1 + mesh.len() * c.milne.n_polar);
    let p = read(
        &dir.path()
            .join("characteristics")
            .join("non-convex")
            .join("path-000.csv"),
    );
    assert_eq!(p.lines().next(), Some("t,eta,phi,E"));
    let e: Vec<f64> = p
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert!(e.iter().all(|v| (v - e[0]).abs() < 1e-8));
    let convex = read(&dir.path().join("characteristics").join("hollow-convex.csv"));
    assert_eq!(convex.lines().collect::<Vec<_>>(), ["eta,phi"]);
    let hollow = read(&dir.path().join("characteristics").join("hollow-non-convex.csv"));
    assert!(hollow.lines().count() > 1);
}

#[test]
fn bad_configs_are_rejected_before_any_work() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = small(&dir.path().join("never"));
    c.eps = vec![0.05, 0.1, 0.2];
    assert!(matches!(run_study(&c), Err(nte_core::Error::Config(_))));
    assert!(!dir.path().join("never").exists());
}
