use std::path::Path;
use std::process::{Command, Output};

use spineviz::store::persist;
use spineviz_core::dataset::Attribute;
use spineviz_core::sim::{run, Scenario, SpineModel};

fn spineviz(data: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spineviz"))
        .arg("--data-dir")
        .arg(data)
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn fixture() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let mut s = Scenario::bundled_lateral_bend();
    s.duration = 0.3;
    let ds = run(&SpineModel::bundled(), &s).unwrap();
    persist(dir.path(), "bend", &ds).unwrap();
    let mut broken = ds.clone();
    for m in broken.matrices.values_mut() {
        m.remove_column("C4C5_facetR");
    }
    persist(dir.path(), "broken", &broken).unwrap();
    dir
}

#[test]
fn validate_exit_codes() {
    let dir = fixture();
    let ok = spineviz(dir.path(), &["validate", "--dataset", "bend"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));

    let bad = spineviz(dir.path(), &["validate", "--dataset", "broken"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("C4C5_facetR"));

    let missing = spineviz(dir.path(), &["validate", "--dataset", "nope"]);
    assert_eq!(missing.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_2() {
    let dir = fixture();
    assert_eq!(spineviz(dir.path(), &["validate", "--datset", "bend"]).status.code(), Some(2));
    assert_eq!(spineviz(dir.path(), &["export", "--dataset", "bend"]).status.code(), Some(2));
    assert_eq!(spineviz(dir.path(), &["frobnicate"]).status.code(), Some(2));
}

#[test]
fn export_writes_svg_and_clamps_time() {
    let dir = fixture();
    for view in ["charts", "facets", "stacked", "simplified", "glyphs"] {
        let out = dir.path().join(format!("{view}.svg"));
        let o = spineviz(dir.path(), &["export", "--dataset", "bend", "--view", view, "--t", "999", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{view}: {}", String::from_utf8_lossy(&o.stderr));
        let svg = std::fs::read_to_string(&out).unwrap();
        assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"), "{view}");
    }
    let out = dir.path().join("x.svg");
    let o = spineviz(dir.path(), &["export", "--dataset", "bend", "--width", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn broken_dataset_exports_hatched_frame() {
    let dir = fixture();
    let out = dir.path().join("f.svg");
    let o = spineviz(dir.path(), &["export", "--dataset", "broken", "--view", "facets", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let svg = std::fs::read_to_string(&out).unwrap();
    assert!(svg
        .lines()
        .any(|l| l.contains("class=\"frame missing\"") && l.contains("C4C5_facetR") && l.contains("url(#hatch)")));
}

#[test]
fn simulate_derives_stable_ids() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("short.toml");
    let mut s = Scenario::bundled_static();
    s.duration = 0.1;
    std::fs::write(&scenario, s.to_toml()).unwrap();
    let a = spineviz(dir.path(), &["simulate", "--scenario", scenario.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let id = String::from_utf8(a.stdout).unwrap().trim().to_string();
    assert!(id.starts_with("sim-"));
    let b = spineviz(dir.path(), &["simulate", "--scenario", scenario.to_str().unwrap()]);
    assert_eq!(String::from_utf8(b.stdout).unwrap().trim(), id);

    let ds = spineviz::store::open(dir.path(), &id).unwrap();
    assert!(ds.matrix(Attribute::ForceMagnitude).is_ok());
    assert_eq!(spineviz(dir.path(), &["validate", "--dataset", &id]).status.code(), Some(0));
}
