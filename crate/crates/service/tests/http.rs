use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::Value;
use spineviz::store::persist;
use spineviz::{router, Store};
use spineviz_core::sim::{run, Scenario, SpineModel};
use tower::ServiceExt;

fn data_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let mut s = Scenario::bundled_lateral_bend();
    s.duration = 0.5;
    let ds = run(&SpineModel::bundled(), &s).unwrap();
    persist(dir.path(), "bend", &ds).unwrap();
    dir
}

async fn call(store: &Arc<Store>, method: &str, uri: &str, body: &str) -> (StatusCode, Vec<u8>) {
    let request = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    let response = router(store.clone()).oneshot(request).await.unwrap();
    let status = response.status();
    (status, response.into_body().collect().await.unwrap().to_bytes().to_vec())
}

async fn get(store: &Arc<Store>, uri: &str) -> (StatusCode, Value) {
    let (status, body) = call(store, "GET", uri, "").await;
    (status, serde_json::from_slice(&body).unwrap())
}

#[tokio::test]
async fn lists_and_describes_datasets() {
    let dir = data_dir();
    let store = Arc::new(Store::new(dir.path()));
    let (status, list) = get(&store, "/datasets").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(list, serde_json::json!(["bend"]));

    let (status, manifest) = get(&store, "/datasets/bend/manifest").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(manifest["id"], "bend");
    assert_eq!(manifest["span"], "C1..Th3");

    let (status, err) = get(&store, "/datasets/nope/manifest").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(err["error"], "not_found");
    let (status, _) = get(&store, "/datasets/..%2Fetc/manifest").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn scene_is_deterministic_and_honours_parameters() {
    let dir = data_dir();
    let store = Arc::new(Store::new(dir.path()));
    let uri = "/datasets/bend/scene?mode=simplified&bins=4&t=0.25";
    let (s1, a) = call(&store, "GET", uri, "").await;
    let (s2, b) = call(&store, "GET", uri, "").await;
    assert_eq!((s1, s2), (StatusCode::OK, StatusCode::OK));
    assert_eq!(a, b);
    assert_eq!(store.cached(), 1);
    let scene: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(scene["schema_version"], 1);
    assert_eq!(scene["config"]["mode"], "simplified");
    assert_eq!(scene["config"]["bins"], 4);
    assert!((scene["t"].as_f64().unwrap() - 0.25).abs() < 1e-9);
    assert!(!scene["primitives"].as_array().unwrap().is_empty());

    let (status, scene) = get(&store, "/datasets/bend/scene?mode=charts2d&group=facets&t=100").await;
    assert_eq!(status, StatusCode::OK);
    assert!((scene["t"].as_f64().unwrap() - 0.5).abs() < 1e-9);
}

#[tokio::test]
async fn malformed_queries_are_rejected() {
    let dir = data_dir();
    let store = Arc::new(Store::new(dir.path()));
    for q in ["mode=cubist", "t=abc", "bins=1", "range=3,1", "spacing=NaN", "colour=red", "width=0"] {
        let (status, err) = get(&store, &format!("/datasets/bend/scene?{q}")).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{q}: {err}");
        assert!(err["detail"].is_string());
    }
    let (status, _) = get(&store, "/datasets/bend/scene?compare=missing").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn meshes_and_kinematics() {
    let dir = data_dir();
    let store = Arc::new(Store::new(dir.path()));
    let (status, mesh) = get(&store, "/datasets/bend/mesh/C2C3").await;
    assert_eq!(status, StatusCode::OK);
    assert!(!mesh["vertices"].as_array().unwrap().is_empty());
    let (status, _) = get(&store, "/datasets/bend/mesh/C2C3_facetL").await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (status, k) = get(&store, "/datasets/bend/kinematics").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(k["times"].as_array().unwrap().len(), 51);
    assert_eq!(k["vertebrae"].as_array().unwrap().len(), 10);
    let first = &k["frames"][0][0];
    assert_eq!(first.as_array().unwrap().len(), 7);
}

#[tokio::test]
async fn simulate_stores_a_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let store = Arc::new(Store::new(dir.path()));
    let mut s = Scenario::bundled_static();
    s.duration = 0.2;
    let body = serde_json::json!({ "scenario": s }).to_string();
    let (status, out) = call(&store, "POST", "/simulate", &body).await;
    assert_eq!(status, StatusCode::CREATED, "{}", String::from_utf8_lossy(&out));
    let out: Value = serde_json::from_slice(&out).unwrap();
    let id = out["id"].as_str().unwrap().to_string();
    assert!(id.starts_with("sim-") && id.len() == 20);
    assert_eq!(out["census"]["vertebrae"], 10);
    assert_eq!(out["census"]["discs"], 8);
    assert_eq!(out["census"]["facet_pairs"], 9);

    let (_, again) = call(&store, "POST", "/simulate", &body).await;
    let again: Value = serde_json::from_slice(&again).unwrap();
    assert_eq!(again["id"], id.as_str());
    let (_, list) = get(&store, "/datasets").await;
    assert_eq!(list, serde_json::json!([id]));
}

#[tokio::test]
async fn simulate_errors() {
    let dir = tempfile::tempdir().unwrap();
    let store = Arc::new(Store::new(dir.path()));
    let diverging = r#"{"scenario": {"duration": 1000.0, "tick": 0.5, "step": 0.5, "gravity": [0.0, -9810.0, 0.0]}}"#;
    let (status, body) = call(&store, "POST", "/simulate", diverging).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{}", String::from_utf8_lossy(&body));
    let err: Value = serde_json::from_slice(&body).unwrap();
    assert_eq!(err["error"], "divergence");

    for bad in [
        "{}",
        "not json",
        r#"{"preset": "somersault"}"#,
        r#"{"preset": "static", "extra": 1}"#,
        r#"{"scenario": {"duration": -1.0, "gravity": [0.0, 0.0, 0.0]}}"#,
    ] {
        let (status, _) = call(&store, "POST", "/simulate", bad).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{bad}");
    }
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none());
}
