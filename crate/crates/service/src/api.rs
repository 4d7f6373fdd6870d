//! HTTP routes.
//!
//! | method | path | body |
//! |---|---|---|
//! | GET | `/datasets` | id list |
//! | GET | `/datasets/{id}/manifest` | manifest |
//! | GET | `/datasets/{id}/scene?mode=&t=&spacing=&bins=&attr=&compare=` | scene |
//! | GET | `/datasets/{id}/mesh/{structure}` | mesh |
//! | GET | `/datasets/{id}/kinematics` | full pose track |
//! | POST | `/simulate` | new dataset id |

use std::collections::HashMap;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;
use spineviz_core::dataset::{Attribute, SimulationDataset};
use spineviz_core::export::{scene_json, CanvasSize};
use spineviz_core::layout::{StructureGroup, ViewConfig, ViewMode};
use spineviz_core::sim::{run, Scenario, SpineModel};

use crate::store::{persist, simulation_id, Store, StoreError};

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub kind: &'static str,
    pub detail: String,
}

impl ApiError {
    pub fn bad_request(detail: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            kind: "bad_request",
            detail: detail.into(),
        }
    }

    pub fn not_found(detail: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::NOT_FOUND,
            kind: "not_found",
            detail: detail.into(),
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::NotFound(_) => ApiError::not_found(e.to_string()),
            StoreError::Load(e) => e.into(),
        }
    }
}

impl From<spineviz_core::Error> for ApiError {
    fn from(e: spineviz_core::Error) -> Self {
        use spineviz_core::Error::*;
        let (status, kind) = match &e {
            Query(_) | Parameter(_) => (StatusCode::BAD_REQUEST, "bad_request"),
            Divergence { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "divergence"),
            _ => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        ApiError {
            status,
            kind,
            detail: e.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.kind, "detail": self.detail }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/datasets", get(list))
        .route("/datasets/{id}/manifest", get(manifest))
        .route("/datasets/{id}/scene", get(scene))
        .route("/datasets/{id}/mesh/{structure}", get(mesh))
        .route("/datasets/{id}/kinematics", get(kinematics))
        .route("/simulate", post(simulate))
        .with_state(store)
}

fn json_bytes(body: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], body).into_response()
}

async fn list(State(store): State<Arc<Store>>) -> ApiResult<Json<Vec<String>>> {
    store
        .list()
        .map(Json)
        .map_err(|e| ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            kind: "internal",
            detail: e.to_string(),
        })
}

async fn manifest(State(store): State<Arc<Store>>, Path(id): Path<String>) -> ApiResult<Response> {
    let ds = store.get(&id).await?;
    Ok(Json(&ds.manifest).into_response())
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> ApiResult<T> {
    value
        .parse()
        .map_err(|_| ApiError::bad_request(format!("invalid value `{value}` for `{key}`")))
}

/// View configuration and canvas from scene query parameters.
pub fn view_from_query(query: &HashMap<String, String>) -> ApiResult<(ViewConfig, CanvasSize)> {
    let mut config = ViewConfig::default();
    let mut canvas = CanvasSize::default();
    let mut keys: Vec<_> = query.keys().collect();
    keys.sort();
    for key in keys {
        let value = query[key].as_str();
        match key.as_str() {
            "mode" => config.mode = value.parse::<ViewMode>().map_err(|e| ApiError::bad_request(e.to_string()))?,
            "t" => config.t = parse::<f64>(key, value).and_then(finite(key))?,
            "spacing" => config.spacing = parse::<f64>(key, value).and_then(finite(key))?,
            "bins" => config.bins = parse(key, value)?,
            "attr" => config.attribute = value.parse::<Attribute>().map_err(|e| ApiError::bad_request(e.to_string()))?,
            "group" => config.group = value.parse::<StructureGroup>().map_err(|e| ApiError::bad_request(e.to_string()))?,
            "gridlines" => config.gridlines = parse(key, value)?,
            "range" => {
                let (lo, hi) = value
                    .split_once(',')
                    .ok_or_else(|| ApiError::bad_request("range must be `lo,hi`"))?;
                config.range = Some([parse(key, lo)?, parse(key, hi)?]);
            }
            "compare" => config.compare = value.split(',').filter(|s| !s.is_empty()).map(String::from).collect(),
            "width" => canvas.width = parse(key, value)?,
            "height" => canvas.height = parse(key, value)?,
            _ => return Err(ApiError::bad_request(format!("unknown query parameter `{key}`"))),
        }
    }
    if canvas.width == 0 || canvas.height == 0 {
        return Err(ApiError::bad_request("canvas dimensions must be positive"));
    }
    let config = config.normalized()?;
    Ok((config, canvas))
}

fn finite(key: &str) -> impl Fn(f64) -> ApiResult<f64> + '_ {
    move |v| {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ApiError::bad_request(format!("`{key}` must be finite")))
        }
    }
}

async fn scene(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    Query(query): Query<HashMap<String, String>>,
) -> ApiResult<Response> {
    let ds = store.get(&id).await?;
    let (config, canvas) = view_from_query(&query)?;
    let mut comparisons = Vec::with_capacity(config.compare.len());
    for c in &config.compare {
        comparisons.push(store.get(c).await?);
    }
    let body = tokio::task::spawn_blocking(move || {
        let refs: Vec<&SimulationDataset> = comparisons.iter().map(|d| d.as_ref()).collect();
        scene_json(&ds, &refs, &config, canvas).map(|s| s.to_json())
    })
    .await
    .expect("scene task panicked")?;
    Ok(json_bytes(body))
}

async fn mesh(State(store): State<Arc<Store>>, Path((id, structure)): Path<(String, String)>) -> ApiResult<Response> {
    let ds = store.get(&id).await?;
    let mesh = ds
        .meshes
        .get(&structure)
        .ok_or_else(|| ApiError::not_found(format!("no mesh for `{structure}` in `{id}`")))?;
    Ok(Json(mesh).into_response())
}

async fn kinematics(State(store): State<Arc<Store>>, Path(id): Path<String>) -> ApiResult<Response> {
    let ds = store.get(&id).await?;
    let track = ds
        .kinematics
        .as_ref()
        .ok_or_else(|| ApiError::not_found(format!("dataset `{id}` has no kinematics")))?;
    let frames: Vec<Vec<[f64; 7]>> = (0..track.times().len())
        .map(|k| {
            track
                .vertebrae()
                .iter()
                .map(|v| {
                    let p = track.pose(k, v).expect("pose per vertebra");
                    let [w, x, y, z] = p.rotation_wxyz();
                    [w, x, y, z, p.translation.x, p.translation.y, p.translation.z]
                })
                .collect()
        })
        .collect();
    let body = json!({
        "times": track.times(),
        "vertebrae": track.vertebrae(),
        "fields": ["qw", "qx", "qy", "qz", "tx", "ty", "tz"],
        "frames": frames,
    });
    Ok(json_bytes(body.to_string()))
}

/// `POST /simulate` body. Either a preset name or an explicit scenario; the
/// model defaults to the bundled cervical model.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateRequest {
    pub preset: Option<String>,
    pub scenario: Option<Scenario>,
    pub model: Option<SpineModel>,
}

pub fn preset(name: &str) -> Option<Scenario> {
    match name {
        "static" => Some(Scenario::bundled_static()),
        "lateral_bend" => Some(Scenario::bundled_lateral_bend()),
        _ => None,
    }
}

async fn simulate(State(store): State<Arc<Store>>, body: axum::body::Bytes) -> ApiResult<Response> {
    let request: SimulateRequest =
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(format!("invalid request body: {e}")))?;
    let scenario = match (request.preset.as_deref(), request.scenario) {
        (Some(_), Some(_)) => return Err(ApiError::bad_request("give either `preset` or `scenario`")),
        (Some(name), None) => preset(name).ok_or_else(|| ApiError::bad_request(format!("unknown preset `{name}`")))?,
        (None, Some(s)) => s,
        (None, None) => return Err(ApiError::bad_request("missing `preset` or `scenario`")),
    };
    let model = request.model.unwrap_or_else(SpineModel::bundled);
    let id = simulation_id(&model, &scenario);
    let dir = store.dir().to_path_buf();
    let (id, census) = tokio::task::spawn_blocking(move || -> Result<_, spineviz_core::Error> {
        let ds = run(&model, &scenario)?;
        persist(&dir, &id, &ds)?;
        Ok((id, ds.census()))
    })
    .await
    .expect("simulation task panicked")?;
    log::info!("simulated {id}");
    Ok((StatusCode::CREATED, Json(json!({ "id": id, "census": census }))).into_response())
}
