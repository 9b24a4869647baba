//! HTTP session API over the engine. Sessions live in memory and expire
//! after an idle period.

use std::collections::HashMap;
use std::hash::{BuildHasher, Hasher};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use hyperflip::geometry::{format_rational, rational_to_f64};
use hyperflip::{
    apply_flip, build_level2, coherent_subdivision, collapse_level2, enumerate_flips, gkz, k_fold_sums, Error, Flip,
    HeightFunction, Hypertriangulation, PointConfig,
};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::format::{label_json, triangle_json, FlipJson, HeightsFile, PointsFile, TriFile, TriangleJson};

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError { status, body: json!({ "error": message.into() }) }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        match &e {
            Error::InvalidHypertriangulation(report) => ApiError {
                status: StatusCode::UNPROCESSABLE_ENTITY,
                body: json!({
                    "error": "invalid hypertriangulation",
                    "violations": report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                }),
            },
            Error::Internal(_) => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
            _ => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
        }
    }
}

impl From<crate::error::CliError> for ApiError {
    fn from(e: crate::error::CliError) -> Self {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

enum Step {
    Flip(Flip),
    Age,
}

struct Session {
    base: PointConfig,
    current: Hypertriangulation,
    /// Previous states with the step that left each of them.
    history: Vec<(Hypertriangulation, Step)>,
}

struct Entry {
    session: Arc<tokio::sync::Mutex<Session>>,
    last_used: Instant,
}

#[derive(Clone)]
pub struct AppState {
    sessions: Arc<Mutex<HashMap<String, Entry>>>,
    ttl: Duration,
    counter: Arc<AtomicU64>,
}

impl AppState {
    pub fn new(ttl: Duration) -> Self {
        AppState { sessions: Arc::default(), ttl, counter: Arc::default() }
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().unwrap().len()
    }

    fn insert(&self, session: Session) -> String {
        let n = self.counter.fetch_add(1, Ordering::Relaxed);
        let salt = std::collections::hash_map::RandomState::new().build_hasher().finish();
        let id = format!("{n:x}-{salt:016x}");
        let entry = Entry { session: Arc::new(tokio::sync::Mutex::new(session)), last_used: Instant::now() };
        let mut map = self.sessions.lock().unwrap();
        self.expire(&mut map);
        map.insert(id.clone(), entry);
        id
    }

    fn expire(&self, map: &mut HashMap<String, Entry>) {
        let ttl = self.ttl;
        map.retain(|_, e| e.last_used.elapsed() <= ttl);
    }

    fn get(&self, id: &str) -> ApiResult<Arc<tokio::sync::Mutex<Session>>> {
        let mut map = self.sessions.lock().unwrap();
        self.expire(&mut map);
        let entry = map.get_mut(id).ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no session {id}")))?;
        entry.last_used = Instant::now();
        Ok(entry.session.clone())
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/flips", get(list_flips))
        .route("/sessions/{id}/flips/{index}", post(apply))
        .route("/sessions/{id}/age", post(age))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/gkz", get(get_gkz))
        .with_state(state)
}

pub async fn serve(port: u16, ttl: Duration) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(ttl))).await
}

fn display(r: &hyperflip::Rational) -> f64 {
    rational_to_f64(r)
}

fn state_json(id: &str, s: &Session) -> Value {
    let t = &s.current;
    let cfg = t.config();
    let points: Vec<Value> = cfg
        .entries()
        .map(|(l, p)| {
            json!({
                "label": label_json(l),
                "x": format_rational(&p.x),
                "y": format_rational(&p.y),
                "display": { "x": display(&p.x), "y": display(&p.y) },
            })
        })
        .collect();
    let triangles: Vec<Value> = t
        .iter()
        .map(|tri| json!({ "labels": triangle_json(tri), "color": tri.color().to_string() }))
        .collect();
    let hull: Vec<Vec<usize>> = cfg.hull_cycle().iter().map(|&i| label_json(cfg.label(i))).collect();
    json!({
        "id": id,
        "n": t.n(),
        "k": t.k(),
        "points": points,
        "triangles": triangles,
        "hull": hull,
        "canonical_key": t.canonical_key(),
        "history_len": s.history.len(),
        "can_age_up": t.k() == 1 && t.n() >= 3,
        "can_age_down": t.k() == 2,
    })
}

#[derive(Deserialize, Debug, Default, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Init {
    #[default]
    Coherent,
    File,
}

#[derive(Deserialize, Debug)]
struct CreateRequest {
    points: Vec<[String; 2]>,
    k: usize,
    #[serde(default)]
    init: Init,
    /// Lifting heights for coherent init; squared norms when absent.
    heights: Option<Vec<String>>,
    /// Triangles for file init.
    triangles: Option<Vec<TriangleJson>>,
}

fn parse_json<T: serde::de::DeserializeOwned>(body: &[u8]) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))
}

async fn create_session(State(app): State<AppState>, body: Bytes) -> ApiResult<(StatusCode, Json<Value>)> {
    let req: CreateRequest = parse_json(&body)?;
    let base = PointsFile { points: req.points }.to_config()?;
    k_fold_sums(&base, req.k)?.require_strongly_generic()?;
    let current = match req.init {
        Init::Coherent => {
            let h = match req.heights {
                Some(h) => HeightsFile { heights: h }.to_heights()?,
                None => HeightFunction::squared_norms(&base),
            };
            match coherent_subdivision(&base, req.k, &h)? {
                hyperflip::CoherentOutcome::Triangulated(t) => t,
                hyperflip::CoherentOutcome::NonTriangular(r) => {
                    return Err(ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, r.to_string()))
                }
            }
        }
        Init::File => {
            let triangles = req.triangles.ok_or_else(|| {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "file init needs \"triangles\"")
            })?;
            let file = TriFile { n: base.n(), k: req.k, triangles, gkz: None };
            Hypertriangulation::new(k_fold_sums(&base, req.k)?, &file.triples()?)?
        }
    };
    let id = app.insert(Session { base, current, history: Vec::new() });
    let s = app.get(&id)?;
    let s = s.lock().await;
    Ok((StatusCode::CREATED, Json(json!({ "id": id, "state": state_json(&id, &s) }))))
}

async fn get_session(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let s = app.get(&id)?;
    let s = s.lock().await;
    Ok(Json(state_json(&id, &s)))
}

fn flips_json(flips: &[Flip]) -> Vec<Value> {
    flips
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let support: Vec<Vec<usize>> = f.support_labels().into_iter().map(label_json).collect();
            let fj = FlipJson::from_flip(f);
            json!({
                "index": i,
                "type": fj.kind,
                "direction": fj.direction,
                "before": fj.before,
                "after": fj.after,
                "support": support,
            })
        })
        .collect()
}

async fn list_flips(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let s = app.get(&id)?;
    let s = s.lock().await;
    let flips = enumerate_flips(&s.current)?;
    Ok(Json(json!({ "flips": flips_json(&flips) })))
}

/// Optional guard on an apply request: the flip the client saw at that index.
#[derive(Deserialize, Debug)]
struct ExpectedFlip {
    before: Vec<TriangleJson>,
    after: Vec<TriangleJson>,
}

async fn apply(
    State(app): State<AppState>,
    Path((id, index)): Path<(String, usize)>,
    body: Bytes,
) -> ApiResult<Json<Value>> {
    let s = app.get(&id)?;
    let mut s = s.lock().await;
    let flips = enumerate_flips(&s.current)?;
    let f = flips
        .get(index)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no flip {index} ({} available)", flips.len())))?
        .clone();
    if !body.iter().all(u8::is_ascii_whitespace) {
        let expected: ExpectedFlip = parse_json(&body)?;
        let fj = FlipJson::from_flip(&f);
        if expected.before != fj.before || expected.after != fj.after {
            return Err(ApiError::new(StatusCode::CONFLICT, format!("flip {index} is no longer applicable")));
        }
    }
    let next = apply_flip(&s.current, &f).map_err(|e| ApiError::new(StatusCode::CONFLICT, e.to_string()))?;
    let prev = std::mem::replace(&mut s.current, next);
    s.history.push((prev, Step::Flip(f)));
    Ok(Json(state_json(&id, &s)))
}

#[derive(Deserialize, Debug)]
struct AgeRequest {
    direction: String,
}

async fn age(State(app): State<AppState>, Path(id): Path<String>, body: Bytes) -> ApiResult<Json<Value>> {
    let req: AgeRequest = parse_json(&body)?;
    let s = app.get(&id)?;
    let mut s = s.lock().await;
    let k = s.current.k();
    let next = match (req.direction.as_str(), k) {
        ("up", 1) => build_level2(&s.current)?,
        ("down", 2) => collapse_level2(&s.current)?,
        ("up", _) => return Err(ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "aging up needs level 1")),
        ("down", _) => return Err(ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "aging down needs level 2")),
        (other, _) => {
            return Err(ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, format!("direction {other:?} is not up or down")))
        }
    };
    debug_assert_eq!(next.config().base(), &s.base);
    let prev = std::mem::replace(&mut s.current, next);
    s.history.push((prev, Step::Age));
    Ok(Json(state_json(&id, &s)))
}

async fn undo(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let s = app.get(&id)?;
    let mut s = s.lock().await;
    let (prev, step) = s.history.pop().ok_or_else(|| ApiError::new(StatusCode::CONFLICT, "nothing to undo"))?;
    if let Step::Flip(f) = &step {
        debug_assert_eq!(apply_flip(&prev, f).ok().as_ref(), Some(&s.current));
    }
    s.current = prev;
    Ok(Json(state_json(&id, &s)))
}

async fn get_gkz(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let s = app.get(&id)?;
    let s = s.lock().await;
    let v = gkz(&s.current)?;
    let coords: Vec<Value> =
        v.coords.iter().map(|c| json!({ "value": format_rational(c), "display": display(c) })).collect();
    Ok(Json(json!({ "coords": coords, "sum": format_rational(&v.sum()) })))
}
