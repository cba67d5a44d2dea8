//! HTTP API over game sessions, the compiler and the verifier.
//!
//! ```text
//! POST /games               {size | board_text, k, engine_side, sidecar?} -> {id, state}
//! GET  /games/{id}          -> state with legal targets and their safe colors
//! POST /games/{id}/moves    {node, color} -> {state, engine_move?}
//! POST /reduce              {qdimacs, k} -> {board_text, sidecar}
//! POST /verify              {qdimacs, k, max_decisions?} -> verifier report
//! GET  /healthz             -> ok
//! ```

pub mod session;

use std::sync::Arc;

use atropos_core::{
    compile, engine_move, make_board, parse_qdimacs, verify_with, Board, GameState, MoveViolation, ReductionOutput,
    RulesConfig, Sidecar, SolveLimits, VerifyOptions,
};
use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

pub use session::{EngineSide, MoveView, NodeRef, Session, Snapshot, StateView, Store};

/// Default node budget for engine replies.
pub const ENGINE_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone)]
pub struct Config {
    pub engine_budget: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config { engine_budget: ENGINE_BUDGET }
    }
}

pub struct App {
    pub store: Store,
    pub config: Config,
}

impl App {
    pub fn new(store: Store, config: Config) -> Arc<App> {
        Arc::new(App { store, config })
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> ApiError {
        ApiError { status: StatusCode::BAD_REQUEST, code: "malformed", message: message.into() }
    }

    fn not_found(id: &str) -> ApiError {
        ApiError { status: StatusCode::NOT_FOUND, code: "unknown-session", message: format!("no game {id}") }
    }

    fn internal(message: impl Into<String>) -> ApiError {
        ApiError { status: StatusCode::INTERNAL_SERVER_ERROR, code: "internal", message: message.into() }
    }
}

impl From<atropos_core::Error> for ApiError {
    fn from(e: atropos_core::Error) -> ApiError {
        use atropos_core::Error as E;
        match e {
            E::InvalidMove(v @ (MoveViolation::NotInWindow | MoveViolation::Recolor | MoveViolation::Finished)) => {
                ApiError { status: StatusCode::CONFLICT, code: v.as_str(), message: e.to_string() }
            }
            E::InvalidMove(v) => ApiError { status: StatusCode::BAD_REQUEST, code: v.as_str(), message: e.to_string() },
            E::Routing(_) | E::PlacementConflict(_) => ApiError::internal(e.to_string()),
            _ => ApiError::bad_request(e.to_string()),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> ApiError {
        ApiError::bad_request(e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.code, "message": self.message }))).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

pub fn router(app: Arc<App>) -> Router {
    Router::new()
        .route("/healthz", get(|| async { "ok" }))
        .route("/games", post(new_game))
        .route("/games/{id}", get(get_game))
        .route("/games/{id}/moves", post(post_move))
        .route("/reduce", post(reduce))
        .route("/verify", post(verify))
        .with_state(app)
}

/// `k` on the wire: a number or `"inf"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum KParam {
    Finite(u32),
    Named(String),
}

impl KParam {
    fn config(&self) -> Result<RulesConfig, ApiError> {
        Ok(match self {
            KParam::Finite(k) => RulesConfig::new(*k)?,
            KParam::Named(s) => RulesConfig::parse(s)?,
        })
    }
}

#[derive(Debug, Deserialize)]
pub struct NewGame {
    pub size: Option<u32>,
    pub board_text: Option<String>,
    pub k: Option<KParam>,
    #[serde(default = "no_engine")]
    pub engine_side: EngineSide,
    /// Sidecar of a compiled board; restores its forced opening and k.
    pub sidecar: Option<Sidecar>,
}

fn no_engine() -> EngineSide {
    EngineSide::None
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GameCreated {
    pub id: String,
    pub state: StateView,
    pub engine_move: Option<MoveView>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MoveReply {
    pub state: StateView,
    pub engine_move: Option<MoveView>,
}

#[derive(Debug, Deserialize)]
pub struct FormulaRequest {
    pub qdimacs: String,
    #[serde(default = "two")]
    pub k: u32,
    pub max_decisions: Option<usize>,
}

fn two() -> u32 {
    2
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Reduced {
    pub board_text: String,
    pub sidecar: Sidecar,
}

/// Plays the engine's move if it is the engine's turn.
async fn engine_turn(app: &App, s: &mut Session) -> Result<Option<MoveView>, ApiError> {
    if s.state.is_over() || !s.engine.plays(s.state.to_move) {
        return Ok(None);
    }
    let limits = SolveLimits::new(app.config.engine_budget, 1 << 20)?;
    let state = s.state.clone();
    let (m, _) = tokio::task::spawn_blocking(move || engine_move(&state, limits))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))??;
    s.play(m)?;
    Ok(Some(MoveView::of(&s.state.board, m)))
}

async fn new_game(State(app): State<Arc<App>>, body: Result<Json<NewGame>, JsonRejection>) -> ApiResult<GameCreated> {
    let Json(req) = body?;
    let board = match (&req.board_text, req.size) {
        (Some(text), None) => Board::parse(text)?,
        (None, Some(size)) => make_board(size)?,
        _ => return Err(ApiError::bad_request("give exactly one of size and board_text")),
    };
    let mut state = match req.sidecar {
        Some(sc) => ReductionOutput::from_parts(board, sc)?.state,
        None => GameState::new(board, RulesConfig::new(2)?)?,
    };
    if let Some(k) = &req.k {
        state.config = k.config()?;
    }
    let id = uuid::Uuid::new_v4().simple().to_string();
    let session = app.store.insert(Session::new(id.clone(), state, req.engine_side));
    let mut s = session.lock().await;
    let engine_move = engine_turn(&app, &mut s).await?;
    Ok(Json(GameCreated { id, state: s.view(), engine_move }))
}

async fn get_game(State(app): State<Arc<App>>, Path(id): Path<String>) -> ApiResult<StateView> {
    let session = app.store.get(&id).ok_or_else(|| ApiError::not_found(&id))?;
    let s = session.lock().await;
    Ok(Json(s.view()))
}

async fn post_move(
    State(app): State<Arc<App>>,
    Path(id): Path<String>,
    body: Result<Json<MoveView>, JsonRejection>,
) -> ApiResult<MoveReply> {
    let session = app.store.get(&id).ok_or_else(|| ApiError::not_found(&id))?;
    let Json(mv) = body?;
    let mut s = session.lock().await;
    let m = mv.resolve(&s.state.board);
    s.play(m)?;
    let engine_move = engine_turn(&app, &mut s).await?;
    Ok(Json(MoveReply { state: s.view(), engine_move }))
}

async fn reduce(body: Result<Json<FormulaRequest>, JsonRejection>) -> ApiResult<Reduced> {
    let Json(req) = body?;
    let f = parse_qdimacs(&req.qdimacs)?;
    let out = tokio::task::spawn_blocking(move || compile(&f, req.k))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))??;
    Ok(Json(Reduced { board_text: out.board_text(), sidecar: out.sidecar() }))
}

async fn verify(body: Result<Json<FormulaRequest>, JsonRejection>) -> ApiResult<serde_json::Value> {
    let Json(req) = body?;
    let f = parse_qdimacs(&req.qdimacs)?;
    let opts = VerifyOptions { max_decisions: req.max_decisions };
    let rep = tokio::task::spawn_blocking(move || verify_with(&f, req.k, &opts))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))??;
    let mut v = serde_json::to_value(&rep).map_err(|e| ApiError::internal(e.to_string()))?;
    v["passed"] = json!(rep.passed());
    Ok(Json(v))
}
