//! HTTP play service: a human plays one side against the solved engine.
//!
//! Each session holds its own mutex, so requests on one session are
//! serialized while different sessions proceed in parallel. Solved tables
//! are shared between sessions of the same instance.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::extract::{DefaultBodyLimit, Path, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use ecs_core::rules::mask_to_colors;
use ecs_core::{parse_graph_spec, Error, Game, GameState, Move, Player, SolverOptions, Solved, StateStatus, TerminalStatus};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::cors::{AllowOrigin, CorsLayer};
use tower_http::services::ServeDir;

/// Instances bigger than this are refused with 413.
pub const SERVICE_BUDGET: usize = 5_000_000;
const BODY_LIMIT: usize = 16 * 1024;

type Instance = (String, String, usize);

pub struct AppState {
    opts: SolverOptions,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    solved: Mutex<HashMap<Instance, Arc<Solved>>>,
}

impl AppState {
    pub fn new(opts: SolverOptions) -> Arc<Self> {
        Arc::new(AppState { opts, sessions: Mutex::default(), solved: Mutex::default() })
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
struct HistoryEntry {
    round: usize,
    mover: Player,
    vertex: usize,
    from: u8,
    to: u8,
}

pub struct Session {
    id: String,
    solved: Arc<Solved>,
    human: Player,
    current: GameState,
    round: usize,
    history: Vec<HistoryEntry>,
}

impl Session {
    fn game(&self) -> &Game {
        self.solved.game()
    }

    fn play(&mut self, m: Move) -> Result<(), Error> {
        let next = self.game().apply_move(&self.current, m)?;
        self.game().check_invariants(&next).map_err(Error::IllegalMove)?;
        self.history.push(HistoryEntry {
            round: self.round,
            mover: self.current.mover,
            vertex: m.vertex,
            from: self.current.colors[m.vertex],
            to: m.color,
        });
        if next.moved == 0 {
            self.round += 1;
        }
        self.current = next;
        Ok(())
    }

    /// Engine moves until the human is to move or the game is over.
    fn engine_reply(&mut self) -> Result<(), Error> {
        while self.current.mover != self.human && !self.game().terminal_status(&self.current).is_terminal() {
            let m = self.solved.best_move(&self.current)?;
            self.play(m)?;
        }
        Ok(())
    }

    fn reset(&mut self) -> Result<(), Error> {
        self.current = self.game().initial_state();
        self.round = 1;
        self.history.clear();
        self.engine_reply()
    }

    fn view(&self) -> Value {
        let game = self.game();
        let s = &self.current;
        let terminal = game.terminal_status(s);
        let status = match terminal {
            TerminalStatus::Ongoing => json!({"kind": "ongoing", "rounds_completed": self.round - 1}),
            TerminalStatus::BobWins(reason) => json!({
                "kind": "bob_won",
                "reason": reason,
                "stuck_vertices": ecs_core::rules::mask_to_vertices(game.stuck_vertices(s)),
            }),
            TerminalStatus::AliceWinsRound => json!({"kind": "alice_won", "rounds_completed": self.round - 1}),
        };
        let human_turn = s.mover == self.human && !terminal.is_terminal();
        let legal: Vec<Value> = if human_turn {
            ecs_core::rules::mask_to_vertices(game.available_vertices(s))
                .into_iter()
                .map(|v| json!({"vertex": v, "colors": mask_to_colors(game.legal_colors_unchecked(s, v, s.mover))}))
                .filter(|m| m["colors"].as_array().is_some_and(|c| !c.is_empty()))
                .collect()
        } else {
            Vec::new()
        };
        let analysis = match self.solved.status_of(s) {
            Ok(StateStatus::AliceSafe) => json!({"state_status": "alice_safe", "rank": null}),
            Ok(StateStatus::BobAttracted { rank }) => json!({"state_status": "bob_attracted", "rank": rank}),
            Err(_) => json!({"state_status": "unknown", "rank": null}),
        };
        let palette = if game.config().tracks_palette() { mask_to_colors(s.palette) } else { mask_to_colors(s.colors_present()) };
        json!({
            "id": self.id,
            "graph": game.graph().label(),
            "n": game.n(),
            "edges": game.graph().edges(),
            "variant": game.config().to_string(),
            "k": game.k(),
            "human_role": self.human,
            "colors": s.colors(),
            "moved": ecs_core::rules::mask_to_vertices(s.moved),
            "mover": s.mover,
            "round": self.round,
            "palette": palette,
            "legal_moves": legal,
            "status": status,
            "analysis": analysis,
            "history": self.history,
        })
    }
}

pub struct ApiError(StatusCode, Value);

impl ApiError {
    fn new(code: StatusCode, msg: impl Into<String>) -> Self {
        ApiError(code, json!({"error": msg.into()}))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

type ApiResult = Result<Json<Value>, ApiError>;

#[derive(Deserialize)]
struct CreateRequest {
    graph: String,
    #[serde(default = "default_variant")]
    variant: String,
    k: usize,
    human_role: Player,
}

fn default_variant() -> String {
    "a".into()
}

#[derive(Deserialize)]
struct MoveRequest {
    vertex: usize,
    color: u8,
}

fn parse_json<T: for<'de> Deserialize<'de>>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("malformed request: {e}")))
}

fn internal(e: impl std::fmt::Display) -> ApiError {
    ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())
}

async fn solve_instance(state: &AppState, req: &CreateRequest) -> Result<Arc<Solved>, ApiError> {
    let bad = |e: Error| ApiError::new(StatusCode::BAD_REQUEST, e.to_string());
    let graph = parse_graph_spec(&req.graph).map_err(bad)?;
    let cfg = req.variant.parse().map_err(bad)?;
    let game = Game::new(graph, req.k, cfg).map_err(bad)?;
    let key = (game.graph().label().to_string(), game.config().to_string(), req.k);
    if let Some(s) = state.solved.lock().unwrap().get(&key) {
        return Ok(s.clone());
    }
    let opts = state.opts;
    let solved = tokio::task::spawn_blocking(move || ecs_core::solve(&game, &opts)).await.map_err(internal)?;
    let solved = match solved {
        Ok(s) => Arc::new(s),
        Err(e @ (Error::BudgetExceeded { .. } | Error::KeyTooWide { .. })) => {
            return Err(ApiError::new(StatusCode::PAYLOAD_TOO_LARGE, format!("instance too large: {e}")))
        }
        Err(e) => return Err(bad(e)),
    };
    state.solved.lock().unwrap().insert(key, solved.clone());
    Ok(solved)
}

fn new_id() -> String {
    format!("{:016x}", rand::random::<u64>())
}

async fn create_session(State(state): State<Arc<AppState>>, body: axum::body::Bytes) -> ApiResult {
    let req: CreateRequest = parse_json(&body)?;
    let solved = solve_instance(&state, &req).await?;
    let initial = solved.game().initial_state();
    let id = new_id();
    let mut session =
        Session { id: id.clone(), solved, human: req.human_role, current: initial, round: 1, history: Vec::new() };
    session.engine_reply().map_err(internal)?;
    let view = session.view();
    state.sessions.lock().unwrap().insert(id, Arc::new(Mutex::new(session)));
    Ok(Json(view))
}

fn find(state: &AppState, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
    state
        .sessions
        .lock()
        .unwrap()
        .get(id)
        .cloned()
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no session {id}")))
}

async fn get_view(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let session = find(&state, &id)?;
    let view = session.lock().unwrap().view();
    Ok(Json(view))
}

async fn human_move(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: axum::body::Bytes) -> ApiResult {
    let req: MoveRequest = parse_json(&body)?;
    let session = find(&state, &id)?;
    let mut session = session.lock().unwrap();
    let game = session.game().clone();
    let s = session.current;
    if game.terminal_status(&s).is_terminal() {
        return Err(ApiError::new(StatusCode::CONFLICT, "the game is over"));
    }
    if s.mover != session.human {
        return Err(ApiError::new(StatusCode::CONFLICT, "not your turn"));
    }
    let m = Move { vertex: req.vertex, color: req.color };
    if let Err(e) = session.play(m) {
        let legal = game.legal_colors(&s, req.vertex, s.mover).map(mask_to_colors).unwrap_or_default();
        return Err(ApiError(
            StatusCode::UNPROCESSABLE_ENTITY,
            json!({"error": e.to_string(), "vertex": req.vertex, "legal_colors": legal}),
        ));
    }
    session.engine_reply().map_err(internal)?;
    Ok(Json(session.view()))
}

async fn reset(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let session = find(&state, &id)?;
    let mut session = session.lock().unwrap();
    session.reset().map_err(internal)?;
    Ok(Json(session.view()))
}

async fn health() -> Json<Value> {
    Json(json!({"ok": true}))
}

fn local_origin(origin: &HeaderValue) -> bool {
    let Ok(origin) = origin.to_str() else { return false };
    let host = origin.split_once("://").map_or(origin, |(_, rest)| rest);
    let host = host.rsplit_once(':').map_or(host, |(h, port)| if port.chars().all(|c| c.is_ascii_digit()) { h } else { host });
    matches!(host, "localhost" | "127.0.0.1" | "[::1]")
}

pub fn router(state: Arc<AppState>, ui_dir: Option<PathBuf>) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(AllowOrigin::predicate(|origin, _| local_origin(origin)))
        .allow_methods([axum::http::Method::GET, axum::http::Method::POST])
        .allow_headers([axum::http::header::CONTENT_TYPE]);
    let api = Router::new()
        .route("/health", get(health))
        .route("/session", post(create_session))
        .route("/session/{id}", get(get_view))
        .route("/session/{id}/move", post(human_move))
        .route("/session/{id}/reset", post(reset))
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .with_state(state);
    let app = match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    app.layer(cors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origins() {
        assert!(local_origin(&HeaderValue::from_static("http://localhost:5173")));
        assert!(local_origin(&HeaderValue::from_static("http://127.0.0.1")));
        assert!(!local_origin(&HeaderValue::from_static("http://example.com")));
        assert!(!local_origin(&HeaderValue::from_static("http://localhost.evil.com")));
    }
}
