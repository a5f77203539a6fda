use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use ecs_cli::service::{router, AppState};
use ecs_core::SolverOptions;
use http_body_util::BodyExt;
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use serde_json::{json, Value};
use tower::ServiceExt;

fn app() -> Router {
    router(AppState::new(SolverOptions { budget: 200_000, ..Default::default() }), None)
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map_or(Body::empty(), |b| Body::from(b.to_string()))).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn create(app: &Router, graph: &str, variant: &str, k: usize, human: &str) -> Value {
    let (code, view) =
        call(app, "POST", "/session", Some(json!({"graph": graph, "variant": variant, "k": k, "human_role": human}))).await;
    assert_eq!(code, StatusCode::OK, "{view}");
    view
}

fn colored(view: &Value) -> usize {
    view["colors"].as_array().unwrap().iter().filter(|c| c.as_u64() != Some(0)).count()
}

#[tokio::test]
async fn health() {
    assert_eq!(call(&app(), "GET", "/health", None).await, (StatusCode::OK, json!({"ok": true})));
}

#[tokio::test]
async fn engine_alice_opens() {
    let app = app();
    let view = create(&app, "path:3", "a", 3, "Bob").await;
    assert_eq!(colored(&view), 1);
    assert_eq!(view["mover"], "Bob");
    assert_eq!(view["round"], 1);
    assert_eq!(view["analysis"]["state_status"], "alice_safe");
    assert!(!view["legal_moves"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn fresh_session_and_lost_position_analysis() {
    let app = app();
    let view = create(&app, "star:4", "a", 4, "Alice").await;
    assert_eq!(colored(&view), 0);
    assert_eq!(view["round"], 1);
    assert_eq!(view["analysis"]["state_status"], "bob_attracted");
    assert!(view["analysis"]["rank"].as_u64().unwrap() > 0);
}

#[tokio::test]
async fn request_errors() {
    let app = app();
    let bad = json!({"graph": "bogus:3", "variant": "a", "k": 3, "human_role": "Bob"});
    assert_eq!(call(&app, "POST", "/session", Some(bad)).await.0, StatusCode::BAD_REQUEST);
    assert_eq!(call(&app, "POST", "/session", Some(json!({"graph": "path:3"}))).await.0, StatusCode::BAD_REQUEST);
    let big = json!({"graph": "grid:3,4", "variant": "a", "k": 5, "human_role": "Bob"});
    assert_eq!(call(&app, "POST", "/session", Some(big)).await.0, StatusCode::PAYLOAD_TOO_LARGE);
    let huge = json!({"graph": "x".repeat(100_000), "k": 3, "human_role": "Bob"});
    assert_eq!(call(&app, "POST", "/session", Some(huge)).await.0, StatusCode::PAYLOAD_TOO_LARGE);
    assert_eq!(call(&app, "GET", "/session/nope", None).await.0, StatusCode::NOT_FOUND);
    assert_eq!(call(&app, "POST", "/session/nope/reset", None).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn illegal_moves_get_422_with_legal_colors() {
    let app = app();
    let view = create(&app, "path:3", "a", 3, "Bob").await;
    let id = view["id"].as_str().unwrap();
    let colors: Vec<u64> = view["colors"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).collect();
    let v = colors.iter().position(|&c| c != 0).unwrap();
    let uri = format!("/session/{id}/move");
    // the colored vertex is already moved this round
    let (code, body) = call(&app, "POST", &uri, Some(json!({"vertex": v, "color": 1}))).await;
    assert_eq!(code, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(body["error"].is_string());
    // a neighbor's color on an uncolored neighbor
    let nb = if v == 1 { 0 } else { 1 };
    let (code, body) = call(&app, "POST", &uri, Some(json!({"vertex": nb, "color": colors[v]}))).await;
    assert_eq!(code, StatusCode::UNPROCESSABLE_ENTITY);
    let legal: Vec<u64> = body["legal_colors"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).collect();
    assert!(!legal.is_empty() && !legal.contains(&colors[v]));
}

#[tokio::test]
async fn same_color_recolor_is_rejected() {
    let app = app();
    let view = create(&app, "complete:2", "a", 3, "Alice").await;
    let id = view["id"].as_str().unwrap();
    let uri = format!("/session/{id}/move");
    let (_, view) = call(&app, "POST", &uri, Some(json!({"vertex": 0, "color": 1}))).await;
    // engine colored vertex 1; round 2 starts with Alice
    assert_eq!(view["round"], 2);
    assert_eq!(view["moved"], json!([]));
    let (code, body) = call(&app, "POST", &uri, Some(json!({"vertex": 0, "color": 1}))).await;
    assert_eq!(code, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(!body["legal_colors"].as_array().unwrap().contains(&json!(1)));
}

#[tokio::test]
async fn not_your_turn_and_game_over_are_409() {
    let app = app();
    // Bob wins P4 with three colors; engine-Bob ends the game eventually
    let view = create(&app, "path:4", "a", 3, "Alice").await;
    let id = view["id"].as_str().unwrap().to_string();
    let mut view = view;
    let mut rng = StdRng::seed_from_u64(3);
    while view["status"]["kind"] == "ongoing" {
        let moves = view["legal_moves"].as_array().unwrap();
        let m = moves.choose(&mut rng).unwrap();
        let color = m["colors"].as_array().unwrap().choose(&mut rng).unwrap();
        let (code, next) =
            call(&app, "POST", &format!("/session/{id}/move"), Some(json!({"vertex": m["vertex"], "color": color}))).await;
        assert_eq!(code, StatusCode::OK, "{next}");
        view = next;
    }
    assert_eq!(view["status"]["kind"], "bob_won");
    assert!(view["legal_moves"].as_array().unwrap().is_empty());
    let (code, _) = call(&app, "POST", &format!("/session/{id}/move"), Some(json!({"vertex": 0, "color": 1}))).await;
    assert_eq!(code, StatusCode::CONFLICT);
    // reset after the loss makes the game playable again, and is idempotent
    let (code, a) = call(&app, "POST", &format!("/session/{id}/reset"), None).await;
    assert_eq!(code, StatusCode::OK);
    let (_, b) = call(&app, "POST", &format!("/session/{id}/reset"), None).await;
    assert_eq!((a["round"].clone(), a["colors"].clone()), (json!(1), json!([0, 0, 0, 0])));
    assert_eq!(a["colors"], b["colors"]);
    assert_eq!(a["history"], json!([]));
    assert_eq!(a["status"]["kind"], "ongoing");

    // B-game: engine-Bob opens, so the human Alice is to move
    let view = create(&app, "path:3", "b", 3, "Alice").await;
    assert_eq!(view["mover"], "Alice");
}

/// Random human play never beats the engine from a position it wins.
#[tokio::test]
async fn engine_survives_scripted_adversaries() {
    let app = app();
    for (graph, variant, k) in [("path:3", "a", 3), ("cycle:5", "strong", 3), ("complete:2", "a", 3)] {
        for seed in 0..5 {
            let mut view = create(&app, graph, variant, k, "Bob").await;
            let id = view["id"].as_str().unwrap().to_string();
            let mut rng = StdRng::seed_from_u64(seed);
            let n = view["n"].as_u64().unwrap();
            let mut last_round = 1;
            while view["round"].as_u64().unwrap() <= 3 * n {
                assert_eq!(view["status"]["kind"], "ongoing", "{graph} {variant}: {view}");
                assert_eq!(view["analysis"]["state_status"], "alice_safe");
                let moves = view["legal_moves"].as_array().unwrap();
                let m = moves.choose(&mut rng).unwrap();
                let color = m["colors"].as_array().unwrap().choose(&mut rng).unwrap();
                let (code, next) =
                    call(&app, "POST", &format!("/session/{id}/move"), Some(json!({"vertex": m["vertex"], "color": color}))).await;
                assert_eq!(code, StatusCode::OK, "{next}");
                let round = next["round"].as_u64().unwrap();
                assert!(round == last_round || round == last_round + 1);
                last_round = round;
                view = next;
            }
        }
    }
}

#[tokio::test]
async fn cors_allows_localhost_only() {
    let app = app();
    let req = |origin: &str| {
        Request::builder().method("GET").uri("/health").header("origin", origin).body(Body::empty()).unwrap()
    };
    let ok = app.clone().oneshot(req("http://localhost:5173")).await.unwrap();
    assert_eq!(ok.headers()["access-control-allow-origin"], "http://localhost:5173");
    let other = app.clone().oneshot(req("http://example.com")).await.unwrap();
    assert!(other.headers().get("access-control-allow-origin").is_none());
}

#[tokio::test]
async fn static_ui_is_served() {
    let dir = std::env::temp_dir().join(format!("ecs-ui-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("index.html"), "<html>board</html>").unwrap();
    let app = router(AppState::new(SolverOptions::default()), Some(dir.clone()));
    let resp = app.oneshot(Request::builder().uri("/").body(Body::empty()).unwrap()).await.unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    let body = resp.into_body().collect().await.unwrap().to_bytes();
    assert_eq!(&body[..], b"<html>board</html>");
    std::fs::remove_dir_all(dir).unwrap();
}
