#![allow(dead_code)]

use std::time::Duration;

use axum::routing::post;
use axum::{Json, Router};
use mindgames_core::fixtures::worked_example;
use mindgames_core::llm::ModelEndpoint;
use mindgames_core::model::{Cell, Instance};
use mindgames_core::protocol::natural::render_action;
use mindgames_core::target::{ActionMessage, Disclosure};
use serde_json::{json, Value};

/// A chat endpoint that answers classifier prompts with "nothing found"
/// after `delay`.
pub async fn fake_classifier_endpoint(delay: Duration) -> ModelEndpoint {
    let app = Router::new().route(
        "/v1/chat/completions",
        post(move |Json(body): Json<Value>| async move {
            tokio::time::sleep(delay).await;
            let prompt = body["messages"][0]["content"].as_str().unwrap_or_default();
            let content = if prompt.contains("appealing") { "{}" } else { "[]" };
            Json(json!({ "choices": [{ "message": { "role": "assistant", "content": content } }] }))
        }),
    );
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    ModelEndpoint {
        base_url: format!("http://{addr}/v1"),
        model: "fake".into(),
        temperature: Some(0.0),
        api_key_env: "MINDGAMES_TEST_UNSET_KEY".into(),
    }
}

pub fn disclose_text(inst: &Instance, cells: &[Cell]) -> String {
    let ds = cells.iter().map(|&c| Disclosure::truthful(inst, c)).collect();
    render_action(inst.scenario(), &ActionMessage::disclose(ds))
}

pub fn false_disclosure_text(inst: &Instance, cell: Cell) -> String {
    let d = Disclosure { cell, claimed_effect: inst.matrix.get(cell).negate() };
    render_action(inst.scenario(), &ActionMessage::disclose(vec![d]))
}

pub fn example() -> Instance {
    worked_example()
}
