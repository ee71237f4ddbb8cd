//! HTTP routes and the websocket stream.

use std::sync::Arc;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::broadcast::error::RecvError;
use uuid::Uuid;

use crate::config::SessionConfig;
use crate::store::{ExportFilter, MessagePayload, ServiceError, SessionEvent, SessionState, SessionStore};

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::UnknownSession(_) => "unknown_session",
            ServiceError::BadConfig(_) => "bad_config",
            ServiceError::SessionFinished => "session_finished",
            ServiceError::Busy => "busy",
            ServiceError::ValidationRejected(_) => "validation_rejected",
            ServiceError::NotSupported(_) => "not_supported",
            ServiceError::Game(_) => "game_error",
            ServiceError::Storage(_) => "storage_error",
        }
    }

    fn status(&self) -> StatusCode {
        match self {
            ServiceError::UnknownSession(_) => StatusCode::NOT_FOUND,
            ServiceError::BadConfig(_) | ServiceError::NotSupported(_) => StatusCode::BAD_REQUEST,
            ServiceError::SessionFinished | ServiceError::Busy => StatusCode::CONFLICT,
            ServiceError::ValidationRejected(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::Game(_) => StatusCode::BAD_GATEWAY,
            ServiceError::Storage(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    pub fn body(&self) -> serde_json::Value {
        let mut body = json!({ "error": self.code(), "message": self.to_string() });
        if let ServiceError::ValidationRejected(r) = self {
            body["rejection"] = json!(r);
        }
        body
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        (self.status(), Json(self.body())).into_response()
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Created {
    pub id: Uuid,
    pub state: SessionState,
}

/// Commands a stream client may send.
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum StreamCommand {
    Message(MessagePayload),
    Step,
}

type Shared = State<Arc<SessionStore>>;

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/health", get(|| async { "ok" }))
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(state))
        .route("/sessions/{id}/messages", post(message))
        .route("/sessions/{id}/step", post(step))
        .route("/sessions/{id}/stream", get(stream))
        .route("/export", get(export))
        .with_state(store)
}

pub async fn serve(listener: tokio::net::TcpListener, store: Arc<SessionStore>) -> std::io::Result<()> {
    axum::serve(listener, router(store)).await
}

async fn create(State(store): Shared, Json(config): Json<SessionConfig>) -> Result<impl IntoResponse, ServiceError> {
    let id = store.create_session(config)?;
    let state = store.get_session_state(id).await?;
    Ok((StatusCode::CREATED, Json(Created { id, state })))
}

async fn state(State(store): Shared, Path(id): Path<Uuid>) -> Result<Json<SessionState>, ServiceError> {
    Ok(Json(store.get_session_state(id).await?))
}

async fn message(
    State(store): Shared,
    Path(id): Path<Uuid>,
    Json(payload): Json<MessagePayload>,
) -> Result<impl IntoResponse, ServiceError> {
    Ok(Json(store.post_message(id, payload).await?))
}

async fn step(State(store): Shared, Path(id): Path<Uuid>) -> Result<impl IntoResponse, ServiceError> {
    Ok(Json(store.step(id).await?))
}

async fn export(State(store): Shared, Query(filter): Query<ExportFilter>) -> Result<impl IntoResponse, ServiceError> {
    let body = store.export_ndjson(&filter)?;
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], body))
}

async fn stream(ws: WebSocketUpgrade, State(store): Shared, Path(id): Path<Uuid>) -> Result<Response, ServiceError> {
    let session = store.session(id)?;
    Ok(ws.on_upgrade(move |socket| run_stream(socket, store, session)))
}

async fn send_json<T: Serialize>(socket: &mut WebSocket, value: &T) -> bool {
    let text = serde_json::to_string(value).expect("event serializes");
    socket.send(Message::Text(text.into())).await.is_ok()
}

async fn run_stream(mut socket: WebSocket, store: Arc<SessionStore>, session: Arc<crate::store::Session>) {
    let mut events = session.subscribe();
    let snapshot = SessionEvent::Snapshot { state: session.state().await };
    if !send_json(&mut socket, &snapshot).await {
        return;
    }
    loop {
        tokio::select! {
            ev = events.recv() => match ev {
                Ok(ev) => if !send_json(&mut socket, &ev).await { return },
                Err(RecvError::Lagged(_)) => {
                    let snapshot = SessionEvent::Snapshot { state: session.state().await };
                    if !send_json(&mut socket, &snapshot).await { return }
                }
                Err(RecvError::Closed) => return,
            },
            msg = socket.recv() => {
                let text = match msg {
                    Some(Ok(Message::Text(t))) => t,
                    Some(Ok(Message::Close(_))) | None | Some(Err(_)) => return,
                    Some(Ok(_)) => continue,
                };
                let result = match serde_json::from_str::<StreamCommand>(&text) {
                    Ok(StreamCommand::Message(p)) => store.post_message(session.id(), p).await.map(|_| ()),
                    Ok(StreamCommand::Step) => store.step(session.id()).await.map(|_| ()),
                    Err(e) => {
                        let err = json!({ "type": "error", "error": "bad_command", "message": e.to_string() });
                        if !send_json(&mut socket, &err).await { return }
                        continue;
                    }
                };
                // Events from this command are already queued; flush them so
                // they arrive before any error.
                while let Ok(ev) = events.try_recv() {
                    if !send_json(&mut socket, &ev).await { return }
                }
                if let Err(e) = result {
                    let mut body = e.body();
                    body["type"] = json!("error");
                    if !send_json(&mut socket, &body).await { return }
                }
            }
        }
    }
}
