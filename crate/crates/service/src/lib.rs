//! Game sessions over HTTP with a live websocket stream, and NDJSON
//! transcript storage.

pub mod client;
pub mod config;
pub mod http;
pub mod store;

pub use client::{build_classifier, HttpCompletionClient};
pub use config::{InstanceSelector, RandomSettings, SessionConfig};
pub use http::{router, serve};
pub use store::{
    ExportFilter, MessagePayload, PostReply, ServiceError, Session, SessionEvent, SessionState, SessionStore,
};
