//! Blocking chat-completion client for OpenAI-compatible endpoints.

use std::time::Duration;

use mindgames_core::llm::{ChatMessage, CompletionClient, CompletionError, ModelEndpoint};
use mindgames_core::protocol::{Classifier, ClassifierBinding, ModelClassifier, TemplateClassifier};
use serde_json::{json, Value};
use std::sync::Arc;

pub struct HttpCompletionClient {
    endpoint: ModelEndpoint,
    agent: ureq::Agent,
}

impl HttpCompletionClient {
    pub fn new(endpoint: ModelEndpoint) -> Self {
        let agent = ureq::AgentBuilder::new().timeout(Duration::from_secs(300)).build();
        HttpCompletionClient { endpoint, agent }
    }

    pub fn endpoint(&self) -> &ModelEndpoint {
        &self.endpoint
    }

    fn url(&self) -> String {
        format!("{}/chat/completions", self.endpoint.base_url.trim_end_matches('/'))
    }
}

impl CompletionClient for HttpCompletionClient {
    fn complete(&self, messages: &[ChatMessage]) -> Result<String, CompletionError> {
        let mut body = json!({ "model": self.endpoint.model, "messages": messages });
        if let Some(t) = self.endpoint.temperature {
            body["temperature"] = json!(t);
        }
        let mut req = self.agent.post(&self.url());
        if let Ok(key) = std::env::var(&self.endpoint.api_key_env) {
            req = req.set("Authorization", &format!("Bearer {key}"));
        }
        let resp: Value = req
            .send_json(body)
            .map_err(|e| CompletionError::Unavailable(e.to_string()))?
            .into_json()
            .map_err(|e| CompletionError::Unavailable(format!("bad response body: {e}")))?;
        match resp["choices"][0]["message"]["content"].as_str() {
            Some(text) if !text.trim().is_empty() => Ok(text.to_string()),
            _ => Err(CompletionError::Empty),
        }
    }
}

pub fn build_classifier(binding: &ClassifierBinding) -> Arc<dyn Classifier> {
    match binding {
        ClassifierBinding::Template => Arc::new(TemplateClassifier),
        ClassifierBinding::ExternalModel { endpoint } => {
            Arc::new(ModelClassifier::new(HttpCompletionClient::new(endpoint.clone())))
        }
    }
}
