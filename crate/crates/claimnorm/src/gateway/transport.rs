//! Wire-level transports. The HTTP transport speaks the OpenAI-style
//! chat-completions JSON shape both providers named by the task expose.

use std::time::Instant;

use serde::Deserialize;

use super::{BackendConfig, ChatRequest, ChatResponse, FinishReason, Role};

#[derive(Debug, thiserror::Error)]
pub enum TransportError {
    #[error("rate limited (status {status}): {body}")]
    RateLimited { status: u16, body: String },
    #[error("timed out: {0}")]
    Timeout(String),
    #[error("server error (status {status}): {body}")]
    ServerError { status: u16, body: String },
    #[error("http error (status {status}): {body}")]
    Http { status: u16, body: String },
    #[error("network error: {0}")]
    Network(String),
}

impl TransportError {
    /// Whether a retry could plausibly succeed.
    pub fn is_transient(&self) -> bool {
        matches!(
            self,
            TransportError::RateLimited { .. }
                | TransportError::Timeout(_)
                | TransportError::ServerError { .. }
                | TransportError::Network(_)
        )
    }
}

pub trait ChatTransport: Send + Sync {
    fn execute(
        &self,
        config: &BackendConfig,
        request: &ChatRequest,
        auth: Option<&str>,
    ) -> Result<ChatResponse, TransportError>;

    /// True when the transport needs the backend's API key.
    fn requires_auth(&self) -> bool {
        false
    }
}

/// POSTs OpenAI-style chat-completion JSON with bearer auth.
pub struct HttpTransport;

#[derive(Deserialize)]
struct CompletionBody {
    choices: Vec<CompletionChoice>,
}

#[derive(Deserialize)]
struct CompletionChoice {
    message: CompletionMessage,
    finish_reason: Option<String>,
}

#[derive(Deserialize)]
struct CompletionMessage {
    content: Option<String>,
}

fn excerpt(body: &str) -> String {
    body.chars().take(200).collect()
}

impl ChatTransport for HttpTransport {
    fn execute(
        &self,
        config: &BackendConfig,
        request: &ChatRequest,
        auth: Option<&str>,
    ) -> Result<ChatResponse, TransportError> {
        let messages: Vec<serde_json::Value> = request
            .messages
            .iter()
            .map(|m| {
                serde_json::json!({
                    "role": match m.role {
                        Role::System => "system",
                        Role::User => "user",
                        Role::Assistant => "assistant",
                    },
                    "content": m.content,
                })
            })
            .collect();
        let body = serde_json::json!({
            "model": request.model_id,
            "messages": messages,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        });

        let agent = ureq::AgentBuilder::new().timeout(config.timeout()).build();
        let mut call = agent
            .post(&config.endpoint_url)
            .set("Content-Type", "application/json");
        if let Some(token) = auth {
            call = call.set("Authorization", &format!("Bearer {token}"));
        }

        let started = Instant::now();
        let response = match call.send_json(&body) {
            Ok(response) => response,
            Err(ureq::Error::Status(status, response)) => {
                let body = excerpt(&response.into_string().unwrap_or_default());
                return Err(match status {
                    429 => TransportError::RateLimited { status, body },
                    500..=599 => TransportError::ServerError { status, body },
                    _ => TransportError::Http { status, body },
                });
            }
            Err(ureq::Error::Transport(transport)) => {
                let message = transport.to_string();
                return Err(
                    if message.contains("timed out") || message.contains("timeout") {
                        TransportError::Timeout(message)
                    } else {
                        TransportError::Network(message)
                    },
                );
            }
        };
        let latency = started.elapsed();

        let parsed: CompletionBody = response.into_json().map_err(|e| TransportError::Http {
            status: 200,
            body: excerpt(&e.to_string()),
        })?;
        let choice = parsed
            .choices
            .into_iter()
            .next()
            .ok_or(TransportError::Http {
                status: 200,
                body: "response had no choices".to_string(),
            })?;
        let finish_reason = match choice.finish_reason.as_deref() {
            Some("stop") => FinishReason::Stop,
            Some("length") => FinishReason::Length,
            None => FinishReason::Stop,
            Some(_) => FinishReason::Other,
        };
        Ok(ChatResponse {
            text: choice.message.content.unwrap_or_default(),
            finish_reason,
            latency,
        })
    }

    fn requires_auth(&self) -> bool {
        true
    }
}
