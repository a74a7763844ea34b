//! Uniform chat-completion interface over hosted LLM HTTP APIs, with request
//! recording and deterministic replay.
//!
//! A [`Gateway`] runs in one of three modes: live (send every request over
//! the wire), record (send, then persist the response keyed by a stable
//! request digest), or replay (serve responses from a cassette and never
//! touch the network). Rate limiting and the in-flight cap are enforced by a
//! limiter shared by all callers of the same gateway.

mod cassette;
mod limiter;
pub mod mock;
mod transport;

use std::path::Path;
use std::sync::Arc;
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use cassette::{CassetteEntry, CassetteStore};
pub use transport::{ChatTransport, HttpTransport, TransportError};

use limiter::Limiter;

/// Decoding defaults for all extraction calls; the sources never state
/// decoding parameters, so these are toolkit conventions surfaced in run
/// manifests.
pub const DEFAULT_TEMPERATURE: f64 = 0.0;
pub const DEFAULT_MAX_TOKENS: u32 = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model_id: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    pub max_tokens: u32,
    /// Post id plus pipeline step; excluded from the request digest.
    pub request_tag: String,
}

impl ChatRequest {
    pub fn new(model_id: &str, messages: Vec<ChatMessage>, request_tag: &str) -> Self {
        Self {
            model_id: model_id.to_string(),
            messages,
            temperature: DEFAULT_TEMPERATURE,
            max_tokens: DEFAULT_MAX_TOKENS,
            request_tag: request_tag.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FinishReason {
    Stop,
    Length,
    Other,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChatResponse {
    pub text: String,
    pub finish_reason: FinishReason,
    pub latency: Duration,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BackendConfig {
    pub endpoint_url: String,
    pub auth_env_var: String,
    pub model_id: String,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: u64,
    #[serde(default = "default_max_retries")]
    pub max_retries: u32,
    #[serde(default = "default_max_in_flight")]
    pub max_in_flight: usize,
    #[serde(default = "default_requests_per_minute")]
    pub requests_per_minute: u32,
}

fn default_timeout_secs() -> u64 {
    60
}
fn default_max_retries() -> u32 {
    2
}
fn default_max_in_flight() -> usize {
    4
}
fn default_requests_per_minute() -> u32 {
    600
}

impl Default for BackendConfig {
    fn default() -> Self {
        Self {
            endpoint_url: "https://api.together.xyz/v1/chat/completions".to_string(),
            auth_env_var: "TOGETHER_API_KEY".to_string(),
            model_id: "meta-llama/Llama-3.3-70B-Instruct-Turbo".to_string(),
            timeout_secs: default_timeout_secs(),
            max_retries: default_max_retries(),
            max_in_flight: default_max_in_flight(),
            requests_per_minute: default_requests_per_minute(),
        }
    }
}

impl BackendConfig {
    pub fn timeout(&self) -> Duration {
        Duration::from_secs(self.timeout_secs)
    }

    pub fn load(path: &Path) -> Result<Self, GatewayError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GatewayError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| GatewayError::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GatewayError {
    #[error("auth env var {0} is not set")]
    AuthMissing(String),
    #[error("request timed out after retries")]
    Timeout,
    #[error("rate limited after retries")]
    RateLimited,
    #[error("backend error (status {status}): {body}")]
    Protocol { status: u16, body: String },
    #[error("cassette miss for digest {digest} (request {request_tag})")]
    CassetteMiss { digest: String, request_tag: String },
    #[error("cassette error: {0}")]
    Cassette(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("backend config error: {0}")]
    Config(String),
}

/// Stable hex digest over (model_id, messages, temperature, max_tokens).
/// Strings are length-prefixed and field order is fixed, so equal requests
/// hash identically across platforms; `request_tag` and timing never
/// participate.
pub fn request_digest(request: &ChatRequest) -> String {
    let mut hasher = Sha256::new();
    let put_str = |h: &mut Sha256, s: &str| {
        h.update((s.len() as u64).to_le_bytes());
        h.update(s.as_bytes());
    };
    put_str(&mut hasher, &request.model_id);
    hasher.update((request.messages.len() as u64).to_le_bytes());
    for message in &request.messages {
        let role_byte = match message.role {
            Role::System => 0u8,
            Role::User => 1,
            Role::Assistant => 2,
        };
        hasher.update([role_byte]);
        put_str(&mut hasher, &message.content);
    }
    hasher.update(request.temperature.to_bits().to_le_bytes());
    hasher.update(request.max_tokens.to_le_bytes());
    hex::encode(hasher.finalize())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GatewayMode {
    Live,
    Record,
    Replay,
}

impl std::str::FromStr for GatewayMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "live" => Ok(GatewayMode::Live),
            "record" => Ok(GatewayMode::Record),
            "replay" => Ok(GatewayMode::Replay),
            other => Err(format!("unknown mode {other:?} (live|record|replay)")),
        }
    }
}

pub struct Gateway {
    config: BackendConfig,
    mode: GatewayMode,
    transport: Option<Arc<dyn ChatTransport>>,
    cassette: Option<Mutex<CassetteStore>>,
    limiter: Limiter,
    backoff_base: Duration,
}

impl Gateway {
    pub fn live(config: BackendConfig, transport: Arc<dyn ChatTransport>) -> Self {
        let limiter = Limiter::new(config.max_in_flight, config.requests_per_minute);
        Self {
            config,
            mode: GatewayMode::Live,
            transport: Some(transport),
            cassette: None,
            limiter,
            backoff_base: Duration::from_millis(250),
        }
    }

    pub fn recorder(
        config: BackendConfig,
        transport: Arc<dyn ChatTransport>,
        cassette_path: &Path,
    ) -> Result<Self, GatewayError> {
        let store = CassetteStore::open_or_create(cassette_path)
            .map_err(|e| GatewayError::Cassette(e.to_string()))?;
        let limiter = Limiter::new(config.max_in_flight, config.requests_per_minute);
        Ok(Self {
            config,
            mode: GatewayMode::Record,
            transport: Some(transport),
            cassette: Some(Mutex::new(store)),
            limiter,
            backoff_base: Duration::from_millis(250),
        })
    }

    /// Replay gateway: serves recorded responses and performs zero network
    /// operations.
    pub fn replayer(config: BackendConfig, cassette_path: &Path) -> Result<Self, GatewayError> {
        let store = CassetteStore::load(cassette_path)
            .map_err(|e| GatewayError::Cassette(e.to_string()))?;
        let limiter = Limiter::new(config.max_in_flight, config.requests_per_minute);
        Ok(Self {
            config,
            mode: GatewayMode::Replay,
            transport: None,
            cassette: Some(Mutex::new(store)),
            limiter,
            backoff_base: Duration::from_millis(250),
        })
    }

    /// Shrink retry backoff; test hook.
    pub fn with_backoff(mut self, base: Duration) -> Self {
        self.backoff_base = base;
        self
    }

    pub fn mode(&self) -> GatewayMode {
        self.mode
    }

    pub fn config(&self) -> &BackendConfig {
        &self.config
    }

    fn validate(request: &ChatRequest) -> Result<(), GatewayError> {
        if request.messages.is_empty() {
            return Err(GatewayError::InvalidRequest("no messages".to_string()));
        }
        for message in &request.messages {
            if message.role != Role::Assistant && message.content.is_empty() {
                return Err(GatewayError::InvalidRequest(
                    "empty system/user message".to_string(),
                ));
            }
        }
        if request.temperature < 0.0 {
            return Err(GatewayError::InvalidRequest(
                "negative temperature".to_string(),
            ));
        }
        if request.max_tokens == 0 {
            return Err(GatewayError::InvalidRequest(
                "max_tokens must be positive".to_string(),
            ));
        }
        Ok(())
    }

    /// Perform one chat completion according to the gateway mode.
    pub fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, GatewayError> {
        Self::validate(request)?;
        match self.mode {
            GatewayMode::Replay => self.complete_replay(request),
            GatewayMode::Live | GatewayMode::Record => self.complete_live(request),
        }
    }

    fn complete_replay(&self, request: &ChatRequest) -> Result<ChatResponse, GatewayError> {
        let digest = request_digest(request);
        let store = self
            .cassette
            .as_ref()
            .expect("replay gateway has a cassette");
        let store = store.lock().expect("cassette lock");
        match store.get(&digest) {
            Some(text) => Ok(ChatResponse {
                text: text.to_string(),
                finish_reason: FinishReason::Stop,
                latency: Duration::ZERO,
            }),
            None => Err(GatewayError::CassetteMiss {
                digest,
                request_tag: request.request_tag.clone(),
            }),
        }
    }

    fn complete_live(&self, request: &ChatRequest) -> Result<ChatResponse, GatewayError> {
        let transport = self
            .transport
            .as_ref()
            .expect("live gateway has a transport");
        let auth = if transport.requires_auth() {
            match std::env::var(&self.config.auth_env_var) {
                Ok(value) if !value.is_empty() => Some(value),
                _ => return Err(GatewayError::AuthMissing(self.config.auth_env_var.clone())),
            }
        } else {
            None
        };

        let mut last_error = None;
        for attempt in 0..=self.config.max_retries {
            if attempt > 0 {
                std::thread::sleep(self.backoff_base * 2u32.pow(attempt - 1));
            }
            let _slot = self.limiter.acquire();
            match transport.execute(&self.config, request, auth.as_deref()) {
                Ok(response) => {
                    if self.mode == GatewayMode::Record {
                        self.record_entry(request, &response)?;
                    }
                    return Ok(response);
                }
                Err(e) if e.is_transient() => last_error = Some(e),
                Err(TransportError::Http { status, body }) => {
                    return Err(GatewayError::Protocol { status, body })
                }
                Err(e) => last_error = Some(e),
            }
        }
        Err(match last_error {
            Some(TransportError::RateLimited { .. }) => GatewayError::RateLimited,
            Some(TransportError::Timeout(_)) => GatewayError::Timeout,
            Some(TransportError::ServerError { status, body }) => {
                GatewayError::Protocol { status, body }
            }
            Some(TransportError::Network(message)) => GatewayError::Protocol {
                status: 0,
                body: message,
            },
            Some(TransportError::Http { status, body }) => GatewayError::Protocol { status, body },
            None => GatewayError::Protocol {
                status: 0,
                body: "no attempts made".to_string(),
            },
        })
    }

    fn record_entry(
        &self,
        request: &ChatRequest,
        response: &ChatResponse,
    ) -> Result<(), GatewayError> {
        let digest = request_digest(request);
        let store = self
            .cassette
            .as_ref()
            .expect("record gateway has a cassette");
        let mut store = store.lock().expect("cassette lock");
        store
            .upsert(&digest, &response.text)
            .map_err(|e| GatewayError::Cassette(e.to_string()))?;
        Ok(())
    }

    /// Number of recorded entries; record/replay modes only.
    pub fn cassette_len(&self) -> usize {
        self.cassette
            .as_ref()
            .map(|c| c.lock().expect("cassette lock").len())
            .unwrap_or(0)
    }
}
