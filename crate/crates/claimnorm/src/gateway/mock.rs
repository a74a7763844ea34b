//! Deterministic transports for tests and offline pipeline exercises.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use super::{
    BackendConfig, ChatRequest, ChatResponse, ChatTransport, FinishReason, Role, TransportError,
};

fn reply(text: String) -> ChatResponse {
    ChatResponse {
        text,
        finish_reason: FinishReason::Stop,
        latency: Duration::ZERO,
    }
}

/// Returns the last user message verbatim.
pub struct EchoTransport;

impl ChatTransport for EchoTransport {
    fn execute(
        &self,
        _config: &BackendConfig,
        request: &ChatRequest,
        _auth: Option<&str>,
    ) -> Result<ChatResponse, TransportError> {
        let text = request
            .messages
            .iter()
            .rev()
            .find(|m| m.role == Role::User)
            .map(|m| m.content.clone())
            .unwrap_or_default();
        Ok(reply(text))
    }
}

/// Computes each response from the request with a caller-supplied function.
pub struct FnTransport<F>(pub F);

impl<F> ChatTransport for FnTransport<F>
where
    F: Fn(&ChatRequest) -> String + Send + Sync,
{
    fn execute(
        &self,
        _config: &BackendConfig,
        request: &ChatRequest,
        _auth: Option<&str>,
    ) -> Result<ChatResponse, TransportError> {
        Ok(reply((self.0)(request)))
    }
}

/// Plays back a fixed list of responses in order; errors once exhausted.
pub struct ScriptedTransport {
    responses: Mutex<VecDeque<String>>,
}

impl ScriptedTransport {
    pub fn new(responses: Vec<String>) -> Self {
        Self {
            responses: Mutex::new(responses.into()),
        }
    }
}

impl ChatTransport for ScriptedTransport {
    fn execute(
        &self,
        _config: &BackendConfig,
        _request: &ChatRequest,
        _auth: Option<&str>,
    ) -> Result<ChatResponse, TransportError> {
        self.responses
            .lock()
            .expect("script lock")
            .pop_front()
            .map(reply)
            .ok_or_else(|| TransportError::Http {
                status: 0,
                body: "scripted transport exhausted".to_string(),
            })
    }
}

/// Fails the first `failures` calls, then delegates to echo behavior.
pub struct FailingTransport {
    failures: AtomicUsize,
    calls: AtomicUsize,
    status: u16,
}

impl FailingTransport {
    pub fn rate_limited(failures: usize) -> Self {
        Self::status(429, failures)
    }

    pub fn status(status: u16, failures: usize) -> Self {
        Self {
            failures: AtomicUsize::new(failures),
            calls: AtomicUsize::new(0),
            status,
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl ChatTransport for FailingTransport {
    fn execute(
        &self,
        config: &BackendConfig,
        request: &ChatRequest,
        auth: Option<&str>,
    ) -> Result<ChatResponse, TransportError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let remaining = self.failures.load(Ordering::SeqCst);
        if remaining > 0 {
            self.failures.store(remaining - 1, Ordering::SeqCst);
            let body = "synthetic failure".to_string();
            return Err(match self.status {
                429 => TransportError::RateLimited { status: 429, body },
                s if (500..=599).contains(&s) => TransportError::ServerError { status: s, body },
                s => TransportError::Http { status: s, body },
            });
        }
        EchoTransport.execute(config, request, auth)
    }
}

/// Wraps another transport, counting total calls and peak concurrency.
pub struct CountingTransport<T> {
    inner: T,
    calls: AtomicUsize,
    current: AtomicUsize,
    peak: AtomicUsize,
    delay: Duration,
}

impl<T> CountingTransport<T> {
    pub fn new(inner: T) -> Self {
        Self::with_delay(inner, Duration::ZERO)
    }

    /// A small per-call delay widens the window for concurrency assertions.
    pub fn with_delay(inner: T, delay: Duration) -> Self {
        Self {
            inner,
            calls: AtomicUsize::new(0),
            current: AtomicUsize::new(0),
            peak: AtomicUsize::new(0),
            delay,
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn max_concurrent(&self) -> usize {
        self.peak.load(Ordering::SeqCst)
    }
}

impl<T: ChatTransport> ChatTransport for CountingTransport<T> {
    fn execute(
        &self,
        config: &BackendConfig,
        request: &ChatRequest,
        auth: Option<&str>,
    ) -> Result<ChatResponse, TransportError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let now = self.current.fetch_add(1, Ordering::SeqCst) + 1;
        self.peak.fetch_max(now, Ordering::SeqCst);
        if !self.delay.is_zero() {
            std::thread::sleep(self.delay);
        }
        let result = self.inner.execute(config, request, auth);
        self.current.fetch_sub(1, Ordering::SeqCst);
        result
    }

    fn requires_auth(&self) -> bool {
        self.inner.requires_auth()
    }
}
