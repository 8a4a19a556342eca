//! Chat-completion adapter over HTTP.
//!
//! Request: `POST endpoint` with `Authorization: Bearer $TOKEN` and
//! `{"model": m, "messages": [{"role": "user", "content": prompt}]}`.
//! Reply text is read from `choices[0].message.content`.

use std::net::{TcpStream, ToSocketAddrs};
use std::time::Duration;

use serde_json::{json, Value};

use super::{BackendDescriptor, ReasoningBackend, TransportError};

pub const DEFAULT_TOKEN_ENV: &str = "SOCNAV_API_KEY";

#[derive(Debug, Clone, PartialEq)]
pub struct RemoteConfig {
    pub endpoint: String,
    pub model: String,
    pub timeout: Duration,
    /// Environment variable holding the bearer token. Unset means no header.
    pub token_env: String,
    pub max_prompt_bytes: usize,
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            model: model.into(),
            timeout: Duration::from_secs(30),
            token_env: DEFAULT_TOKEN_ENV.into(),
            max_prompt_bytes: 512 * 1024,
        }
    }
}

pub struct RemoteBackend {
    config: RemoteConfig,
    token: Option<String>,
    agent: ureq::Agent,
}

impl RemoteBackend {
    pub fn new(config: RemoteConfig) -> Self {
        let token = std::env::var(&config.token_env)
            .ok()
            .filter(|t| !t.is_empty());
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Self {
            config,
            token,
            agent,
        }
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.config
    }

    /// Opens and drops a TCP connection to the endpoint host.
    pub fn probe(&self) -> Result<(), TransportError> {
        let uri: ureq::http::Uri = self
            .config
            .endpoint
            .parse()
            .map_err(|e| TransportError::Connection(format!("bad endpoint: {e}")))?;
        let host = uri
            .host()
            .ok_or_else(|| TransportError::Connection("endpoint has no host".into()))?;
        let port = uri
            .port_u16()
            .unwrap_or(if uri.scheme_str() == Some("https") {
                443
            } else {
                80
            });
        let addr = (host, port)
            .to_socket_addrs()
            .map_err(|e| TransportError::Connection(e.to_string()))?
            .next()
            .ok_or_else(|| TransportError::Connection(format!("{host} did not resolve")))?;
        TcpStream::connect_timeout(&addr, self.config.timeout)
            .map(drop)
            .map_err(|e| match e.kind() {
                std::io::ErrorKind::TimedOut => TransportError::Timeout,
                _ => TransportError::Connection(e.to_string()),
            })
    }
}

fn transport_error(e: ureq::Error) -> TransportError {
    match e {
        ureq::Error::Timeout(_) => TransportError::Timeout,
        ureq::Error::Io(io)
            if matches!(
                io.kind(),
                std::io::ErrorKind::TimedOut | std::io::ErrorKind::WouldBlock
            ) =>
        {
            TransportError::Timeout
        }
        ureq::Error::StatusCode(s @ (401 | 403)) => TransportError::Auth(s),
        ureq::Error::StatusCode(s) => TransportError::Status(s),
        other => TransportError::Connection(other.to_string()),
    }
}

/// Pulls the reply text out of a chat-completion response body.
pub(crate) fn extract_reply(body: &str) -> Result<String, TransportError> {
    let v: Value =
        serde_json::from_str(body).map_err(|e| TransportError::MalformedBody(e.to_string()))?;
    v.pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .map(str::to_owned)
        .ok_or_else(|| TransportError::MalformedBody("no choices[0].message.content".into()))
}

impl ReasoningBackend for RemoteBackend {
    fn descriptor(&self) -> BackendDescriptor {
        BackendDescriptor {
            name: format!("remote:{}", self.config.model),
            max_prompt_bytes: self.config.max_prompt_bytes,
        }
    }

    fn complete(&self, prompt: &str) -> Result<String, TransportError> {
        let payload = json!({
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
        });
        let mut req = self
            .agent
            .post(&self.config.endpoint)
            .header("Content-Type", "application/json");
        if let Some(t) = &self.token {
            req = req.header("Authorization", format!("Bearer {t}"));
        }
        let mut resp = req.send(payload.to_string()).map_err(transport_error)?;
        let status = resp.status().as_u16();
        match status {
            200..=299 => {}
            401 | 403 => return Err(TransportError::Auth(status)),
            _ => return Err(TransportError::Status(status)),
        }
        let body = resp.body_mut().read_to_string().map_err(transport_error)?;
        extract_reply(&body)
    }
}
