//! Recorded replies keyed by prompt digest.
//!
//! Fixture files are JSON lines: `{"prompt_sha256": "<hex>", "reply": "..."}`.
//! When a digest occurs more than once the first line wins.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{BackendDescriptor, ReasoningBackend, TransportError};

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("cannot read fixture {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("fixture {path} line {line}: {msg}")]
    Malformed {
        path: String,
        line: usize,
        msg: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Record {
    prompt_sha256: String,
    reply: String,
}

pub fn prompt_digest(prompt: &str) -> String {
    hex::encode(Sha256::digest(prompt.as_bytes()))
}

#[derive(Debug, Clone, Default)]
pub struct ReplayBackend {
    replies: HashMap<String, String>,
}

impl ReplayBackend {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ReplayError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ReplayError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_jsonl(&text).map_err(|(line, msg)| ReplayError::Malformed {
            path: path.display().to_string(),
            line,
            msg,
        })
    }

    fn from_jsonl(text: &str) -> Result<Self, (usize, String)> {
        let mut replies = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let r: Record = serde_json::from_str(line).map_err(|e| (i + 1, e.to_string()))?;
            replies.entry(r.prompt_sha256).or_insert(r.reply);
        }
        Ok(Self { replies })
    }

    pub fn insert(&mut self, prompt: &str, reply: impl Into<String>) {
        self.replies
            .entry(prompt_digest(prompt))
            .or_insert_with(|| reply.into());
    }

    pub fn len(&self) -> usize {
        self.replies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.replies.is_empty()
    }
}

impl ReasoningBackend for ReplayBackend {
    fn descriptor(&self) -> BackendDescriptor {
        BackendDescriptor {
            name: "replay".into(),
            max_prompt_bytes: usize::MAX,
        }
    }

    fn complete(&self, prompt: &str) -> Result<String, TransportError> {
        let digest = prompt_digest(prompt);
        self.replies
            .get(&digest)
            .cloned()
            .ok_or(TransportError::MissingReplay(digest))
    }
}

/// Successful exchanges collected by one or more [`RecordingBackend`]s.
#[derive(Debug, Default)]
pub struct ReplayLog {
    records: Mutex<Vec<Record>>,
}

impl ReplayLog {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&self, prompt: &str, reply: &str) {
        self.records
            .lock()
            .expect("replay log lock poisoned")
            .push(Record {
                prompt_sha256: prompt_digest(prompt),
                reply: reply.to_owned(),
            });
    }

    pub fn len(&self) -> usize {
        self.records.lock().expect("replay log lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Fixture text, sorted by digest with the first reply per digest kept,
    /// so concurrent recording still yields stable bytes.
    pub fn to_jsonl(&self) -> String {
        let records = self.records.lock().expect("replay log lock poisoned");
        let mut first: HashMap<&str, &Record> = HashMap::new();
        for r in records.iter() {
            first.entry(&r.prompt_sha256).or_insert(r);
        }
        let mut keep: Vec<_> = first.into_values().collect();
        keep.sort_by(|a, b| a.prompt_sha256.cmp(&b.prompt_sha256));
        let mut out = String::new();
        for r in keep {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        w.write_all(self.to_jsonl().as_bytes())
    }
}

/// Passes calls through to `inner` and logs every successful exchange.
pub struct RecordingBackend<B> {
    inner: B,
    log: Arc<ReplayLog>,
}

impl<B: ReasoningBackend> RecordingBackend<B> {
    pub fn new(inner: B) -> Self {
        Self::with_log(inner, Arc::new(ReplayLog::new()))
    }

    pub fn with_log(inner: B, log: Arc<ReplayLog>) -> Self {
        Self { inner, log }
    }

    pub fn log(&self) -> &Arc<ReplayLog> {
        &self.log
    }
}

impl<B: ReasoningBackend> ReasoningBackend for RecordingBackend<B> {
    fn descriptor(&self) -> BackendDescriptor {
        self.inner.descriptor()
    }

    fn complete(&self, prompt: &str) -> Result<String, TransportError> {
        let reply = self.inner.complete(prompt)?;
        self.log.push(prompt, &reply);
        Ok(reply)
    }
}
