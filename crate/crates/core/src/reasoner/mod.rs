//! Step-by-step reasoning over the rendered world state.
//!
//! A [`GuidanceChain`] is a fixed sequence of objectives. [`run_chain`] sends
//! them to a [`ReasoningBackend`] one at a time; each prompt carries the
//! environment summary, the observation prompt, every earlier reply and the
//! current objective. Each objective asks for a fenced block tagged with the
//! step name, e.g.
//!
//! ````text
//! ```action
//! index = 7
//! velocity = (0.25, 0.43)
//! level = D2
//! ```
//! ````
//!
//! The final `action` block is the claim that [`validate_and_repair`] checks
//! against the constraint and deduction modules before anything is executed.

mod chain;
mod oracle;
mod parse;
mod remote;
mod repair;
mod replay;

use thiserror::Error;

pub use chain::{build_guidance_chain, ChainFileError, GuidanceChain, GuidanceStep, StepTag};
pub use oracle::OracleBackend;
pub use parse::{parse_step, ActionClaim, ParseError, StepPayload, StepResult, Verification};
pub use remote::{RemoteBackend, RemoteConfig, DEFAULT_TOKEN_ENV};
pub use repair::validate_and_repair;
pub use replay::{prompt_digest, RecordingBackend, ReplayBackend, ReplayError, ReplayLog};

/// Extra attempts per step after the first one fails.
pub const DEFAULT_RETRIES: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackendDescriptor {
    pub name: String,
    /// Longest prompt the backend accepts, in bytes.
    pub max_prompt_bytes: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransportError {
    #[error("request timed out")]
    Timeout,
    #[error("authentication rejected (status {0})")]
    Auth(u16),
    #[error("service returned status {0}")]
    Status(u16),
    #[error("malformed response body: {0}")]
    MalformedBody(String),
    #[error("connection failed: {0}")]
    Connection(String),
    #[error("no recorded reply for prompt {0}")]
    MissingReplay(String),
    #[error("backend failure: {0}")]
    Backend(String),
}

/// A text-completion service. Implementations keep no conversation state
/// between calls and must tolerate concurrent use.
pub trait ReasoningBackend: Send + Sync {
    fn descriptor(&self) -> BackendDescriptor;
    fn complete(&self, prompt: &str) -> Result<String, TransportError>;
}

impl<B: ReasoningBackend + ?Sized> ReasoningBackend for &B {
    fn descriptor(&self) -> BackendDescriptor {
        (**self).descriptor()
    }
    fn complete(&self, prompt: &str) -> Result<String, TransportError> {
        (**self).complete(prompt)
    }
}

impl<B: ReasoningBackend + ?Sized> ReasoningBackend for Box<B> {
    fn descriptor(&self) -> BackendDescriptor {
        (**self).descriptor()
    }
    fn complete(&self, prompt: &str) -> Result<String, TransportError> {
        (**self).complete(prompt)
    }
}

impl<B: ReasoningBackend + ?Sized> ReasoningBackend for std::sync::Arc<B> {
    fn descriptor(&self) -> BackendDescriptor {
        (**self).descriptor()
    }
    fn complete(&self, prompt: &str) -> Result<String, TransportError> {
        (**self).complete(prompt)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceEntry {
    pub step: usize,
    pub tag: StepTag,
    pub prompt: String,
    pub reply: String,
    pub payload: StepPayload,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvidenceChain {
    pub entries: Vec<EvidenceEntry>,
}

impl EvidenceChain {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("step {step} ({tag}): transport failed after {attempts} attempts: {source}")]
    Transport {
        step: usize,
        tag: StepTag,
        attempts: usize,
        source: TransportError,
    },
    #[error("step {step} ({tag}): unparseable reply after {attempts} attempts: {source}")]
    Parse {
        step: usize,
        tag: StepTag,
        attempts: usize,
        source: ParseError,
    },
    #[error("step {step}: prompt of {len} bytes exceeds backend limit {limit}")]
    PromptTooLarge {
        step: usize,
        len: usize,
        limit: usize,
    },
    #[error("guidance chain has no final action step")]
    NoActionStep,
}

/// Prompt for `chain.steps[step]`: shared context, then every earlier step's
/// objective with its reply, then the current instruction.
pub fn compose_prompt(
    env_summary: &str,
    obs_prompt: &str,
    chain: &GuidanceChain,
    prior: &[EvidenceEntry],
    step: usize,
) -> String {
    let mut p = String::with_capacity(
        env_summary.len()
            + obs_prompt.len()
            + prior.iter().map(|e| e.reply.len() + 512).sum::<usize>()
            + 1024,
    );
    p.push_str("## Environment\n");
    p.push_str(env_summary.trim_end());
    p.push_str("\n\n## Observation\n");
    p.push_str(obs_prompt.trim_end());
    p.push('\n');
    for e in prior {
        p.push_str(&format!("\n## Step {} ({})\n", e.step + 1, e.tag));
        p.push_str(&chain.steps[e.step].objective);
        p.push_str("\n### Answer\n");
        p.push_str(e.reply.trim_end());
        p.push('\n');
    }
    p.push('\n');
    p.push_str(&chain.steps[step].instruction());
    p
}

pub fn run_chain(
    backend: &dyn ReasoningBackend,
    env_summary: &str,
    obs_prompt: &str,
    chain: &GuidanceChain,
) -> Result<(EvidenceChain, ActionClaim), ChainError> {
    run_chain_with_retries(backend, env_summary, obs_prompt, chain, DEFAULT_RETRIES)
}

/// Runs the chain strictly in order. A step is attempted `1 + retries` times;
/// transport and parse failures draw from the same budget.
pub fn run_chain_with_retries(
    backend: &dyn ReasoningBackend,
    env_summary: &str,
    obs_prompt: &str,
    chain: &GuidanceChain,
    retries: usize,
) -> Result<(EvidenceChain, ActionClaim), ChainError> {
    if chain.steps.last().map(|s| s.tag) != Some(StepTag::Action) {
        return Err(ChainError::NoActionStep);
    }
    let limit = backend.descriptor().max_prompt_bytes;
    let attempts = retries + 1;
    let mut evidence = EvidenceChain::default();

    for (i, step) in chain.steps.iter().enumerate() {
        let prompt = compose_prompt(env_summary, obs_prompt, chain, &evidence.entries, i);
        if prompt.len() > limit {
            return Err(ChainError::PromptTooLarge {
                step: i,
                len: prompt.len(),
                limit,
            });
        }
        let mut last_err = None;
        let mut done = None;
        for _ in 0..attempts {
            match backend.complete(&prompt) {
                Err(e) => {
                    last_err = Some(ChainError::Transport {
                        step: i,
                        tag: step.tag,
                        attempts,
                        source: e,
                    })
                }
                Ok(reply) => match parse_step(step.tag, &reply) {
                    Ok(payload) => {
                        done = Some((reply, payload));
                        break;
                    }
                    Err(e) => {
                        last_err = Some(ChainError::Parse {
                            step: i,
                            tag: step.tag,
                            attempts,
                            source: e,
                        })
                    }
                },
            }
        }
        let Some((reply, payload)) = done else {
            return Err(last_err.expect("at least one attempt was made"));
        };
        evidence.entries.push(EvidenceEntry {
            step: i,
            tag: step.tag,
            prompt,
            reply,
            payload,
        });
    }

    let claim = match &evidence.entries.last().expect("chain is non-empty").payload {
        StepPayload::Action(c) => c.clone(),
        _ => unreachable!("action step always parses to an action payload"),
    };
    Ok((evidence, claim))
}
