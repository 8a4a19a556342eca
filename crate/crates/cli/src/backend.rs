use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Duration;

use socnav_core::reasoner::{RemoteBackend, RemoteConfig, ReplayBackend, ReplayError, ReplayLog};
use socnav_core::simulator::{PlannerPolicy, Policy, ReasonerBackendKind, ReasonerPolicy};
use socnav_core::ScenarioConfig;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BackendSpec {
    /// The receding-horizon planner alone, no reasoning chain.
    Planner,
    Oracle,
    Remote,
    Replay(PathBuf),
}

impl BackendSpec {
    /// Method label used in result tables.
    pub fn method(&self) -> &'static str {
        match self {
            BackendSpec::Planner => "planner",
            BackendSpec::Oracle => "oracle",
            BackendSpec::Remote => "remote",
            BackendSpec::Replay(_) => "replay",
        }
    }
}

impl fmt::Display for BackendSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BackendSpec::Replay(p) => write!(f, "replay:{}", p.display()),
            other => f.write_str(other.method()),
        }
    }
}

impl FromStr for BackendSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "planner" => Ok(BackendSpec::Planner),
            "oracle" => Ok(BackendSpec::Oracle),
            "remote" => Ok(BackendSpec::Remote),
            _ => match s.strip_prefix("replay:") {
                Some(p) if !p.is_empty() => Ok(BackendSpec::Replay(PathBuf::from(p))),
                _ => Err(format!(
                    "unknown backend `{s}` (expected planner, oracle, remote or replay:<path>)"
                )),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct RemoteOptions {
    pub endpoint: Option<String>,
    pub model: String,
    pub timeout: Duration,
    pub token_env: String,
}

pub fn build_policy(
    spec: &BackendSpec,
    cfg: &ScenarioConfig,
    remote: &RemoteOptions,
    record: Option<Arc<ReplayLog>>,
) -> Result<Box<dyn Policy>, CliError> {
    let planner = cfg.planner().map_err(|e| CliError::Config(e.to_string()))?;
    let kind = match spec {
        BackendSpec::Planner => return Ok(Box::new(PlannerPolicy::new(planner))),
        BackendSpec::Oracle => ReasonerBackendKind::Oracle,
        BackendSpec::Remote => {
            let endpoint = remote.endpoint.clone().ok_or_else(|| {
                CliError::Config("--endpoint is required for the remote backend".into())
            })?;
            let backend = RemoteBackend::new(RemoteConfig {
                timeout: remote.timeout,
                token_env: remote.token_env.clone(),
                ..RemoteConfig::new(endpoint, remote.model.clone())
            });
            backend.probe().map_err(|e| {
                CliError::Backend(format!("{} unreachable: {e}", backend.config().endpoint))
            })?;
            ReasonerBackendKind::Shared(Arc::new(backend))
        }
        BackendSpec::Replay(path) => {
            let replay = ReplayBackend::load(path).map_err(|e| match e {
                ReplayError::Io { .. } | ReplayError::Malformed { .. } => {
                    CliError::Fixture(e.to_string())
                }
            })?;
            ReasonerBackendKind::Shared(Arc::new(replay))
        }
    };
    let mut policy = ReasonerPolicy::new(cfg, planner, kind);
    policy.record = record;
    Ok(Box::new(policy))
}
