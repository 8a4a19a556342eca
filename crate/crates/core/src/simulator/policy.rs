use std::sync::Arc;

use thiserror::Error;

use crate::config::ScenarioConfig;
use crate::deduction::DeductionOutcome;
use crate::geometry::Vec2;
use crate::planner::{PlanError, Planner};
use crate::reasoner::{
    build_guidance_chain, run_chain_with_retries, validate_and_repair, GuidanceChain,
    OracleBackend, ReasoningBackend, RecordingBackend, ReplayLog, DEFAULT_RETRIES,
};
use crate::world_model::{
    build_world_graph, render_environment_summary, render_observation_prompt, ObservationFrame,
    WorldModelError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolicyError {
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    WorldModel(#[from] WorldModelError),
}

/// What the robot does for one tick, with the selection record when the
/// policy produces one.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub velocity: Vec2,
    pub outcome: Option<DeductionOutcome>,
    /// Set when the reasoning chain failed and the planner stood in.
    pub chain_error: Option<String>,
}

pub trait Policy: Send + Sync {
    fn name(&self) -> String;
    fn act(
        &self,
        frame: &ObservationFrame,
        prev: Option<&ObservationFrame>,
    ) -> Result<Decision, PolicyError>;
}

/// Never moves.
#[derive(Debug, Clone, Copy, Default)]
pub struct StationaryPolicy;

impl Policy for StationaryPolicy {
    fn name(&self) -> String {
        "stationary".into()
    }

    fn act(
        &self,
        _: &ObservationFrame,
        _: Option<&ObservationFrame>,
    ) -> Result<Decision, PolicyError> {
        Ok(Decision {
            velocity: Vec2::ZERO,
            outcome: None,
            chain_error: None,
        })
    }
}

/// The deterministic receding-horizon planner.
#[derive(Debug, Clone)]
pub struct PlannerPolicy {
    pub planner: Arc<Planner>,
}

impl PlannerPolicy {
    pub fn new(planner: Planner) -> Self {
        Self {
            planner: Arc::new(planner),
        }
    }
}

impl Policy for PlannerPolicy {
    fn name(&self) -> String {
        "planner".into()
    }

    fn act(
        &self,
        frame: &ObservationFrame,
        prev: Option<&ObservationFrame>,
    ) -> Result<Decision, PolicyError> {
        let outcome = self.planner.plan_step(frame, prev, frame.robot.elapsed)?;
        Ok(Decision {
            velocity: outcome.action.velocity,
            outcome: Some(outcome),
            chain_error: None,
        })
    }
}

pub enum ReasonerBackendKind {
    /// A fresh [`OracleBackend`] per frame.
    Oracle,
    Shared(Arc<dyn ReasoningBackend>),
}

/// World model, reasoning chain, then validation against the deduction
/// module. A failed chain falls back to the planner.
pub struct ReasonerPolicy {
    pub planner: Arc<Planner>,
    pub chain: GuidanceChain,
    pub backend: ReasonerBackendKind,
    pub env_summary: String,
    pub retries: usize,
    /// When set, every exchange is appended here for building a fixture.
    pub record: Option<Arc<ReplayLog>>,
}

impl ReasonerPolicy {
    pub fn new(cfg: &ScenarioConfig, planner: Planner, backend: ReasonerBackendKind) -> Self {
        Self {
            chain: build_guidance_chain(&planner.params),
            planner: Arc::new(planner),
            backend,
            env_summary: render_environment_summary(cfg),
            retries: DEFAULT_RETRIES,
            record: None,
        }
    }
}

impl Policy for ReasonerPolicy {
    fn name(&self) -> String {
        match &self.backend {
            ReasonerBackendKind::Oracle => "oracle".into(),
            ReasonerBackendKind::Shared(b) => b.descriptor().name,
        }
    }

    fn act(
        &self,
        frame: &ObservationFrame,
        prev: Option<&ObservationFrame>,
    ) -> Result<Decision, PolicyError> {
        let elapsed = frame.robot.elapsed;
        let graph = build_world_graph(prev, frame)?;
        let social = self.planner.params.social_distance(frame);
        let obs = render_observation_prompt(&graph, social);

        let oracle;
        let backend: &dyn ReasoningBackend = match &self.backend {
            ReasonerBackendKind::Oracle => {
                oracle = OracleBackend::new(
                    frame.clone(),
                    prev.cloned(),
                    elapsed,
                    Arc::clone(&self.planner),
                );
                &oracle
            }
            ReasonerBackendKind::Shared(b) => b.as_ref(),
        };
        let recording;
        let backend: &dyn ReasoningBackend = match &self.record {
            Some(log) => {
                recording = RecordingBackend::with_log(backend, Arc::clone(log));
                &recording
            }
            None => backend,
        };
        let (claim, chain_error) = match run_chain_with_retries(
            backend,
            &self.env_summary,
            &obs,
            &self.chain,
            self.retries,
        ) {
            Ok((_, claim)) => (Some(claim), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let outcome = validate_and_repair(claim.as_ref(), frame, prev, elapsed, &self.planner)?;
        Ok(Decision {
            velocity: outcome.action.velocity,
            outcome: Some(outcome),
            chain_error,
        })
    }
}
