//! Receding-horizon action selection over a sampled velocity set.
//!
//! Every control step the planner enumerates candidate velocity commands,
//! predicts a short rollout for each (robot integrates the command, humans
//! keep their observed velocity), evaluates the constraint predicates and
//! hands the scored candidates to [`crate::deduction::degrade_and_select`].

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraints::{self, ComplianceParams, ConstraintError, Level, PredicateVector};
use crate::deduction::{self, DeductionError, DeductionOutcome, ScoredCandidate};
use crate::geometry::Vec2;
use crate::world_model::{Activity, HumanId, ObservationFrame};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
    #[error(transparent)]
    Deduction(#[from] DeductionError),
    #[error("invalid action space: {0}")]
    ActionSpace(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionSpace {
    /// Non-zero speeds, m/s.
    pub speeds: Vec<f64>,
    /// World-frame headings, radians in `[0, 2π)`.
    pub headings: Vec<f64>,
    pub includes_stop: bool,
}

impl ActionSpace {
    /// `heading_count` evenly spaced headings starting at 0.
    pub fn uniform(speeds: Vec<f64>, heading_count: usize, includes_stop: bool) -> Self {
        let headings = (0..heading_count)
            .map(|k| TAU * k as f64 / heading_count as f64)
            .collect();
        Self {
            speeds,
            headings,
            includes_stop,
        }
    }

    pub fn len(&self) -> usize {
        self.speeds.len() * self.headings.len() + usize::from(self.includes_stop)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self, max_speed: f64) -> Result<(), PlanError> {
        if self.is_empty() {
            return Err(PlanError::ActionSpace("no candidate actions".into()));
        }
        if let Some(s) = self
            .speeds
            .iter()
            .find(|&&s| !(s.is_finite() && s > 0.0 && s <= max_speed))
        {
            return Err(PlanError::ActionSpace(format!(
                "speed {s} outside (0, {max_speed}]"
            )));
        }
        if let Some(h) = self
            .headings
            .iter()
            .find(|&&h| !(h.is_finite() && (0.0..TAU).contains(&h)))
        {
            return Err(PlanError::ActionSpace(format!(
                "heading {h} outside [0, 2π)"
            )));
        }
        Ok(())
    }
}

impl Default for ActionSpace {
    fn default() -> Self {
        ActionSpace::uniform(vec![0.25, 0.5, 0.75, 1.0], 12, true)
    }
}

/// One sampled robot velocity command.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateAction {
    pub index: usize,
    pub velocity: Vec2,
}

impl CandidateAction {
    pub fn is_stop(&self) -> bool {
        self.velocity == Vec2::ZERO
    }
}

/// Stop first (when enabled), then speed-major, heading-minor.
pub fn sample_actions(space: &ActionSpace) -> Vec<CandidateAction> {
    let stop = space.includes_stop.then_some(Vec2::ZERO);
    let moving = space
        .speeds
        .iter()
        .flat_map(|&s| space.headings.iter().map(move |&h| Vec2::from_polar(s, h)));
    stop.into_iter()
        .chain(moving)
        .enumerate()
        .map(|(index, velocity)| CandidateAction { index, velocity })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RolloutHuman {
    pub id: HumanId,
    pub radius: f64,
    pub activity: Activity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RolloutStep {
    pub robot: Vec2,
    /// Indexed like [`Rollout::humans`].
    pub humans: Vec<Vec2>,
}

/// Predicted future under one candidate action. `steps[k]` is the state
/// after `k + 1` control periods; the current state is not included.
#[derive(Debug, Clone, PartialEq)]
pub struct Rollout {
    pub start: Vec2,
    pub steps: Vec<RolloutStep>,
    pub duration: f64,
    pub robot_radius: f64,
    pub goal: Vec2,
    pub humans: Vec<RolloutHuman>,
}

impl Rollout {
    pub fn final_robot(&self) -> Vec2 {
        self.steps.last().map_or(self.start, |s| s.robot)
    }
}

pub fn rollout(
    action: &CandidateAction,
    frame: &ObservationFrame,
    horizon_steps: usize,
    dt: f64,
) -> Rollout {
    assert!(
        horizon_steps >= 1,
        "rollout horizon must be at least one step"
    );
    let robot = &frame.robot;
    let steps = (1..=horizon_steps)
        .map(|k| {
            let t = k as f64 * dt;
            RolloutStep {
                robot: robot.position + action.velocity * t,
                humans: frame
                    .humans
                    .iter()
                    .map(|h| h.position + h.velocity * t)
                    .collect(),
            }
        })
        .collect();
    Rollout {
        start: robot.position,
        steps,
        duration: horizon_steps as f64 * dt,
        robot_radius: robot.radius,
        goal: robot.goal,
        humans: frame
            .humans
            .iter()
            .map(|h| RolloutHuman {
                id: h.id,
                radius: h.radius,
                activity: h.activity.clone(),
            })
            .collect(),
    }
}

/// Negative predicted arrival time; higher is better. Arrival is the first
/// rollout step within `goal_radius` of the goal, otherwise the rollout
/// duration plus straight-line travel at `max_speed` from its end. While the
/// goal is out of reach this ranks like the end-of-rollout goal distance.
pub fn score(rollout: &Rollout, dt: f64, max_speed: f64, goal_radius: f64) -> f64 {
    if let Some(k) = rollout
        .steps
        .iter()
        .position(|s| s.robot.distance(rollout.goal) <= goal_radius)
    {
        return -((k + 1) as f64 * dt);
    }
    -(rollout.duration + rollout.final_robot().distance(rollout.goal) / max_speed)
}

/// A candidate with its predicate evaluation and score.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateEvaluation {
    pub action: CandidateAction,
    pub predicates: PredicateVector,
    pub level: Option<Level>,
    pub score: f64,
}

impl From<&CandidateEvaluation> for ScoredCandidate {
    fn from(e: &CandidateEvaluation) -> Self {
        ScoredCandidate {
            action: e.action,
            predicates: e.predicates,
            score: e.score,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Planner {
    pub params: ComplianceParams,
    pub space: ActionSpace,
    pub horizon_steps: usize,
    /// Distance at which the goal counts as reached, for scoring. Zero
    /// unless set with [`Planner::with_goal_radius`].
    pub goal_radius: f64,
    candidates: Vec<CandidateAction>,
}

impl Planner {
    pub fn new(
        params: ComplianceParams,
        space: ActionSpace,
        horizon_steps: usize,
    ) -> Result<Self, PlanError> {
        params.validate()?;
        space.validate(params.max_speed)?;
        if horizon_steps == 0 {
            return Err(PlanError::ActionSpace(
                "horizon must be at least one step".into(),
            ));
        }
        let candidates = sample_actions(&space);
        Ok(Self {
            params,
            space,
            horizon_steps,
            goal_radius: 0.0,
            candidates,
        })
    }

    pub fn with_goal_radius(mut self, goal_radius: f64) -> Self {
        self.goal_radius = goal_radius;
        self
    }

    pub fn candidates(&self) -> &[CandidateAction] {
        &self.candidates
    }

    pub fn rollout(&self, action: &CandidateAction, frame: &ObservationFrame) -> Rollout {
        rollout(action, frame, self.horizon_steps, self.params.dt)
    }

    pub fn evaluate_action(
        &self,
        action: &CandidateAction,
        frame: &ObservationFrame,
        elapsed: f64,
    ) -> Result<CandidateEvaluation, PlanError> {
        let r = self.rollout(action, frame);
        let (level, predicates) = constraints::compliance_level(&r, elapsed, &self.params)?;
        Ok(CandidateEvaluation {
            action: *action,
            predicates,
            level,
            score: score(&r, self.params.dt, self.params.max_speed, self.goal_radius),
        })
    }

    /// Evaluations for the whole sampled set, in candidate order.
    pub fn evaluate(
        &self,
        frame: &ObservationFrame,
        elapsed: f64,
    ) -> Result<Vec<CandidateEvaluation>, PlanError> {
        self.candidates
            .iter()
            .map(|a| self.evaluate_action(a, frame, elapsed))
            .collect()
    }

    /// One planning cycle. `prev` is accepted for interface symmetry with
    /// the world model; the constant-velocity predictor does not need it.
    pub fn plan_step(
        &self,
        frame: &ObservationFrame,
        _prev: Option<&ObservationFrame>,
        elapsed: f64,
    ) -> Result<DeductionOutcome, PlanError> {
        let evals = self.evaluate(frame, elapsed)?;
        let scored: Vec<ScoredCandidate> = evals.iter().map(Into::into).collect();
        Ok(deduction::degrade_and_select(&scored)?)
    }

    /// Nearest sampled candidate to `velocity`; ties go to the lower index.
    pub fn nearest_candidate(&self, velocity: Vec2) -> CandidateAction {
        let mut best = self.candidates[0];
        let mut best_d = best.velocity.distance(velocity);
        for c in &self.candidates[1..] {
            let d = c.velocity.distance(velocity);
            if d < best_d {
                best = *c;
                best_d = d;
            }
        }
        best
    }
}

impl Default for Planner {
    fn default() -> Self {
        Planner::new(ComplianceParams::default(), ActionSpace::default(), 5)
            .expect("default planner configuration is valid")
    }
}
