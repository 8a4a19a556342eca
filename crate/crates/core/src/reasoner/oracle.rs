use std::fmt::Write as _;
use std::sync::{Arc, OnceLock};

use crate::deduction::DeductionOutcome;
use crate::planner::{CandidateEvaluation, Planner};
use crate::world_model::render::{fmt_num, fmt_vec};
use crate::world_model::ObservationFrame;

use super::{BackendDescriptor, ReasoningBackend, StepTag, TransportError};

/// Deterministic backend that answers every step from the constraint and
/// planner modules of this crate. Built per frame; the cached evaluations are
/// a pure function of the frame, so answers never depend on call history.
pub struct OracleBackend {
    frame: ObservationFrame,
    prev: Option<ObservationFrame>,
    elapsed: f64,
    planner: Arc<Planner>,
    evaluations: OnceLock<Result<Vec<CandidateEvaluation>, String>>,
    outcome: OnceLock<Result<DeductionOutcome, String>>,
}

impl OracleBackend {
    pub fn new(
        frame: ObservationFrame,
        prev: Option<ObservationFrame>,
        elapsed: f64,
        planner: Arc<Planner>,
    ) -> Self {
        Self {
            frame,
            prev,
            elapsed,
            planner,
            evaluations: OnceLock::new(),
            outcome: OnceLock::new(),
        }
    }

    fn evaluations(&self) -> Result<&[CandidateEvaluation], TransportError> {
        self.evaluations
            .get_or_init(|| {
                self.planner
                    .evaluate(&self.frame, self.elapsed)
                    .map_err(|e| e.to_string())
            })
            .as_deref()
            .map_err(|e| TransportError::Backend(e.clone()))
    }

    fn outcome(&self) -> Result<&DeductionOutcome, TransportError> {
        self.outcome
            .get_or_init(|| {
                self.planner
                    .plan_step(&self.frame, self.prev.as_ref(), self.elapsed)
                    .map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(|e| TransportError::Backend(e.clone()))
    }

    fn answer(&self, tag: StepTag) -> Result<String, TransportError> {
        let mut body = String::new();
        match tag {
            StepTag::State => {
                let r = &self.frame.robot;
                let _ = writeln!(
                    body,
                    "robot: position {}, velocity {}, goal {}",
                    fmt_vec(r.position),
                    fmt_vec(r.velocity),
                    fmt_vec(r.goal)
                );
                for h in self.frame.humans_by_id() {
                    let _ = writeln!(
                        body,
                        "{}: position {}, velocity {}, activity {}, distance {}",
                        h.id,
                        fmt_vec(h.position),
                        fmt_vec(h.velocity),
                        h.activity,
                        fmt_num(h.position.distance(r.position))
                    );
                }
            }
            StepTag::Es | StepTag::Ed | StepTag::NotEc | StepTag::Et => {
                let literal = tag.literal().expect("predicate step");
                for e in self.evaluations()? {
                    let _ = writeln!(
                        body,
                        "a{} = {}",
                        e.action.index,
                        literal.holds(e.predicates)
                    );
                }
            }
            StepTag::Levels => {
                for e in self.evaluations()? {
                    let level = e.level.map_or("none".to_owned(), |l| l.to_string());
                    let _ = writeln!(body, "a{} = {level}", e.action.index);
                }
            }
            StepTag::Verify => {
                let o = self.outcome()?;
                let _ = writeln!(
                    body,
                    "index = {}\nlevel = {}\nverified = {}",
                    o.action.index, o.level, o.verified
                );
            }
            StepTag::Action => {
                let o = self.outcome()?;
                let _ = writeln!(
                    body,
                    "index = {}\nvelocity = ({:.4}, {:.4})\nlevel = {}",
                    o.action.index, o.action.velocity.x, o.action.velocity.y, o.level
                );
            }
        }
        Ok(format!("```{tag}\n{body}```\n"))
    }
}

/// Tag of the step currently requested: the last "tagged `x`" in the prompt.
fn requested_tag(prompt: &str) -> Option<StepTag> {
    const MARK: &str = "tagged `";
    let at = prompt.rfind(MARK)? + MARK.len();
    let end = prompt[at..].find('`')?;
    prompt[at..at + end].parse().ok()
}

impl ReasoningBackend for OracleBackend {
    fn descriptor(&self) -> BackendDescriptor {
        BackendDescriptor {
            name: "oracle".into(),
            max_prompt_bytes: usize::MAX,
        }
    }

    fn complete(&self, prompt: &str) -> Result<String, TransportError> {
        let tag = requested_tag(prompt)
            .ok_or_else(|| TransportError::Backend("prompt names no step tag".into()))?;
        self.answer(tag)
    }
}
