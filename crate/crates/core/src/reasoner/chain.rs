use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraints::ComplianceParams;
use crate::deduction::Literal;
use crate::world_model::render::fmt_num;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepTag {
    State,
    Es,
    Ed,
    NotEc,
    Et,
    Levels,
    Verify,
    Action,
}

impl StepTag {
    pub const CANONICAL: [StepTag; 8] = [
        StepTag::State,
        StepTag::Es,
        StepTag::Ed,
        StepTag::NotEc,
        StepTag::Et,
        StepTag::Levels,
        StepTag::Verify,
        StepTag::Action,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StepTag::State => "state",
            StepTag::Es => "es",
            StepTag::Ed => "ed",
            StepTag::NotEc => "not_ec",
            StepTag::Et => "et",
            StepTag::Levels => "levels",
            StepTag::Verify => "verify",
            StepTag::Action => "action",
        }
    }

    /// The predicate literal a per-predicate step evaluates.
    pub fn literal(self) -> Option<Literal> {
        match self {
            StepTag::Es => Some(Literal::Es),
            StepTag::Ed => Some(Literal::Ed),
            StepTag::NotEc => Some(Literal::NotEc),
            StepTag::Et => Some(Literal::Et),
            _ => None,
        }
    }
}

impl fmt::Display for StepTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StepTag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StepTag::CANONICAL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown step `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuidanceStep {
    pub tag: StepTag,
    pub objective: String,
    /// Body of the fenced block the backend must answer with.
    pub schema: String,
}

impl GuidanceStep {
    /// Objective plus the output-format request appended to every prompt.
    pub fn instruction(&self) -> String {
        format!(
            "## Current step\n{}\nAnswer with one fenced block tagged `{}` in exactly this form; text outside the block is ignored.\n```{}\n{}\n```\n",
            self.objective, self.tag, self.tag, self.schema
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuidanceChain {
    pub steps: Vec<GuidanceStep>,
}

#[derive(Debug, Error)]
pub enum ChainFileError {
    #[error("malformed chain file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("chain file overrides unknown step `{0}`")]
    UnknownStep(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainFile {
    #[serde(default)]
    objectives: BTreeMap<String, String>,
}

const VERDICT_SCHEMA: &str = "a0 = true\na1 = false\n... one line per candidate";

fn canonical_step(tag: StepTag, params: &ComplianceParams) -> GuidanceStep {
    let pref = params
        .pref
        .iter()
        .map(|(a, d)| format!("{a} {} m", fmt_num(*d)))
        .collect::<Vec<_>>()
        .join(", ");
    let per_candidate = "For every candidate action, predict the robot position over the planning horizon (the robot holds the candidate velocity, every human keeps its observed velocity).";
    let (objective, schema) = match tag {
        StepTag::State => (
            "Restate the world state: the robot's position, velocity and destination, then each human's position, velocity, activity and current distance to the robot.".to_owned(),
            "robot: position (x, y), goal (x, y)\nhuman_1: position (x, y), activity a, distance d\n...".to_owned(),
        ),
        StepTag::Es => (
            format!(
                "{per_candidate} Decide activity awareness Es: at every predicted step DIST(R, H) ≥ ρ_R + ρ_H + Pref(activity of H) for every human H, with Pref: {pref}."
            ),
            VERDICT_SCHEMA.to_owned(),
        ),
        StepTag::Ed => (
            format!(
                "{per_candidate} Decide distance awareness Ed: at every predicted step DIST(R, H) ≥ ρ_R + ρ_H + d_min for every human H, with d_min = {} m.",
                fmt_num(params.d_min)
            ),
            VERDICT_SCHEMA.to_owned(),
        ),
        StepTag::NotEc => (
            format!(
                "{per_candidate} Decide collision freedom ¬Ec: at every predicted step DIST(R, H) ≥ ρ_R + ρ_H for every human H."
            ),
            VERDICT_SCHEMA.to_owned(),
        ),
        StepTag::Et => (
            format!(
                "{per_candidate} Decide the time constraint Et: elapsed time + horizon duration + remaining distance to the destination / {} m/s ≤ T_max = {} s.",
                fmt_num(params.max_speed),
                params.t_max
            ),
            VERDICT_SCHEMA.to_owned(),
        ),
        StepTag::Levels => (
            "Classify every candidate into the first level it satisfies: D1 = Es ∧ Ed ∧ ¬Ec ∧ Et, D2 = Es ∧ ¬Ec ∧ Et, D3 = Ed ∧ ¬Ec ∧ Et, D4 = ¬Ec ∧ Et, or none.".to_owned(),
            "a0 = D1\na1 = none\n... one line per candidate".to_owned(),
        ),
        StepTag::Verify => (
            "Take the best level reached by any candidate. Among the candidates at that level pick the one ending closest to the destination (lower index on ties) and check every literal of the level for it again.".to_owned(),
            "index = 0\nlevel = D1\nverified = true".to_owned(),
        ),
        StepTag::Action => (
            "Emit the verified action as a velocity command from the candidate list.".to_owned(),
            "index = 0\nvelocity = (vx, vy)\nlevel = D1".to_owned(),
        ),
    };
    GuidanceStep {
        tag,
        objective,
        schema,
    }
}

/// The eight-step chain with thresholds from `params` filled in.
pub fn build_guidance_chain(params: &ComplianceParams) -> GuidanceChain {
    GuidanceChain {
        steps: StepTag::CANONICAL
            .into_iter()
            .map(|t| canonical_step(t, params))
            .collect(),
    }
}

impl GuidanceChain {
    /// Degenerate one-shot chain: a single action step whose objective folds
    /// in every predicate definition.
    pub fn single_step(params: &ComplianceParams) -> GuidanceChain {
        let objective = StepTag::CANONICAL[1..7]
            .iter()
            .map(|t| canonical_step(*t, params).objective)
            .chain(std::iter::once(
                canonical_step(StepTag::Action, params).objective,
            ))
            .collect::<Vec<_>>()
            .join("\n");
        GuidanceChain {
            steps: vec![GuidanceStep {
                tag: StepTag::Action,
                objective,
                schema: canonical_step(StepTag::Action, params).schema,
            }],
        }
    }

    /// Replaces objective texts from a TOML file of the form
    /// `[objectives]\nes = "..."`. Step order and schemas are kept.
    pub fn with_overrides(mut self, text: &str) -> Result<GuidanceChain, ChainFileError> {
        let file: ChainFile = toml::from_str(text)?;
        for (name, objective) in file.objectives {
            let tag: StepTag = name
                .parse()
                .map_err(|_| ChainFileError::UnknownStep(name.clone()))?;
            match self.steps.iter_mut().find(|s| s.tag == tag) {
                Some(step) => step.objective = objective,
                None => return Err(ChainFileError::UnknownStep(name)),
            }
        }
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}
