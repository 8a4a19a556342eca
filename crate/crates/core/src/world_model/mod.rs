//! Spatial-temporal world model.
//!
//! Two consecutive observation frames are turned into a [`WorldGraph`]: one
//! vertex per agent, a spatial edge per agent pair (robot pairs first, then
//! human-human pairs) and temporal edges tracking the robot's distance to its
//! goal and each human's speed. The graph is rendered into fixed logical-form
//! sentences by [`render`].

mod graph;
pub mod render;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Vec2;

pub use graph::build_world_graph;
pub use render::{
    render_edge_text, render_environment_summary, render_human_vertex, render_observation_prompt,
    render_robot_vertex, render_spatial_edge, render_temporal_edge,
};

/// |delta| at or below this renders as "unchanged" (meters or m/s).
pub const TREND_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WorldModelError {
    #[error("human {0} from the previous frame is missing in the current frame")]
    UnknownHuman(HumanId),
    #[error("human id {0} appears more than once in a frame")]
    DuplicateHuman(HumanId),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("previous frame time {prev} is not before current frame time {curr}")]
    TimeOrder { prev: f64, curr: f64 },
}

/// Stable human identifier, rendered as `human_<k>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HumanId(pub u32);

impl fmt::Display for HumanId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "human_{}", self.0)
    }
}

/// Either endpoint of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AgentRef {
    Robot,
    Human(HumanId),
}

impl fmt::Display for AgentRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentRef::Robot => f.write_str("robot"),
            AgentRef::Human(id) => id.fmt(f),
        }
    }
}

/// Observable human activity. `Other` is the open extension slot; any
/// activity used in a scenario must have a preferred-distance entry.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum Activity {
    Walking,
    Talking,
    Standing,
    Sitting,
    Phone,
    Other(String),
}

impl Activity {
    pub const BUILTIN: [Activity; 5] = [
        Activity::Walking,
        Activity::Talking,
        Activity::Standing,
        Activity::Sitting,
        Activity::Phone,
    ];

    pub fn as_str(&self) -> &str {
        match self {
            Activity::Walking => "walking",
            Activity::Talking => "talking",
            Activity::Standing => "standing",
            Activity::Sitting => "sitting",
            Activity::Phone => "phone",
            Activity::Other(name) => name,
        }
    }
}

impl fmt::Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<String> for Activity {
    fn from(s: String) -> Self {
        match s.as_str() {
            "walking" => Activity::Walking,
            "talking" => Activity::Talking,
            "standing" => Activity::Standing,
            "sitting" => Activity::Sitting,
            "phone" => Activity::Phone,
            _ => Activity::Other(s),
        }
    }
}

impl From<Activity> for String {
    fn from(a: Activity) -> Self {
        a.as_str().to_owned()
    }
}

impl FromStr for Activity {
    type Err = std::convert::Infallible;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Activity::from(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotVertex {
    pub position: Vec2,
    pub velocity: Vec2,
    pub radius: f64,
    pub goal: Vec2,
    pub task: String,
    /// Seconds since the episode started.
    pub elapsed: f64,
}

impl RobotVertex {
    pub fn goal_distance(&self) -> f64 {
        self.position.distance(self.goal)
    }
}

/// A human as seen by the robot. Carries no goal or intent: the robot only
/// observes position, velocity, size and activity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumanVertex {
    pub id: HumanId,
    pub position: Vec2,
    pub velocity: Vec2,
    pub radius: f64,
    pub activity: Activity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationFrame {
    pub time: f64,
    pub robot: RobotVertex,
    pub humans: Vec<HumanVertex>,
}

impl ObservationFrame {
    pub fn human(&self, id: HumanId) -> Option<&HumanVertex> {
        self.humans.iter().find(|h| h.id == id)
    }

    /// Humans sorted by id.
    pub fn humans_by_id(&self) -> Vec<&HumanVertex> {
        let mut hs: Vec<_> = self.humans.iter().collect();
        hs.sort_by_key(|h| h.id);
        hs
    }

    pub(crate) fn validate(&self) -> Result<BTreeMap<HumanId, &HumanVertex>, WorldModelError> {
        if !self.time.is_finite() {
            return Err(WorldModelError::NonFinite("frame time"));
        }
        let r = &self.robot;
        if !(r.position.is_finite()
            && r.velocity.is_finite()
            && r.goal.is_finite()
            && r.radius.is_finite()
            && r.elapsed.is_finite())
        {
            return Err(WorldModelError::NonFinite("robot vertex"));
        }
        let mut by_id = BTreeMap::new();
        for h in &self.humans {
            if !(h.position.is_finite() && h.velocity.is_finite() && h.radius.is_finite()) {
                return Err(WorldModelError::NonFinite("human vertex"));
            }
            if by_id.insert(h.id, h).is_some() {
                return Err(WorldModelError::DuplicateHuman(h.id));
            }
        }
        Ok(by_id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trend {
    Increased,
    Decreased,
    Unchanged,
}

impl Trend {
    pub fn from_delta(delta: f64) -> Trend {
        if delta.abs() <= TREND_TOLERANCE {
            Trend::Unchanged
        } else if delta > 0.0 {
            Trend::Increased
        } else {
            Trend::Decreased
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Trend::Increased => "increased",
            Trend::Decreased => "decreased",
            Trend::Unchanged => "unchanged",
        }
    }
}

/// Change of an edge quantity with respect to the previous frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Change {
    pub delta: f64,
    pub trend: Trend,
}

impl Change {
    pub fn between(prev: f64, curr: f64) -> Change {
        let delta = curr - prev;
        Change {
            delta,
            trend: Trend::from_delta(delta),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialEdge {
    pub from: AgentRef,
    pub to: AgentRef,
    pub distance: f64,
    /// Absent when either endpoint was not observed in the previous frame.
    pub change: Option<Change>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TemporalKind {
    /// Distance from the robot to `goal`.
    RobotGoalDistance { goal: Vec2 },
    /// Speed of a human.
    HumanVelocity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemporalEdge {
    pub agent: AgentRef,
    pub kind: TemporalKind,
    /// Goal distance in meters or speed in m/s, depending on `kind`.
    pub value: f64,
    pub change: Change,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldGraph {
    pub frame: ObservationFrame,
    pub spatial_edges: Vec<SpatialEdge>,
    pub temporal_edges: Vec<TemporalEdge>,
}

/// Either kind of edge, for [`render_edge_text`].
#[derive(Debug, Clone, Copy)]
pub enum EdgeRef<'a> {
    Spatial(&'a SpatialEdge),
    Temporal(&'a TemporalEdge),
}
