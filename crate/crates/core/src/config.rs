//! Scenario configuration file.
//!
//! A flat TOML key-value file; every key is optional and falls back to the
//! defaults below. Unknown keys are rejected.
//!
//! ```toml
//! n_humans = 5
//! seed = 7
//! spawn = "circle_crossing"            # or "random"
//! human_policy = "constant_velocity_waypoint"   # or "social_force_lite"
//! robot_start = [0.0, -4.0]
//! robot_goal = [0.0, 4.0]
//! d_min = 0.5
//! t_max = 50.0
//!
//! [pref]                  # merged over the default table
//! talking = 1.2
//!
//! [activity_weights]      # replaces the whole mix
//! walking = 0.6
//! sitting = 0.4
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraints::{default_pref_table, ComplianceParams};
use crate::geometry::Vec2;
use crate::planner::{ActionSpace, Planner};
use crate::world_model::Activity;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed scenario config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid scenario config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpawnRule {
    /// Humans start on a circle around the arena center and walk to the
    /// antipodal point.
    CircleCrossing,
    /// Humans start and head to uniformly random points inside the arena.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HumanPolicy {
    /// Non-reactive: walk straight to the current waypoint at preferred speed.
    ConstantVelocityWaypoint,
    /// Waypoint attraction plus exponential repulsion from nearby agents,
    /// including the robot.
    SocialForceLite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n_humans: usize,
    pub seed: u64,
    pub arena_min: Vec2,
    pub arena_max: Vec2,
    pub robot_start: Vec2,
    pub robot_goal: Vec2,
    pub task: String,
    pub spawn: SpawnRule,
    pub human_policy: HumanPolicy,
    /// Seconds per simulator tick and per planning cycle.
    pub dt: f64,
    pub t_max: f64,
    pub goal_radius: f64,
    pub robot_radius: f64,
    pub human_radius: f64,
    pub max_speed: f64,
    /// Preferred walking speed of humans, m/s.
    pub human_speed: f64,
    /// Radius of the spawn circle for `circle_crossing`.
    pub circle_radius: f64,
    /// Uniform noise added to spawn points and waypoints, meters.
    pub spawn_jitter: f64,
    /// Minimum distance of spawned humans from the robot start and goal.
    pub spawn_clearance: f64,
    pub d_min: f64,
    #[serde(deserialize_with = "pref_over_defaults")]
    pub pref: BTreeMap<Activity, f64>,
    /// Relative frequency of each activity when spawning humans.
    pub activity_weights: BTreeMap<Activity, f64>,
    /// Activities are re-drawn every this many seconds; 0 keeps them static.
    pub activity_switch_interval: f64,
    pub speeds: Vec<f64>,
    pub heading_count: usize,
    pub include_stop: bool,
    pub horizon_steps: usize,
}

fn pref_over_defaults<'de, D>(de: D) -> Result<BTreeMap<Activity, f64>, D::Error>
where
    D: serde::Deserializer<'de>,
{
    let mut table = default_pref_table();
    table.extend(BTreeMap::<Activity, f64>::deserialize(de)?);
    Ok(table)
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_humans: 5,
            seed: 0,
            arena_min: Vec2::new(-6.0, -6.0),
            arena_max: Vec2::new(6.0, 6.0),
            robot_start: Vec2::new(0.0, -4.0),
            robot_goal: Vec2::new(0.0, 4.0),
            task: "navigate to the destination".into(),
            spawn: SpawnRule::CircleCrossing,
            human_policy: HumanPolicy::ConstantVelocityWaypoint,
            dt: 0.25,
            t_max: 50.0,
            goal_radius: 0.3,
            robot_radius: 0.3,
            human_radius: 0.3,
            max_speed: 1.0,
            human_speed: 0.5,
            circle_radius: 4.0,
            spawn_jitter: 0.3,
            spawn_clearance: 2.0,
            d_min: 0.5,
            pref: default_pref_table(),
            activity_weights: BTreeMap::from([
                (Activity::Walking, 0.6),
                (Activity::Talking, 0.1),
                (Activity::Standing, 0.1),
                (Activity::Sitting, 0.1),
                (Activity::Phone, 0.1),
            ]),
            activity_switch_interval: 0.0,
            speeds: vec![0.25, 0.5, 0.75, 1.0],
            heading_count: 12,
            include_stop: true,
            horizon_steps: 5,
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario config is always representable as TOML")
    }

    pub fn with_humans(mut self, n: usize) -> Self {
        self.n_humans = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn compliance(&self) -> ComplianceParams {
        ComplianceParams {
            d_min: self.d_min,
            t_max: self.t_max,
            pref: self.pref.clone(),
            dt: self.dt,
            max_speed: self.max_speed,
        }
    }

    pub fn action_space(&self) -> ActionSpace {
        ActionSpace::uniform(self.speeds.clone(), self.heading_count, self.include_stop)
    }

    pub fn planner(&self) -> Result<Planner, ConfigError> {
        Planner::new(self.compliance(), self.action_space(), self.horizon_steps)
            .map(|p| p.with_goal_radius(self.goal_radius))
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn inside_arena(&self, p: Vec2) -> bool {
        (self.arena_min.x..=self.arena_max.x).contains(&p.x)
            && (self.arena_min.y..=self.arena_max.y).contains(&p.y)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |msg: String| Err(ConfigError::Invalid(msg));
        for (name, v) in [
            ("dt", self.dt),
            ("t_max", self.t_max),
            ("goal_radius", self.goal_radius),
            ("robot_radius", self.robot_radius),
            ("human_radius", self.human_radius),
            ("max_speed", self.max_speed),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return invalid(format!("{name} must be > 0, got {v}"));
            }
        }
        for (name, v) in [
            ("human_speed", self.human_speed),
            ("spawn_jitter", self.spawn_jitter),
            ("spawn_clearance", self.spawn_clearance),
            ("activity_switch_interval", self.activity_switch_interval),
            ("circle_radius", self.circle_radius),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return invalid(format!("{name} must be >= 0, got {v}"));
            }
        }
        if !(self.arena_min.x < self.arena_max.x && self.arena_min.y < self.arena_max.y) {
            return invalid("arena_min must be below arena_max".into());
        }
        if !self.inside_arena(self.robot_start) || !self.inside_arena(self.robot_goal) {
            return invalid("robot start and goal must lie inside the arena".into());
        }
        if self
            .activity_weights
            .values()
            .any(|w| !(w.is_finite() && *w >= 0.0))
            || self.activity_weights.values().sum::<f64>() <= 0.0
        {
            return invalid("activity_weights must be non-negative with a positive sum".into());
        }
        for a in self.activity_weights.keys() {
            if !self.pref.contains_key(a) {
                return invalid(format!("activity `{a}` has a weight but no pref entry"));
            }
        }
        self.compliance()
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.planner()?;
        Ok(())
    }
}
