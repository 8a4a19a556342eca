//! Seeded 2D episode simulator: one robot, scripted humans with ground-truth
//! activities, kinematic integration and terminal-status detection.

mod episode;
mod policy;
pub mod trace;

use std::fmt;
use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, HumanPolicy, ScenarioConfig, SpawnRule};
use crate::geometry::Vec2;
use crate::world_model::{Activity, HumanId, HumanVertex, ObservationFrame, RobotVertex};

pub use episode::{run_batch, run_episode, EpisodeResult};
pub use policy::{
    Decision, PlannerPolicy, Policy, PolicyError, ReasonerBackendKind, ReasonerPolicy,
    StationaryPolicy,
};

/// Spawn attempts per human before the packing is declared infeasible.
const SPAWN_RETRIES: usize = 1000;
/// Collision checks per tick, at evenly spaced interpolated positions.
const COLLISION_SUBSTEPS: usize = 4;
/// A walking human within this distance of its waypoint turns around.
const WAYPOINT_REACHED: f64 = 0.2;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("could not place {placed} of {wanted} humans without overlap")]
    InfeasiblePacking { placed: usize, wanted: usize },
    #[error("episode already ended with status {0}")]
    Terminal(EpisodeStatus),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EpisodeStatus {
    Running,
    Success,
    Collision,
    Timeout,
    /// The policy failed; the episode was stopped without a physical outcome.
    Aborted,
}

impl EpisodeStatus {
    pub fn is_terminal(self) -> bool {
        self != EpisodeStatus::Running
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EpisodeStatus::Running => "running",
            EpisodeStatus::Success => "success",
            EpisodeStatus::Collision => "collision",
            EpisodeStatus::Timeout => "timeout",
            EpisodeStatus::Aborted => "aborted",
        }
    }
}

impl fmt::Display for EpisodeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Simulator-side human: the observable vertex plus hidden waypoints.
#[derive(Debug, Clone, PartialEq)]
struct SimHuman {
    vertex: HumanVertex,
    origin: Vec2,
    target: Vec2,
}

fn moves(activity: &Activity) -> Option<f64> {
    match activity {
        Activity::Walking => Some(1.0),
        Activity::Phone => Some(0.5),
        _ => None,
    }
}

#[derive(Debug, Clone)]
pub struct EpisodeState {
    pub frame: ObservationFrame,
    pub tick: u64,
    pub status: EpisodeStatus,
    cfg: Arc<ScenarioConfig>,
    humans: Vec<SimHuman>,
    rng: ChaCha8Rng,
}

impl PartialEq for EpisodeState {
    fn eq(&self, other: &Self) -> bool {
        self.frame == other.frame
            && self.tick == other.tick
            && self.status == other.status
            && self.humans == other.humans
    }
}

fn draw_activity(rng: &mut ChaCha8Rng, names: &[Activity], dist: &WeightedIndex<f64>) -> Activity {
    names[dist.sample(rng)].clone()
}

fn activity_table(cfg: &ScenarioConfig) -> Result<(Vec<Activity>, WeightedIndex<f64>), SimError> {
    let names: Vec<Activity> = cfg.activity_weights.keys().cloned().collect();
    let dist = WeightedIndex::new(cfg.activity_weights.values().copied())
        .map_err(|e| ConfigError::Invalid(format!("activity_weights: {e}")))?;
    Ok((names, dist))
}

fn uniform_in_arena(rng: &mut ChaCha8Rng, cfg: &ScenarioConfig, margin: f64) -> Vec2 {
    let lo = cfg.arena_min + Vec2::new(margin, margin);
    let hi = cfg.arena_max - Vec2::new(margin, margin);
    Vec2::new(rng.random_range(lo.x..=hi.x), rng.random_range(lo.y..=hi.y))
}

fn jitter(rng: &mut ChaCha8Rng, amount: f64) -> Vec2 {
    if amount == 0.0 {
        return Vec2::ZERO;
    }
    Vec2::new(
        rng.random_range(-amount..=amount),
        rng.random_range(-amount..=amount),
    )
}

/// Start and waypoint for one human. Moving humans cross the circle (or the
/// arena); stationary ones stand somewhere inside the circle.
fn propose(rng: &mut ChaCha8Rng, cfg: &ScenarioConfig, activity: &Activity) -> (Vec2, Vec2) {
    let center = (cfg.arena_min + cfg.arena_max) * 0.5;
    match (cfg.spawn, moves(activity).is_some()) {
        (SpawnRule::CircleCrossing, true) => {
            let angle = rng.random_range(0.0..std::f64::consts::TAU);
            let on_circle = Vec2::from_polar(cfg.circle_radius, angle);
            let start = center + on_circle + jitter(rng, cfg.spawn_jitter);
            let goal = center - on_circle + jitter(rng, cfg.spawn_jitter);
            (start, goal)
        }
        (SpawnRule::CircleCrossing, false) => {
            let angle = rng.random_range(0.0..std::f64::consts::TAU);
            let r = cfg.circle_radius * rng.random::<f64>().sqrt();
            let p = center + Vec2::from_polar(r, angle);
            (p, p)
        }
        (SpawnRule::Random, _) => {
            let margin = cfg.human_radius;
            (
                uniform_in_arena(rng, cfg, margin),
                uniform_in_arena(rng, cfg, margin),
            )
        }
    }
}

/// Places the robot and `cfg.n_humans` humans. Deterministic in `cfg.seed`.
pub fn spawn_scenario(cfg: &ScenarioConfig) -> Result<EpisodeState, SimError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (names, dist) = activity_table(cfg)?;

    let robot = RobotVertex {
        position: cfg.robot_start,
        velocity: Vec2::ZERO,
        radius: cfg.robot_radius,
        goal: cfg.robot_goal,
        task: cfg.task.clone(),
        elapsed: 0.0,
    };

    let mut humans: Vec<SimHuman> = Vec::with_capacity(cfg.n_humans);
    for k in 0..cfg.n_humans {
        let activity = draw_activity(&mut rng, &names, &dist);
        let mut placed = None;
        for _ in 0..SPAWN_RETRIES {
            let (start, target) = propose(&mut rng, cfg, &activity);
            let clear_of_robot = start.distance(cfg.robot_start)
                >= cfg.spawn_clearance.max(cfg.robot_radius + cfg.human_radius)
                && start.distance(cfg.robot_goal)
                    >= cfg.spawn_clearance.max(cfg.robot_radius + cfg.human_radius);
            let clear_of_humans = humans
                .iter()
                .all(|h| h.vertex.position.distance(start) >= h.vertex.radius + cfg.human_radius);
            if cfg.inside_arena(start) && clear_of_robot && clear_of_humans {
                placed = Some((start, target));
                break;
            }
        }
        let Some((start, target)) = placed else {
            return Err(SimError::InfeasiblePacking {
                placed: k,
                wanted: cfg.n_humans,
            });
        };
        humans.push(SimHuman {
            vertex: HumanVertex {
                id: HumanId(k as u32 + 1),
                position: start,
                velocity: Vec2::ZERO,
                radius: cfg.human_radius,
                activity,
            },
            origin: start,
            target,
        });
    }

    let mut state = EpisodeState {
        frame: ObservationFrame {
            time: 0.0,
            robot,
            humans: Vec::new(),
        },
        tick: 0,
        status: EpisodeStatus::Running,
        cfg: Arc::new(cfg.clone()),
        humans,
        rng,
    };
    // Initial velocities are what each human is about to do, so the first
    // observation already carries motion.
    let velocities = state.human_velocities();
    for (h, v) in state.humans.iter_mut().zip(velocities) {
        h.vertex.velocity = v;
    }
    state.sync_frame();
    Ok(state)
}

impl EpisodeState {
    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn elapsed(&self) -> f64 {
        self.frame.time
    }

    fn sync_frame(&mut self) {
        self.frame.humans = self.humans.iter().map(|h| h.vertex.clone()).collect();
    }

    fn waypoint_velocity(&self, h: &SimHuman, speed_factor: f64) -> Vec2 {
        let to_target = h.target - h.vertex.position;
        (to_target.normalized())
            * (self.cfg.human_speed * speed_factor).min(to_target.norm() / self.cfg.dt)
    }

    /// Velocity each human will hold during the next tick. The waypoint
    /// policy never reads the robot state.
    fn human_velocities(&self) -> Vec<Vec2> {
        let cfg = &self.cfg;
        self.humans
            .iter()
            .enumerate()
            .map(|(i, h)| {
                let Some(factor) = moves(&h.vertex.activity) else {
                    return Vec2::ZERO;
                };
                let desired = self.waypoint_velocity(h, factor);
                match cfg.human_policy {
                    HumanPolicy::ConstantVelocityWaypoint => desired,
                    HumanPolicy::SocialForceLite => {
                        let robot = &self.frame.robot;
                        let others = self
                            .humans
                            .iter()
                            .enumerate()
                            .filter(|(j, _)| *j != i)
                            .map(|(_, o)| (o.vertex.position, o.vertex.radius))
                            .chain(std::iter::once((robot.position, robot.radius)));
                        social_force_velocity(
                            h.vertex.position,
                            h.vertex.velocity,
                            h.vertex.radius,
                            desired,
                            others,
                            cfg.dt,
                            cfg.human_speed * factor * 1.5,
                        )
                    }
                }
            })
            .collect()
    }

    fn retarget(&mut self) {
        for h in &mut self.humans {
            if moves(&h.vertex.activity).is_some()
                && h.vertex.position.distance(h.target) <= WAYPOINT_REACHED
            {
                std::mem::swap(&mut h.origin, &mut h.target);
            }
        }
    }

    fn maybe_switch_activities(&mut self) -> Result<(), SimError> {
        let interval = self.cfg.activity_switch_interval;
        if interval <= 0.0 {
            return Ok(());
        }
        let prev_slot = ((self.tick - 1) as f64 * self.cfg.dt / interval).floor();
        let slot = (self.tick as f64 * self.cfg.dt / interval).floor();
        if slot > prev_slot {
            let (names, dist) = activity_table(&self.cfg)?;
            for h in &mut self.humans {
                h.vertex.activity = draw_activity(&mut self.rng, &names, &dist);
            }
        }
        Ok(())
    }

    /// Advances one tick with the robot holding `action` (clamped to the
    /// maximum speed).
    pub fn step(&mut self, action: Vec2) -> Result<EpisodeStatus, SimError> {
        if self.status.is_terminal() {
            return Err(SimError::Terminal(self.status));
        }
        let cfg = Arc::clone(&self.cfg);
        let action = if action.is_finite() {
            action.clamp_norm(cfg.max_speed)
        } else {
            Vec2::ZERO
        };
        let velocities = self.human_velocities();

        let robot_from = self.frame.robot.position;
        let robot_to = robot_from + action * cfg.dt;
        let mut collided = false;
        for s in 1..=COLLISION_SUBSTEPS {
            let f = s as f64 / COLLISION_SUBSTEPS as f64;
            let r = robot_from.lerp(robot_to, f);
            collided |= self.humans.iter().zip(&velocities).any(|(h, v)| {
                let p = h.vertex.position + *v * (cfg.dt * f);
                r.distance(p) < cfg.robot_radius + h.vertex.radius
            });
        }

        for (h, v) in self.humans.iter_mut().zip(velocities) {
            h.vertex.position += v * cfg.dt;
            h.vertex.velocity = v;
        }
        self.tick += 1;
        let time = self.tick as f64 * cfg.dt;
        let robot = &mut self.frame.robot;
        robot.position = robot_to;
        robot.velocity = action;
        robot.elapsed = time;
        self.frame.time = time;

        self.retarget();
        self.maybe_switch_activities()?;
        self.sync_frame();

        self.status = if collided {
            EpisodeStatus::Collision
        } else if self.frame.robot.goal_distance() <= cfg.goal_radius {
            EpisodeStatus::Success
        } else if time > cfg.t_max {
            EpisodeStatus::Timeout
        } else {
            EpisodeStatus::Running
        };
        Ok(self.status)
    }

    pub(crate) fn abort(&mut self) {
        self.status = EpisodeStatus::Aborted;
    }
}

/// Consuming form of [`EpisodeState::step`].
pub fn step(mut state: EpisodeState, action: Vec2) -> Result<EpisodeState, SimError> {
    state.step(action)?;
    Ok(state)
}

/// Desired-velocity relaxation plus exponential repulsion from neighbours.
fn social_force_velocity(
    position: Vec2,
    velocity: Vec2,
    radius: f64,
    desired: Vec2,
    others: impl Iterator<Item = (Vec2, f64)>,
    dt: f64,
    max_speed: f64,
) -> Vec2 {
    const RELAXATION: f64 = 0.5;
    const STRENGTH: f64 = 2.0;
    const RANGE: f64 = 0.3;
    const CUTOFF: f64 = 3.0;
    let mut force = (desired - velocity) * (1.0 / RELAXATION);
    for (p, r) in others {
        let away = position - p;
        let d = away.norm();
        if d > 0.0 && d < CUTOFF {
            force += away.normalized() * (STRENGTH * ((radius + r - d) / RANGE).exp());
        }
    }
    (velocity + force * dt).clamp_norm(max_speed)
}
