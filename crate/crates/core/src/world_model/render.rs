//! Fixed sentence templates for the world graph.
//!
//! Filled slots stay inside square brackets so a reader (or a parser) can
//! find them. Scalars use two decimals; vectors render as `(x, y)`.

use std::fmt::Write as _;

use crate::config::ScenarioConfig;
use crate::geometry::Vec2;

use super::{
    EdgeRef, HumanVertex, RobotVertex, SpatialEdge, TemporalEdge, TemporalKind, WorldGraph,
};

pub fn fmt_num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

pub fn fmt_vec(v: Vec2) -> String {
    format!("({}, {})", fmt_num(v.x), fmt_num(v.y))
}

pub fn render_robot_vertex(robot: &RobotVertex, social_distance: f64) -> String {
    format!(
        "[robot] is located at [{}] with velocity [{}] toward the destination [{}], executing task [{}] with social distance [{}].",
        fmt_vec(robot.position),
        fmt_vec(robot.velocity),
        fmt_vec(robot.goal),
        robot.task,
        fmt_num(social_distance),
    )
}

pub fn render_human_vertex(human: &HumanVertex) -> String {
    format!(
        "[{}] is located at [{}] with velocity [{}] and the collision radius [{}], performing personal activity [{}].",
        human.id,
        fmt_vec(human.position),
        fmt_vec(human.velocity),
        fmt_num(human.radius),
        human.activity,
    )
}

pub fn render_spatial_edge(edge: &SpatialEdge) -> String {
    match edge.change {
        Some(c) => format!(
            "The relative distance [{}] between [{}] and [{}] has [{}] compared to the last timestep, with a difference [{}].",
            fmt_num(edge.distance),
            edge.from,
            edge.to,
            c.trend.as_str(),
            fmt_num(c.delta),
        ),
        None => format!(
            "The relative distance [{}] between [{}] and [{}] is observed at the current timestep.",
            fmt_num(edge.distance),
            edge.from,
            edge.to,
        ),
    }
}

pub fn render_temporal_edge(edge: &TemporalEdge) -> String {
    match edge.kind {
        TemporalKind::RobotGoalDistance { goal } => format!(
            "The absolute distance [{}] between agent [{}] and destination [{}] has [{}], compared to the last timestep with a difference [{}].",
            fmt_num(edge.value),
            edge.agent,
            fmt_vec(goal),
            edge.change.trend.as_str(),
            fmt_num(edge.change.delta),
        ),
        TemporalKind::HumanVelocity => format!(
            "The velocity [{}] of agent [{}] has [{}] compared to the last timestep, with a difference [{}].",
            fmt_num(edge.value),
            edge.agent,
            edge.change.trend.as_str(),
            fmt_num(edge.change.delta),
        ),
    }
}

pub fn render_edge_text(edge: EdgeRef<'_>) -> String {
    match edge {
        EdgeRef::Spatial(e) => render_spatial_edge(e),
        EdgeRef::Temporal(e) => render_temporal_edge(e),
    }
}

/// One sentence per line: robot, humans by id, temporal edges, spatial edges.
pub fn render_observation_prompt(graph: &WorldGraph, social_distance: f64) -> String {
    let mut lines = Vec::with_capacity(
        1 + graph.frame.humans.len() + graph.temporal_edges.len() + graph.spatial_edges.len(),
    );
    lines.push(render_robot_vertex(&graph.frame.robot, social_distance));
    lines.extend(
        graph
            .frame
            .humans_by_id()
            .into_iter()
            .map(render_human_vertex),
    );
    lines.extend(graph.temporal_edges.iter().map(render_temporal_edge));
    lines.extend(graph.spatial_edges.iter().map(render_spatial_edge));
    lines.join("\n")
}

/// Static description of the scenario, shared by every prompt of an episode.
pub fn render_environment_summary(cfg: &ScenarioConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "The environment is a rectangular arena from {} to {} (meters).",
        fmt_vec(cfg.arena_min),
        fmt_vec(cfg.arena_max)
    );
    let _ = writeln!(
        s,
        "The robot has collision radius {} m, maximum speed {} m/s, a control period of {} s and plans {} steps ahead.",
        fmt_num(cfg.robot_radius),
        fmt_num(cfg.max_speed),
        fmt_num(cfg.dt),
        cfg.horizon_steps
    );
    let _ = writeln!(s, "The task must finish within T_max = {} s.", cfg.t_max);
    let _ = writeln!(
        s,
        "The minimum safe distance is d_min = {} m.",
        fmt_num(cfg.d_min)
    );
    let _ = writeln!(s, "Preferred social distance by activity:");
    for (activity, d) in &cfg.pref {
        let _ = writeln!(s, "  {activity}: {} m", fmt_num(*d));
    }
    let _ = writeln!(s, "Candidate actions (velocity in m/s):");
    for a in crate::planner::sample_actions(&cfg.action_space()) {
        let _ = writeln!(s, "  a{} = {}", a.index, fmt_vec(a.velocity));
    }
    s
}
