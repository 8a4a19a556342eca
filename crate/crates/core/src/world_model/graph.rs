use crate::geometry::Vec2;

use super::{
    AgentRef, Change, ObservationFrame, SpatialEdge, TemporalEdge, TemporalKind, WorldGraph,
    WorldModelError,
};

/// Builds the graph for `curr`, attaching deltas against `prev` when given.
///
/// Every human of `prev` must still be present in `curr`. Humans that appear
/// for the first time get spatial edges without a change and no temporal edge.
pub fn build_world_graph(
    prev: Option<&ObservationFrame>,
    curr: &ObservationFrame,
) -> Result<WorldGraph, WorldModelError> {
    let curr_humans = curr.validate()?;
    let prev_humans = match prev {
        Some(p) => {
            let ph = p.validate()?;
            if p.time >= curr.time {
                return Err(WorldModelError::TimeOrder {
                    prev: p.time,
                    curr: curr.time,
                });
            }
            if let Some(missing) = ph.keys().find(|id| !curr_humans.contains_key(id)) {
                return Err(WorldModelError::UnknownHuman(*missing));
            }
            Some(ph)
        }
        None => None,
    };

    let prev_position = |agent: AgentRef| -> Option<Vec2> {
        let ph = prev_humans.as_ref()?;
        match agent {
            AgentRef::Robot => prev.map(|p| p.robot.position),
            AgentRef::Human(id) => ph.get(&id).map(|h| h.position),
        }
    };
    let position = |agent: AgentRef| -> Vec2 {
        match agent {
            AgentRef::Robot => curr.robot.position,
            AgentRef::Human(id) => curr_humans[&id].position,
        }
    };
    let edge = |from: AgentRef, to: AgentRef| -> SpatialEdge {
        let distance = position(from).distance(position(to));
        let change = match (prev_position(from), prev_position(to)) {
            (Some(a), Some(b)) => Some(Change::between(a.distance(b), distance)),
            _ => None,
        };
        SpatialEdge {
            from,
            to,
            distance,
            change,
        }
    };

    let ids: Vec<_> = curr_humans.keys().copied().collect();
    let mut spatial_edges = Vec::with_capacity(ids.len() * (ids.len() + 1) / 2);
    for &id in &ids {
        spatial_edges.push(edge(AgentRef::Human(id), AgentRef::Robot));
    }
    for (i, &a) in ids.iter().enumerate() {
        for &b in &ids[i + 1..] {
            spatial_edges.push(edge(AgentRef::Human(a), AgentRef::Human(b)));
        }
    }

    let mut temporal_edges = Vec::new();
    if let (Some(p), Some(ph)) = (prev, prev_humans.as_ref()) {
        let goal_distance = curr.robot.goal_distance();
        temporal_edges.push(TemporalEdge {
            agent: AgentRef::Robot,
            kind: TemporalKind::RobotGoalDistance {
                goal: curr.robot.goal,
            },
            value: goal_distance,
            change: Change::between(p.robot.goal_distance(), goal_distance),
        });
        for (id, before) in ph {
            let speed = curr_humans[id].velocity.norm();
            temporal_edges.push(TemporalEdge {
                agent: AgentRef::Human(*id),
                kind: TemporalKind::HumanVelocity,
                value: speed,
                change: Change::between(before.velocity.norm(), speed),
            });
        }
    }

    Ok(WorldGraph {
        frame: curr.clone(),
        spatial_edges,
        temporal_edges,
    })
}
