//! JSON Lines episode traces, one record per tick.
//!
//! Record `k` holds the state at tick `k` and the action chosen there; the
//! terminal record has no action. Reading a trace back yields the same
//! frames bit for bit.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraints::{Level, PredicateVector};
use crate::geometry::Vec2;
use crate::world_model::{Activity, HumanId, HumanVertex, ObservationFrame, RobotVertex};

use super::{EpisodeResult, EpisodeStatus};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRobot {
    pub p: Vec2,
    pub v: Vec2,
    pub radius: f64,
    pub goal: Vec2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHuman {
    pub id: HumanId,
    pub p: Vec2,
    pub v: Vec2,
    pub radius: f64,
    pub activity: Activity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceAction {
    pub index: Option<usize>,
    pub velocity: Vec2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub tick: usize,
    pub time: f64,
    pub status: EpisodeStatus,
    pub robot: TraceRobot,
    pub humans: Vec<TraceHuman>,
    pub action: Option<TraceAction>,
    pub level: Option<Level>,
    pub predicate_vector: Option<PredicateVector>,
    pub forced: bool,
    pub repaired: bool,
    pub verified: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proof: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain_error: Option<String>,
}

impl TraceRecord {
    /// Observation frame reconstructed from the record. The task text is not
    /// traced and comes back empty.
    pub fn frame(&self) -> ObservationFrame {
        ObservationFrame {
            time: self.time,
            robot: RobotVertex {
                position: self.robot.p,
                velocity: self.robot.v,
                radius: self.robot.radius,
                goal: self.robot.goal,
                task: String::new(),
                elapsed: self.time,
            },
            humans: self
                .humans
                .iter()
                .map(|h| HumanVertex {
                    id: h.id,
                    position: h.p,
                    velocity: h.v,
                    radius: h.radius,
                    activity: h.activity.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("trace is empty")]
    Empty,
}

pub fn trace_records(result: &EpisodeResult, with_proofs: bool) -> Vec<TraceRecord> {
    let last = result.terminal_tick();
    result
        .trajectory
        .iter()
        .enumerate()
        .map(|(tick, f)| {
            let decision = result.decisions.get(tick);
            let outcome = decision.and_then(|d| d.outcome.as_ref());
            TraceRecord {
                tick,
                time: f.time,
                status: if tick == last {
                    result.status
                } else {
                    EpisodeStatus::Running
                },
                robot: TraceRobot {
                    p: f.robot.position,
                    v: f.robot.velocity,
                    radius: f.robot.radius,
                    goal: f.robot.goal,
                },
                humans: f
                    .humans
                    .iter()
                    .map(|h| TraceHuman {
                        id: h.id,
                        p: h.position,
                        v: h.velocity,
                        radius: h.radius,
                        activity: h.activity.clone(),
                    })
                    .collect(),
                action: decision.map(|d| TraceAction {
                    index: outcome.map(|o| o.action.index),
                    velocity: d.velocity,
                }),
                level: outcome.map(|o| o.level),
                predicate_vector: outcome.map(|o| o.predicates),
                forced: outcome.is_some_and(|o| o.forced),
                repaired: outcome.is_some_and(|o| o.repaired),
                verified: outcome.map(|o| o.verified),
                proof: outcome.filter(|_| with_proofs).map(|o| o.tree.to_text()),
                chain_error: decision.and_then(|d| d.chain_error.clone()),
            }
        })
        .collect()
}

pub fn write_trace(mut w: impl Write, records: &[TraceRecord]) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn trace_to_string(records: &[TraceRecord]) -> String {
    let mut buf = Vec::new();
    write_trace(&mut buf, records).expect("writing to memory");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

pub fn read_trace(text: &str) -> Result<Vec<TraceRecord>, TraceError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let r = serde_json::from_str(line).map_err(|e| TraceError::Malformed {
            line: i + 1,
            msg: e.to_string(),
        })?;
        out.push(r);
    }
    if out.is_empty() {
        return Err(TraceError::Empty);
    }
    Ok(out)
}

/// Final status of a trace (the last record's status).
pub fn trace_status(records: &[TraceRecord]) -> Option<EpisodeStatus> {
    records.last().map(|r| r.status)
}
