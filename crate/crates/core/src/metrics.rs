//! Per-episode and aggregate navigation metrics.
//!
//! * NP: robot path length (sum of per-tick segment lengths), meters.
//! * NT: terminal tick × dt, seconds.
//! * UF: ticks with some human closer than `d_min + ρ_R + ρ_H`.
//! * HA: ticks with some human closer than `Pref(activity) + ρ_R + ρ_H`.
//!
//! Aggregates average NP and NT over successful episodes only and report
//! `NA` when there are none; the failure-episode means are kept separately.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraints::{ComplianceParams, ConstraintError};
use crate::simulator::trace::TraceRecord;
use crate::simulator::{EpisodeResult, EpisodeStatus};
use crate::world_model::ObservationFrame;

pub const CSV_HEADER: &str = "method,n_humans,SR,NP,NT,UF,HA,episodes";
pub const UNDEFINED: &str = "NA";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("cannot aggregate zero episodes")]
    Empty,
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeMetrics {
    pub seed: u64,
    pub status: EpisodeStatus,
    pub success: bool,
    pub np: f64,
    pub nt: f64,
    pub uf: u64,
    pub ha: u64,
    pub ticks: usize,
}

/// Metrics from a frame sequence; `frames[k]` is the state at tick `k`.
pub fn frame_metrics(
    seed: u64,
    status: EpisodeStatus,
    frames: &[ObservationFrame],
    params: &ComplianceParams,
) -> Result<EpisodeMetrics, ConstraintError> {
    let np = frames
        .windows(2)
        .map(|w| w[0].robot.position.distance(w[1].robot.position))
        .sum();
    let (mut uf, mut ha) = (0, 0);
    for f in frames {
        let (mut uncomfortable, mut intrusive) = (false, false);
        for h in &f.humans {
            let gap = f.robot.position.distance(h.position) - f.robot.radius - h.radius;
            uncomfortable |= gap < params.d_min;
            intrusive |= gap < params.preference(&h.activity)?;
        }
        uf += uncomfortable as u64;
        ha += intrusive as u64;
    }
    Ok(EpisodeMetrics {
        seed,
        status,
        success: status == EpisodeStatus::Success,
        np,
        nt: frames.last().map_or(0.0, |f| f.time),
        uf,
        ha,
        ticks: frames.len().saturating_sub(1),
    })
}

pub fn episode_metrics(
    result: &EpisodeResult,
    params: &ComplianceParams,
) -> Result<EpisodeMetrics, ConstraintError> {
    frame_metrics(result.seed, result.status, &result.trajectory, params)
}

/// Recomputes metrics from trace records alone.
pub fn trace_metrics(
    seed: u64,
    records: &[TraceRecord],
    params: &ComplianceParams,
) -> Result<EpisodeMetrics, ConstraintError> {
    let frames: Vec<_> = records.iter().map(TraceRecord::frame).collect();
    let status = records.last().map_or(EpisodeStatus::Aborted, |r| r.status);
    frame_metrics(seed, status, &frames, params)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n_episodes: usize,
    pub successes: usize,
    pub collisions: usize,
    pub timeouts: usize,
    pub aborted: usize,
    pub sr: f64,
    pub np: Option<f64>,
    pub nt: Option<f64>,
    /// Mean UF ticks per episode.
    pub uf: f64,
    /// Mean HA ticks per episode.
    pub ha: f64,
    /// NP and NT means over failed episodes, diagnostics only.
    pub failure_np: Option<f64>,
    pub failure_nt: Option<f64>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (n, sum) = values.fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
    (n > 0).then(|| sum / n as f64)
}

pub fn aggregate(records: &[EpisodeMetrics]) -> Result<MetricsReport, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::Empty);
    }
    let n = records.len();
    let count = |s: EpisodeStatus| records.iter().filter(|r| r.status == s).count();
    let successes = records.iter().filter(|r| r.success).count();
    let ok = || records.iter().filter(|r| r.success);
    let failed = || records.iter().filter(|r| !r.success);
    Ok(MetricsReport {
        n_episodes: n,
        successes,
        collisions: count(EpisodeStatus::Collision),
        timeouts: count(EpisodeStatus::Timeout),
        aborted: count(EpisodeStatus::Aborted),
        sr: successes as f64 / n as f64,
        np: mean(ok().map(|r| r.np)),
        nt: mean(ok().map(|r| r.nt)),
        uf: records.iter().map(|r| r.uf as f64).sum::<f64>() / n as f64,
        ha: records.iter().map(|r| r.ha as f64).sum::<f64>() / n as f64,
        failure_np: mean(failed().map(|r| r.np)),
        failure_nt: mean(failed().map(|r| r.nt)),
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or(UNDEFINED.to_owned(), |v| format!("{v:.2}"))
}

impl MetricsReport {
    /// One CSV row in [`CSV_HEADER`] column order.
    pub fn csv_row(&self, method: &str, n_humans: usize) -> String {
        format!(
            "{method},{n_humans},{:.2},{},{},{:.2},{:.2},{}",
            self.sr,
            fmt_opt(self.np),
            fmt_opt(self.nt),
            self.uf,
            self.ha,
            self.n_episodes
        )
    }
}

/// Row for a cell that could not be run at all.
pub fn error_row(method: &str, n_humans: usize) -> String {
    format!("{method},{n_humans},ERROR,ERROR,ERROR,ERROR,ERROR,0")
}
