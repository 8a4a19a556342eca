use rayon::prelude::*;

use crate::config::ScenarioConfig;
use crate::deduction::DeductionOutcome;
use crate::world_model::ObservationFrame;

use super::{spawn_scenario, Decision, EpisodeStatus, Policy, SimError};

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub seed: u64,
    pub status: EpisodeStatus,
    pub dt: f64,
    /// One frame per tick, `trajectory[0]` is the spawn state.
    pub trajectory: Vec<ObservationFrame>,
    /// `decisions[k]` moved the robot from `trajectory[k]` to `trajectory[k + 1]`.
    pub decisions: Vec<Decision>,
    pub abort_reason: Option<String>,
}

impl EpisodeResult {
    pub fn terminal_tick(&self) -> usize {
        self.trajectory.len() - 1
    }

    pub fn outcomes(&self) -> impl Iterator<Item = &DeductionOutcome> {
        self.decisions.iter().filter_map(|d| d.outcome.as_ref())
    }

    pub fn n_humans(&self) -> usize {
        self.trajectory[0].humans.len()
    }
}

/// Spawns from `cfg` and alternates policy and simulator until a terminal
/// status. A policy error ends the episode as `aborted`.
pub fn run_episode(cfg: &ScenarioConfig, policy: &dyn Policy) -> Result<EpisodeResult, SimError> {
    let mut state = spawn_scenario(cfg)?;
    let mut trajectory = vec![state.frame.clone()];
    let mut decisions = Vec::new();
    let mut abort_reason = None;

    while !state.status.is_terminal() {
        let prev = trajectory.len().checked_sub(2).map(|i| &trajectory[i]);
        match policy.act(&state.frame, prev) {
            Ok(decision) => {
                state.step(decision.velocity)?;
                decisions.push(decision);
                trajectory.push(state.frame.clone());
            }
            Err(e) => {
                abort_reason = Some(e.to_string());
                state.abort();
            }
        }
    }

    Ok(EpisodeResult {
        seed: cfg.seed,
        status: state.status,
        dt: cfg.dt,
        trajectory,
        decisions,
        abort_reason,
    })
}

/// Runs one episode per seed on `jobs` threads (0 = all cores). Results come
/// back in seed order regardless of scheduling.
pub fn run_batch(
    cfg: &ScenarioConfig,
    policy: &dyn Policy,
    seeds: &[u64],
    jobs: usize,
) -> Vec<Result<EpisodeResult, SimError>> {
    let work = || {
        seeds
            .par_iter()
            .map(|&seed| run_episode(&cfg.clone().with_seed(seed), policy))
            .collect()
    };
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    }
}
