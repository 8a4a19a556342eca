use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::json;
use socnav_core::metrics::{
    aggregate, episode_metrics, error_row, EpisodeMetrics, MetricsReport, CSV_HEADER,
};
use socnav_core::reasoner::ReplayLog;
use socnav_core::simulator::trace::{trace_records, write_trace};
use socnav_core::simulator::{run_batch, EpisodeResult, Policy};
use socnav_core::ScenarioConfig;

use crate::backend::{build_policy, BackendSpec, RemoteOptions};
use crate::error::CliError;
use crate::output::{write_atomic, write_json};

pub struct Cell {
    pub results: Vec<EpisodeResult>,
    pub metrics: Vec<EpisodeMetrics>,
    pub report: MetricsReport,
}

pub fn seeds(base: u64, episodes: usize) -> Result<Vec<u64>, CliError> {
    (0..episodes as u64)
        .map(|i| {
            base.checked_add(i)
                .ok_or_else(|| CliError::Config("seed range overflows u64".into()))
        })
        .collect()
}

pub fn run_cell(
    cfg: &ScenarioConfig,
    policy: &dyn Policy,
    seeds: &[u64],
    jobs: usize,
) -> Result<Cell, CliError> {
    let params = cfg.compliance();
    let mut results = Vec::with_capacity(seeds.len());
    for r in run_batch(cfg, policy, seeds, jobs) {
        results.push(r.map_err(|e| CliError::Config(e.to_string()))?);
    }
    let metrics = results
        .iter()
        .map(|r| episode_metrics(r, &params))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let report = aggregate(&metrics).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(Cell {
        results,
        metrics,
        report,
    })
}

fn jsonl<T: serde::Serialize>(items: &[T]) -> String {
    let mut s = String::new();
    for it in items {
        s.push_str(&serde_json::to_string(it).expect("record serializes"));
        s.push('\n');
    }
    s
}

pub struct RunOptions {
    pub config_path: Option<PathBuf>,
    pub cfg: ScenarioConfig,
    pub backend: BackendSpec,
    pub remote: RemoteOptions,
    pub episodes: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub jobs: usize,
    pub proofs: bool,
    pub record: Option<PathBuf>,
}

fn manifest(opts: &RunOptions, command: &str, extra: serde_json::Value) -> serde_json::Value {
    json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "flags": {
            "config": opts.config_path.as_ref().map(|p| p.display().to_string()),
            "backend": opts.backend.to_string(),
            "episodes": opts.episodes,
            "seed": opts.seed,
            "out": opts.out.display().to_string(),
            "jobs": opts.jobs,
            "endpoint": opts.remote.endpoint,
            "model": opts.remote.model,
            "timeout_s": opts.remote.timeout.as_secs_f64(),
            "token_env": opts.remote.token_env,
            "proofs": opts.proofs,
            "record": opts.record.as_ref().map(|p| p.display().to_string()),
        },
        "scenario": opts.cfg,
        "extra": extra,
    })
}

fn write_record(path: Option<&Path>, log: Option<&ReplayLog>) -> Result<(), CliError> {
    if let (Some(path), Some(log)) = (path, log) {
        write_atomic(path, log.to_jsonl().as_bytes())?;
    }
    Ok(())
}

/// Runs `opts.episodes` seeded episodes and writes:
/// `results.csv`, `episodes.jsonl`, `summary.json`, `manifest.json` and
/// `traces/seed_<seed>.jsonl` under `opts.out`. Returns the CSV text.
pub fn cmd_run(opts: &RunOptions) -> Result<String, CliError> {
    let seeds = seeds(opts.seed, opts.episodes)?;
    let log = opts.record.as_ref().map(|_| Arc::new(ReplayLog::new()));
    let policy = build_policy(&opts.backend, &opts.cfg, &opts.remote, log.clone())?;
    let cell = run_cell(&opts.cfg, policy.as_ref(), &seeds, opts.jobs)?;

    let csv = format!(
        "{CSV_HEADER}\n{}\n",
        cell.report
            .csv_row(opts.backend.method(), opts.cfg.n_humans)
    );
    let traces = opts.out.join("traces");
    for r in &cell.results {
        let mut buf = Vec::new();
        write_trace(&mut buf, &trace_records(r, opts.proofs)).expect("in-memory write");
        write_atomic(&traces.join(format!("seed_{}.jsonl", r.seed)), &buf)?;
    }
    write_atomic(
        &opts.out.join("episodes.jsonl"),
        jsonl(&cell.metrics).as_bytes(),
    )?;
    let chain_errors: usize = cell
        .results
        .iter()
        .flat_map(|r| &r.decisions)
        .filter(|d| d.chain_error.is_some())
        .count();
    write_json(
        &opts.out.join("summary.json"),
        &json!({
            "method": opts.backend.method(),
            "n_humans": opts.cfg.n_humans,
            "report": cell.report,
            "chain_errors": chain_errors,
        }),
    )?;
    write_json(
        &opts.out.join("manifest.json"),
        &manifest(
            opts,
            "run",
            json!({ "seeds": [seeds.first(), seeds.last()] }),
        ),
    )?;
    write_record(opts.record.as_deref(), log.as_deref())?;
    write_atomic(&opts.out.join("results.csv"), csv.as_bytes())?;
    Ok(csv)
}

/// One row per (backend, crowd size) cell. A failing cell becomes an error
/// row and the remaining cells still run.
pub fn cmd_bench(
    opts: &RunOptions,
    backends: &[BackendSpec],
    crowd_sizes: &[usize],
) -> Result<String, CliError> {
    let seeds = seeds(opts.seed, opts.episodes)?;
    let log = opts.record.as_ref().map(|_| Arc::new(ReplayLog::new()));
    let mut csv = format!("{CSV_HEADER}\n");
    let mut cells = Vec::new();
    for backend in backends {
        for &n in crowd_sizes {
            let cfg = opts.cfg.clone().with_humans(n);
            let outcome = build_policy(backend, &cfg, &opts.remote, log.clone())
                .and_then(|p| run_cell(&cfg, p.as_ref(), &seeds, opts.jobs));
            match outcome {
                Ok(cell) => {
                    csv.push_str(&cell.report.csv_row(backend.method(), n));
                    cells.push(json!({
                        "backend": backend.to_string(), "n_humans": n, "report": cell.report,
                    }));
                }
                Err(e) => {
                    eprintln!("cell {backend} x {n}: {e}");
                    csv.push_str(&error_row(backend.method(), n));
                    cells.push(json!({
                        "backend": backend.to_string(), "n_humans": n, "error": e.to_string(),
                        "exit_code": e.exit_code(),
                    }));
                }
            }
            csv.push('\n');
        }
    }
    write_json(&opts.out.join("summary.json"), &json!({ "cells": cells }))?;
    write_json(
        &opts.out.join("manifest.json"),
        &manifest(
            opts,
            "bench",
            json!({
                "backends": backends.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
                "humans": crowd_sizes,
                "seeds": [seeds.first(), seeds.last()],
            }),
        ),
    )?;
    write_record(opts.record.as_deref(), log.as_deref())?;
    write_atomic(&opts.out.join("results.csv"), csv.as_bytes())?;
    Ok(csv)
}
