mod backend;
mod error;
mod output;
mod run;
mod trace_cmd;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use socnav_core::reasoner::DEFAULT_TOKEN_ENV;
use socnav_core::ScenarioConfig;

use backend::{BackendSpec, RemoteOptions};
use error::CliError;
use run::RunOptions;

#[derive(Parser)]
#[command(
    name = "socnav",
    version,
    about = "Seeded social navigation experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded episodes with one backend and write results under --out.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// planner, oracle, remote or replay:<fixture.jsonl>
        #[arg(long, default_value = "oracle")]
        backend: BackendSpec,
        /// Override the crowd size from the config.
        #[arg(long)]
        humans: Option<usize>,
    },
    /// Run every backend against every crowd size, one CSV row per cell.
    Bench {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_delimiter = ',', default_value = "oracle")]
        backends: Vec<BackendSpec>,
        #[arg(long, value_delimiter = ',', default_value = "5,10")]
        humans: Vec<usize>,
    },
    /// Replay a trace file: per-tick selections and recomputed metrics.
    Trace {
        path: PathBuf,
        /// Scenario config supplying d_min and preferences.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write plot-ready positions (agent,tick,x,y) here.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario TOML; defaults apply to anything it leaves out.
    #[arg(long)]
    config: Option<PathBuf>,
    /// First seed; episode i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    episodes: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads, 0 for one per core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Chat-completions URL for the remote backend.
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long, default_value = "default")]
    model: String,
    /// Remote request timeout in seconds.
    #[arg(long, default_value_t = 30.0)]
    timeout: f64,
    /// Environment variable holding the bearer token.
    #[arg(long, default_value = DEFAULT_TOKEN_ENV)]
    token_env: String,
    /// Include proof text in traces.
    #[arg(long)]
    proofs: bool,
    /// Record every backend exchange to this replay fixture.
    #[arg(long)]
    record: Option<PathBuf>,
}

fn load_config(path: Option<&PathBuf>) -> Result<ScenarioConfig, CliError> {
    match path {
        Some(p) => ScenarioConfig::load(p).map_err(|e| CliError::Config(e.to_string())),
        None => Ok(ScenarioConfig::default()),
    }
}

impl CommonArgs {
    fn into_options(
        self,
        backend: BackendSpec,
        humans: Option<usize>,
    ) -> Result<RunOptions, CliError> {
        let mut cfg = load_config(self.config.as_ref())?;
        if let Some(n) = humans {
            cfg = cfg.with_humans(n);
        }
        cfg.validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        if !(self.timeout.is_finite() && self.timeout > 0.0) {
            return Err(CliError::Config(
                "--timeout must be a positive number of seconds".into(),
            ));
        }
        Ok(RunOptions {
            config_path: self.config,
            cfg,
            backend,
            remote: RemoteOptions {
                endpoint: self.endpoint,
                model: self.model,
                timeout: Duration::from_secs_f64(self.timeout),
                token_env: self.token_env,
            },
            episodes: self.episodes as usize,
            seed: self.seed,
            out: self.out,
            jobs: self.jobs,
            proofs: self.proofs,
            record: self.record,
        })
    }
}

fn dispatch(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Run {
            common,
            backend,
            humans,
        } => run::cmd_run(&common.into_options(backend, humans)?),
        Command::Bench {
            common,
            backends,
            humans,
        } => {
            let first = backends.first().cloned().unwrap_or(BackendSpec::Oracle);
            run::cmd_bench(&common.into_options(first, None)?, &backends, &humans)
        }
        Command::Trace { path, config, plot } => {
            let cfg = load_config(config.as_ref())?;
            trace_cmd::cmd_trace(&path, &cfg.compliance(), plot.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("socnav: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
