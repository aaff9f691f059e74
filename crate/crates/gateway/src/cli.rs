//! Command line: `serve`, `simulate` and `report`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use avg_core::activity_metrics::summarize;
use avg_core::skeleton_stream::{open_replay, PROTOCOL_VERSION};
use clap::{Args, Parser, Subcommand};
use thiserror::Error;
use tracing::info;

use crate::config::SessionConfig;
use crate::record::{events_path_for, read_event_log, save_replay, write_event_log};
use crate::server::{start, ServerOptions};
use crate::simulate::{simulate, ReplayReport, DEFAULT_MAX_TICKS};
use crate::source::{open_source, SourceSpec, SourceUnavailable, DEFAULT_SYNTH_RATE_HZ};

#[derive(Debug, Parser)]
#[command(name = "avg-pong", version, about = "Motion-controlled Pong: engine, gateway and tools")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a live session and broadcast snapshots to WebSocket clients.
    Serve(ServeArgs),
    /// Run a session headless from a finite source and an event log.
    Simulate(SimulateArgs),
    /// Summarize player movement in a replay file.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct SessionArgs {
    /// Frame source: replay:<path>, synth:<script.json> or tcp:<host:port>.
    #[arg(long)]
    pub source: SourceSpec,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Engine tick rate; overrides the config file.
    #[arg(long)]
    pub tick_hz: Option<f64>,
    /// JSON file overriding gameplay constants.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Frame rate used to render synth: scripts.
    #[arg(long, default_value_t = DEFAULT_SYNTH_RATE_HZ)]
    pub synth_rate_hz: f64,
    /// Write consumed frames to this replay file, and client inputs to
    /// <name>.events.jsonl next to it.
    #[arg(long)]
    pub record: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[command(flatten)]
    pub session: SessionArgs,
    /// Write a session report here on shutdown.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub session: SessionArgs,
    /// Client input log, one {"tick":N,"event":{...}} per line.
    #[arg(long)]
    pub events: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Write the snapshot hash of every tick, one per line.
    #[arg(long)]
    pub hashes: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_TICKS)]
    pub max_ticks: u64,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub replay: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Speed above which a joint counts as active, in units per second.
    #[arg(long)]
    pub speed_threshold: Option<f64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Source(#[from] SourceUnavailable),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Source(_) => 3,
            CliError::Failed(_) => 1,
        }
    }
}

fn failed(context: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Failed(format!("{context}: {e}"))
}

fn load_config(path: Option<&Path>, tick_hz: Option<f64>) -> Result<SessionConfig, CliError> {
    let mut cfg = match path {
        Some(p) => SessionConfig::load(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?,
        None => SessionConfig::default(),
    };
    if let Some(hz) = tick_hz {
        cfg.tuning.tick_hz = hz;
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| failed(&path.display().to_string(), e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| failed(&path.display().to_string(), e))?;
    w.write_all(b"\n")
        .and_then(|_| w.flush())
        .map_err(|e| failed(&path.display().to_string(), e))
}

fn save_recording(path: &Path, recording: &crate::engine::Recording, rate_hz: f64) -> Result<(), CliError> {
    save_replay(path, recording, rate_hz).map_err(|e| failed(&path.display().to_string(), e))?;
    let events = events_path_for(path);
    let file = File::create(&events).map_err(|e| failed(&events.display().to_string(), e))?;
    write_event_log(file, &recording.events).map_err(|e| failed(&events.display().to_string(), e))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Serve(args) => serve(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Report(args) => report(args),
    }
}

fn serve(args: ServeArgs) -> Result<(), CliError> {
    let s = &args.session;
    let config = load_config(s.config.as_deref(), s.tick_hz)?;
    let source = open_source(&s.source, s.synth_rate_hz)?;
    let tick_hz = config.tuning.tick_hz;
    let threshold = config.speed_threshold;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| failed("runtime", e))?;
    let outcome = runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind((args.host.as_str(), args.port))
            .await
            .map_err(|e| failed(&format!("bind {}:{}", args.host, args.port), e))?;
        let handle = start(listener, source, ServerOptions::new(config, s.seed));
        println!("listening on ws://{}", handle.local_addr);
        tokio::signal::ctrl_c()
            .await
            .map_err(|e| failed("signal handler", e))?;
        info!("shutting down");
        Ok::<_, CliError>(handle.shutdown().await)
    })?;

    if let Some(path) = &s.record {
        save_recording(path, &outcome.recording, tick_hz)?;
    }
    if let Some(path) = &args.report {
        let report = serde_json::json!({
            "v": PROTOCOL_VERSION,
            "seed": s.seed,
            "ticks": outcome.stats.ticks,
            "max_drift_ticks": outcome.stats.max_drift_ticks,
            "matches": outcome.results,
            "clients": outcome.stats.clients,
            "activity": summarize(&outcome.recording.frames, threshold).ok(),
        });
        write_json(path, &report)?;
    }
    Ok(())
}

fn run_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let s = &args.session;
    let config = load_config(s.config.as_deref(), s.tick_hz)?;
    let events = read_event_log(&args.events)
        .map_err(|e| CliError::Usage(format!("{}: {e}", args.events.display())))?;
    let source = open_source(&s.source, s.synth_rate_hz)?;
    let tick_hz = config.tuning.tick_hz;
    let run = simulate(source, events, config, s.seed, args.max_ticks);
    if let Some(path) = &s.record {
        save_recording(path, &run.recording, tick_hz)?;
    }
    if let Some(path) = &args.hashes {
        let mut text = run.hashes.join("\n");
        text.push('\n');
        std::fs::write(path, text).map_err(|e| failed(&path.display().to_string(), e))?;
    }
    write_json(&args.out, &run.report)?;
    info!(
        ticks = run.report.ticks,
        matches = run.report.matches.len(),
        hash = %run.report.final_hash,
        "simulation finished"
    );
    Ok(())
}

fn report(args: ReportArgs) -> Result<(), CliError> {
    let config = load_config(args.config.as_deref(), None)?;
    let threshold = args.speed_threshold.unwrap_or(config.speed_threshold);
    if threshold.is_nan() || threshold < 0.0 {
        return Err(CliError::Usage("--speed-threshold must be non-negative".into()));
    }
    let replay = open_replay(&args.replay).map_err(|e| SourceUnavailable {
        spec: format!("replay:{}", args.replay.display()),
        reason: e.to_string(),
    })?;
    let activity = summarize(&replay.frames, threshold).map_err(|e| failed("report", e))?;
    write_json(
        &args.out,
        &ReplayReport {
            v: PROTOCOL_VERSION,
            frames: replay.frames.len(),
            activity,
        },
    )
}

/// Parses arguments, runs the command and maps the outcome to an exit code.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .with_writer(std::io::stderr)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("avg-pong: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
