//! Headless sessions: run the engine as fast as possible from a finite
//! source and a scripted event log.

use std::collections::VecDeque;

use avg_core::activity_metrics::{summarize, ActivityReport};
use avg_core::menu_flow::PhaseTag;
use avg_core::skeleton_stream::{SkeletonFrame, PROTOCOL_VERSION};
use serde::{Deserialize, Serialize};

use crate::config::SessionConfig;
use crate::engine::{Engine, LoggedEvent, Recording};
use crate::protocol::{snapshot_hash, ClientEvent, MatchResult};
use crate::source::FrameSource;

/// Upper bound on a headless run: one hour of ticks at 60 Hz.
pub const DEFAULT_MAX_TICKS: u64 = 60 * 60 * 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub v: u64,
    pub seed: u64,
    pub ticks: u64,
    pub final_phase: PhaseTag,
    pub final_hash: String,
    pub matches: Vec<MatchResult>,
    pub frames_consumed: usize,
    pub events_applied: usize,
    /// Movement summary of the consumed frames; absent with fewer than two.
    pub activity: Option<ActivityReport>,
}

#[derive(Debug)]
pub struct SimulationRun {
    pub report: SimulationReport,
    /// Snapshot hash of every tick, in order.
    pub hashes: Vec<String>,
    pub recording: Recording,
}

/// Ticks the engine until the source is used up, every scripted event has
/// been applied and no match is pending, or until `max_ticks`.
pub fn simulate(
    mut source: Box<dyn FrameSource>,
    events: Vec<LoggedEvent>,
    config: SessionConfig,
    seed: u64,
    max_ticks: u64,
) -> SimulationRun {
    let threshold = config.speed_threshold;
    let mut engine = Engine::new(config, seed);
    let mut pending: VecDeque<LoggedEvent> = events.into();
    let mut hashes = Vec::new();
    let mut frames: Vec<SkeletonFrame> = Vec::new();
    let mut due: Vec<ClientEvent> = Vec::new();

    while engine.tick() < max_ticks {
        let idle = source.exhausted()
            && pending.is_empty()
            && !matches!(
                engine.session().tag(),
                PhaseTag::Countdown | PhaseTag::Playing
            );
        if idle && engine.tick() > 0 {
            break;
        }
        frames.clear();
        frames.extend(source.poll(engine.now_ms()));
        due.clear();
        while pending.front().is_some_and(|e| e.tick <= engine.tick()) {
            due.extend(pending.pop_front().map(|e| e.event));
        }
        let snapshot = engine.step(&frames, &due);
        hashes.push(snapshot_hash(&snapshot.to_json()));
    }

    let recording = engine.take_recording();
    let activity = summarize(&recording.frames, threshold).ok();
    let report = SimulationReport {
        v: PROTOCOL_VERSION,
        seed,
        ticks: engine.tick(),
        final_phase: engine.session().tag(),
        final_hash: hashes.last().cloned().unwrap_or_default(),
        matches: engine.results().to_vec(),
        frames_consumed: recording.frames.len(),
        events_applied: recording.events.len(),
        activity,
    };
    SimulationRun {
        report,
        hashes,
        recording,
    }
}

/// Activity report of a replay file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub v: u64,
    pub frames: usize,
    pub activity: ActivityReport,
}
