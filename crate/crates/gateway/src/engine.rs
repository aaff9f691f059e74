//! The authoritative session engine: one fixed tick consumes the frames and
//! client inputs queued for it, advances menus or the match, and produces a
//! snapshot. Everything here is synchronous and deterministic; the network
//! and timing live in [`crate::server`].

use avg_core::game_core::{step, PaddleInputs, SideMap};
use avg_core::gesture_cursor::{update_cursor, CursorConfig, CursorError, CursorState};
use avg_core::menu_flow::{advance, menu_targets, PhaseTag, SessionEvent, SessionPhase, SessionState};
use avg_core::skeleton_stream::{FrameFilter, Joint, SkeletonFrame, PROTOCOL_VERSION};
use serde::{Deserialize, Serialize};
use tracing::{debug, warn};

use crate::config::SessionConfig;
use crate::protocol::{
    ClientEvent, CursorView, MatchResult, Snapshot, EMULATED_CONFIDENCE, EMULATED_DEPTH,
};

/// A client input stamped with the tick that applied it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoggedEvent {
    pub tick: u64,
    pub event: ClientEvent,
}

/// What a session consumed, in a form that reproduces it: raw source frames
/// restamped with the time of the tick that took them, and the client
/// inputs with their ticks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Recording {
    pub frames: Vec<SkeletonFrame>,
    pub events: Vec<LoggedEvent>,
}

pub struct Engine {
    config: SessionConfig,
    cursor_cfg: CursorConfig,
    session: SessionState,
    cursor: CursorState,
    filter: FrameFilter,
    /// Latest value of every joint, from the source or a client.
    current: SkeletonFrame,
    side_map: SideMap,
    tick: u64,
    results: Vec<MatchResult>,
    recording: Recording,
}

impl Engine {
    pub fn new(config: SessionConfig, seed: u64) -> Self {
        Self {
            cursor_cfg: config.cursor(),
            session: SessionState::new(seed, config.tuning.clone()),
            cursor: CursorState::default(),
            filter: FrameFilter::new(config.smoothing_alpha),
            current: SkeletonFrame::empty(0, 0),
            side_map: SideMap::default(),
            tick: 0,
            results: Vec::new(),
            recording: Recording::default(),
            config,
        }
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn session(&self) -> &SessionState {
        &self.session
    }

    pub fn cursor(&self) -> &CursorState {
        &self.cursor
    }

    /// Index of the next tick to run.
    pub fn tick(&self) -> u64 {
        self.tick
    }

    /// Stream time of tick `tick`, in whole milliseconds.
    pub fn tick_time_ms(&self, tick: u64) -> u64 {
        (tick as f64 * 1000.0 / self.config.tuning.tick_hz).floor() as u64
    }

    /// Stream time of the next tick.
    pub fn now_ms(&self) -> u64 {
        self.tick_time_ms(self.tick)
    }

    /// Results of finished matches, oldest first.
    pub fn results(&self) -> &[MatchResult] {
        &self.results
    }

    pub fn recording(&self) -> &Recording {
        &self.recording
    }

    pub fn take_recording(&mut self) -> Recording {
        std::mem::take(&mut self.recording)
    }

    /// Runs one tick. Source frames are merged first, then client inputs in
    /// arrival order, so within a tick the last writer of a joint wins.
    pub fn step(&mut self, frames: &[SkeletonFrame], events: &[ClientEvent]) -> Snapshot {
        let now = self.now_ms();
        for frame in frames {
            let seq = self.recording.frames.len() as u64;
            self.recording.frames.push(frame.restamped(seq, now));
            let filtered = self.filter.apply(frame);
            for player in filtered.players() {
                for (id, joint) in player.joints.iter() {
                    self.current
                        .set_joint(player.slot, id, *joint)
                        .expect("filtered joints are valid");
                }
            }
        }
        for event in events {
            self.apply_client_event(*event);
        }

        match self.session.tag() {
            tag if tag.is_menu() => self.update_menu(),
            PhaseTag::Countdown => {
                let dt_ms = 1000.0 / self.config.tuning.tick_hz;
                if self.session.tick_countdown(dt_ms) {
                    self.side_map = SideMap::from_frame(&self.current);
                    self.apply_session_event(SessionEvent::CountdownElapsed);
                }
            }
            PhaseTag::Playing => self.update_match(),
            _ => unreachable!("every phase is a menu, countdown or play"),
        }

        let snapshot = self.snapshot(now);
        self.tick += 1;
        snapshot
    }

    fn apply_client_event(&mut self, event: ClientEvent) {
        match event {
            ClientEvent::EmulatedJoint { slot, joint, x, y } => {
                match Joint::checked(x, y, EMULATED_DEPTH, EMULATED_CONFIDENCE) {
                    Ok(j) => {
                        self.current.set_joint(slot, joint, j).expect("checked above");
                    }
                    Err(e) => {
                        warn!(error = %e, "dropping out-of-range emulated joint");
                        return;
                    }
                }
            }
            ClientEvent::MenuOverride { option } => {
                self.apply_session_event(SessionEvent::Select { option });
            }
            ClientEvent::Hello { .. } | ClientEvent::Ping => return,
        }
        self.recording.events.push(LoggedEvent {
            tick: self.tick,
            event,
        });
    }

    fn apply_session_event(&mut self, event: SessionEvent) {
        match advance(&self.session, event) {
            Ok(next) => {
                debug!(tick = self.tick, from = ?self.session.tag(), to = ?next.tag(), "phase change");
                if next.tag() != self.session.tag() {
                    self.cursor.reset_dwell();
                }
                self.session = next;
            }
            Err(ignored) => debug!(tick = self.tick, %ignored),
        }
    }

    fn update_menu(&mut self) {
        let targets = menu_targets(&self.session);
        let dt_ms = 1000.0 / self.config.tuning.tick_hz;
        self.cursor = match update_cursor(&self.cursor, &self.current, &targets, dt_ms, &self.cursor_cfg) {
            Ok(next) => next,
            Err(CursorError::NoTrackedHand(hidden)) => hidden,
            Err(e) => {
                warn!(error = %e, "cursor update failed");
                return;
            }
        };
        if let Some(option) = self.cursor.emitted {
            self.apply_session_event(SessionEvent::Select { option });
        }
    }

    fn update_match(&mut self) {
        let SessionPhase::Playing { game, .. } = &mut self.session.phase else {
            return;
        };
        let mapped = self.side_map.apply(&self.current);
        let inputs = PaddleInputs::from_frame(&mapped, game);
        let next = step(game, &inputs).expect("finished matches leave the Playing phase");
        let outcome = next.winner().map(|winner| (winner, next.score));
        **game = next;
        if let Some((winner, score)) = outcome {
            self.results.push(MatchResult { winner, score });
            self.apply_session_event(SessionEvent::MatchEnded { winner, score });
        }
    }

    fn snapshot(&self, now: u64) -> Snapshot {
        let tag = self.session.tag();
        let in_menu = tag.is_menu();
        Snapshot {
            kind: "snapshot",
            v: PROTOCOL_VERSION,
            tick: self.tick,
            t_ms: now,
            phase: tag,
            config: self.session.draft(),
            cursor: in_menu.then(|| CursorView::new(&self.cursor, &self.cursor_cfg)),
            targets: in_menu.then(|| menu_targets(&self.session)),
            countdown_ms: match self.session.phase {
                SessionPhase::Countdown { remaining_ms, .. } => Some(remaining_ms),
                _ => None,
            },
            game: self.session.game().cloned(),
            result: match self.session.phase {
                SessionPhase::MatchOver { winner, score, .. } => Some(MatchResult { winner, score }),
                _ => None,
            },
        }
    }
}
