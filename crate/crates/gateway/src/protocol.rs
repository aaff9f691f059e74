//! JSON messages on the client channel. Every message is one text frame
//! carrying an object with a `"type"` field.

use avg_core::game_core::{ConfigDraft, MatchState, Score, Side};
use avg_core::gesture_cursor::{CursorConfig, CursorState, Target};
use avg_core::menu_flow::{OptionId, PhaseTag};
use avg_core::skeleton_stream::{Joint, JointId, Slot, StreamError, PROTOCOL_VERSION};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Depth and confidence given to joints that come from a client instead of
/// the sensor.
pub const EMULATED_DEPTH: f64 = 2.0;
pub const EMULATED_CONFIDENCE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientEvent {
    Hello {
        v: u64,
    },
    /// Keyboard or mouse stand-in for a sensor joint.
    EmulatedJoint {
        slot: Slot,
        joint: JointId,
        x: f64,
        y: f64,
    },
    /// Selects a menu option directly, as if by dwell.
    MenuOverride {
        option: OptionId,
    },
    Ping,
}

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("malformed message: {0}")]
    Malformed(String),
    #[error("protocol version mismatch: expected {expected}, got {found}")]
    VersionMismatch { expected: u64, found: u64 },
    #[error(transparent)]
    Range(#[from] StreamError),
}

impl ClientEvent {
    /// Parses and validates one client message.
    pub fn parse(text: &str) -> Result<Self, ProtocolError> {
        let event: ClientEvent =
            serde_json::from_str(text).map_err(|e| ProtocolError::Malformed(e.to_string()))?;
        match event {
            // Unit variants of an internally tagged enum ignore extra keys.
            ClientEvent::Ping if !text.trim().eq(r#"{"type":"ping"}"#) => {
                let value: serde_json::Value = serde_json::from_str(text)
                    .map_err(|e| ProtocolError::Malformed(e.to_string()))?;
                match value.as_object() {
                    Some(obj) if obj.len() == 1 => Ok(event),
                    _ => Err(ProtocolError::Malformed("unexpected fields in ping".into())),
                }
            }
            ClientEvent::Hello { v } if v != PROTOCOL_VERSION => Err(ProtocolError::VersionMismatch {
                expected: PROTOCOL_VERSION,
                found: v,
            }),
            ClientEvent::EmulatedJoint { x, y, .. } => {
                Joint::checked(x, y, EMULATED_DEPTH, EMULATED_CONFIDENCE)?;
                Ok(event)
            }
            _ => Ok(event),
        }
    }

    /// Whether the event changes engine state, and so belongs in the event
    /// log.
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            ClientEvent::EmulatedJoint { .. } | ClientEvent::MenuOverride { .. }
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("client events always serialize")
    }
}

/// Messages the server sends besides snapshots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Hello { v: u64, tick_hz: f64 },
    Error { message: String },
    Pong,
}

impl ServerMessage {
    pub fn hello(tick_hz: f64) -> Self {
        ServerMessage::Hello {
            v: PROTOCOL_VERSION,
            tick_hz,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("server messages always serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CursorView {
    pub pos: (f64, f64),
    pub visible: bool,
    pub hovered: Option<OptionId>,
    pub dwell_ms: f64,
    /// Dwell progress in `[0, 1]`.
    pub progress: f64,
}

impl CursorView {
    pub fn new(state: &CursorState, cfg: &CursorConfig) -> Self {
        Self {
            pos: state.pos,
            visible: state.visible,
            hovered: state.hovered,
            dwell_ms: state.dwell_ms,
            progress: state.progress(cfg),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub winner: Side,
    pub score: Score,
}

/// Engine state after one tick, as broadcast to clients.
///
/// Field order is fixed and optional parts are omitted rather than sent as
/// `null`, so equal states always serialize to equal bytes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snapshot {
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub v: u64,
    pub tick: u64,
    pub t_ms: u64,
    pub phase: PhaseTag,
    pub config: ConfigDraft,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cursor: Option<CursorView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<Target>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub countdown_ms: Option<f64>,
    #[serde(rename = "match", skip_serializing_if = "Option::is_none")]
    pub game: Option<MatchState>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<MatchResult>,
}

impl Snapshot {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("snapshots always serialize")
    }
}

/// Hex SHA-256 of a serialized snapshot.
pub fn snapshot_hash(json: &str) -> String {
    hex::encode(Sha256::digest(json.as_bytes()))
}
