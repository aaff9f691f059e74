//! Newline-delimited JSON frame records.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Joint, JointId, Joints, PlayerSkeleton, SkeletonFrame, Slot, StreamError};

pub const PROTOCOL_VERSION: u64 = 1;

#[derive(Deserialize)]
struct WireFrameIn {
    seq: u64,
    t_ms: u64,
    players: Vec<WirePlayerIn>,
}

#[derive(Deserialize)]
struct WirePlayerIn {
    slot: u64,
    joints: BTreeMap<JointId, Joint>,
}

#[derive(Serialize)]
struct WireFrameOut<'a> {
    v: u64,
    seq: u64,
    t_ms: u64,
    players: Vec<WirePlayerOut<'a>>,
}

#[derive(Serialize)]
struct WirePlayerOut<'a> {
    slot: u8,
    joints: WireJointsOut<'a>,
}

#[derive(Serialize)]
struct WireJointsOut<'a> {
    #[serde(rename = "HEAD")]
    head: &'a Joint,
    #[serde(rename = "HAND_LEFT")]
    hand_left: &'a Joint,
    #[serde(rename = "HAND_RIGHT")]
    hand_right: &'a Joint,
}

/// Checks the `v` field of a decoded record.
pub(crate) fn check_version(value: &Value) -> Result<(), StreamError> {
    match value.get("v") {
        Some(Value::Number(n)) => match n.as_u64() {
            Some(PROTOCOL_VERSION) => Ok(()),
            Some(found) => Err(StreamError::VersionMismatch {
                expected: PROTOCOL_VERSION,
                found,
            }),
            None => Err(StreamError::MalformedRecord(format!("bad version field {n}"))),
        },
        Some(other) => Err(StreamError::MalformedRecord(format!(
            "bad version field {other}"
        ))),
        None => Err(StreamError::MalformedRecord("missing version field `v`".into())),
    }
}

/// Decodes one frame record (without its trailing newline).
pub fn parse_frame(line: &str) -> Result<SkeletonFrame, StreamError> {
    let value: Value = serde_json::from_str(line.trim_end_matches(['\r', '\n']))
        .map_err(|e| StreamError::MalformedRecord(e.to_string()))?;
    if !value.is_object() {
        return Err(StreamError::MalformedRecord("record is not an object".into()));
    }
    check_version(&value)?;
    let wire: WireFrameIn =
        serde_json::from_value(value).map_err(|e| StreamError::MalformedRecord(e.to_string()))?;

    let mut players = Vec::with_capacity(wire.players.len());
    for p in wire.players {
        let slot = u8::try_from(p.slot)
            .map_err(|_| StreamError::RangeViolation {
                field: "slot".into(),
                value: p.slot as f64,
            })
            .and_then(Slot::new)?;
        let take = |id: JointId| {
            p.joints
                .get(&id)
                .copied()
                .ok_or_else(|| StreamError::MalformedRecord(format!("missing joint {id}")))
        };
        let joints = Joints {
            head: take(JointId::Head)?,
            hand_left: take(JointId::HandLeft)?,
            hand_right: take(JointId::HandRight)?,
        };
        players.push(PlayerSkeleton { slot, joints });
    }
    SkeletonFrame::new(wire.seq, wire.t_ms, players)
}

/// Encodes a frame as one canonical record, without a trailing newline.
pub fn encode_frame(frame: &SkeletonFrame) -> String {
    let out = WireFrameOut {
        v: PROTOCOL_VERSION,
        seq: frame.seq,
        t_ms: frame.t_ms,
        players: frame
            .players()
            .iter()
            .map(|p| WirePlayerOut {
                slot: p.slot.get(),
                joints: WireJointsOut {
                    head: &p.joints.head,
                    hand_left: &p.joints.hand_left,
                    hand_right: &p.joints.hand_right,
                },
            })
            .collect(),
    };
    serde_json::to_string(&out).expect("frame records always serialize")
}
