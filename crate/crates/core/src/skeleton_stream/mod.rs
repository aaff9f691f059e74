//! Skeletal joint frames: data model, line codec, replay files, synthetic
//! motion scripts, a live TCP source and per-joint jitter filtering.
//!
//! Coordinates live in the sensor-view box: `x` and `y` in `[-1, 1]`
//! (`+x` right, `+y` up), `z` is distance from the sensor in meters and
//! `c` is tracking confidence in `[0, 1]`.

mod codec;
mod filter;
pub mod live;
mod replay;
mod synth;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use codec::{encode_frame, parse_frame, PROTOCOL_VERSION};
pub use filter::{smooth, FrameFilter, DEFAULT_SMOOTHING_ALPHA, UNTRACKED_CONFIDENCE};
pub use replay::{open_replay, read_replay, write_replay, Replay, ReplayHeader};
pub use synth::{synth_frames, JointMotion, MotionScript, ScriptPlayer, Waveform};

/// The tracked body points the game consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum JointId {
    Head,
    HandLeft,
    HandRight,
}

impl JointId {
    pub const ALL: [JointId; 3] = [JointId::Head, JointId::HandLeft, JointId::HandRight];

    pub fn as_str(self) -> &'static str {
        match self {
            JointId::Head => "HEAD",
            JointId::HandLeft => "HAND_LEFT",
            JointId::HandRight => "HAND_RIGHT",
        }
    }
}

impl fmt::Display for JointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One tracked point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Joint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub c: f64,
}

impl Joint {
    pub const fn new(x: f64, y: f64, z: f64, c: f64) -> Self {
        Self { x, y, z, c }
    }

    /// Builds a joint after checking every range invariant.
    pub fn checked(x: f64, y: f64, z: f64, c: f64) -> Result<Self, StreamError> {
        let joint = Self { x, y, z, c };
        joint.validate()?;
        Ok(joint)
    }

    /// Clamps each field into its legal range. Non-finite values map to the
    /// nearest legal value (NaN to 0).
    pub fn clamped(x: f64, y: f64, z: f64, c: f64) -> Self {
        fn clamp(v: f64, lo: f64, hi: f64) -> f64 {
            if v.is_nan() {
                lo.max(0.0).min(hi)
            } else {
                v.clamp(lo, hi)
            }
        }
        Self {
            x: clamp(x, -1.0, 1.0),
            y: clamp(y, -1.0, 1.0),
            z: clamp(z, 0.0, f64::MAX),
            c: clamp(c, 0.0, 1.0),
        }
    }

    pub fn validate(&self) -> Result<(), StreamError> {
        check_range("x", self.x, -1.0, 1.0)?;
        check_range("y", self.y, -1.0, 1.0)?;
        check_range("z", self.z, 0.0, f64::MAX)?;
        check_range("c", self.c, 0.0, 1.0)
    }

    /// Whether the sensor reported this joint with usable confidence.
    pub fn is_tracked(&self) -> bool {
        self.c >= UNTRACKED_CONFIDENCE
    }
}

fn check_range(field: &'static str, value: f64, lo: f64, hi: f64) -> Result<(), StreamError> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(StreamError::RangeViolation {
            field: field.to_string(),
            value,
        })
    }
}

/// The three joints of one player. All three are always present.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Joints {
    pub head: Joint,
    pub hand_left: Joint,
    pub hand_right: Joint,
}

impl Joints {
    pub fn get(&self, id: JointId) -> &Joint {
        match id {
            JointId::Head => &self.head,
            JointId::HandLeft => &self.hand_left,
            JointId::HandRight => &self.hand_right,
        }
    }

    pub fn get_mut(&mut self, id: JointId) -> &mut Joint {
        match id {
            JointId::Head => &mut self.head,
            JointId::HandLeft => &mut self.hand_left,
            JointId::HandRight => &mut self.hand_right,
        }
    }

    /// Neutral standing pose two meters from the sensor.
    pub fn neutral() -> Self {
        Self {
            head: Joint::new(0.0, 0.8, 2.0, 1.0),
            hand_left: Joint::new(-0.3, 0.0, 2.0, 1.0),
            hand_right: Joint::new(0.3, 0.0, 2.0, 1.0),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (JointId, &Joint)> {
        JointId::ALL.into_iter().map(move |id| (id, self.get(id)))
    }
}

/// Player slot reported by the sensor, `0` or `1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Slot(u8);

impl Slot {
    pub const FIRST: Slot = Slot(0);
    pub const SECOND: Slot = Slot(1);

    pub fn new(slot: u8) -> Result<Self, StreamError> {
        if slot <= 1 {
            Ok(Slot(slot))
        } else {
            Err(StreamError::RangeViolation {
                field: "slot".to_string(),
                value: f64::from(slot),
            })
        }
    }

    pub fn index(self) -> usize {
        usize::from(self.0)
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl TryFrom<u8> for Slot {
    type Error = StreamError;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        Slot::new(value)
    }
}

impl From<Slot> for u8 {
    fn from(slot: Slot) -> u8 {
        slot.0
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlayerSkeleton {
    pub slot: Slot,
    pub joints: Joints,
}

/// One timestamped sample of up to two tracked players.
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonFrame {
    pub seq: u64,
    pub t_ms: u64,
    players: Vec<PlayerSkeleton>,
}

impl SkeletonFrame {
    /// Builds a frame, rejecting more than two players, duplicate slots and
    /// out-of-range joints.
    pub fn new(seq: u64, t_ms: u64, players: Vec<PlayerSkeleton>) -> Result<Self, StreamError> {
        if players.len() > 2 {
            return Err(StreamError::RangeViolation {
                field: "players".to_string(),
                value: players.len() as f64,
            });
        }
        if players.len() == 2 && players[0].slot == players[1].slot {
            return Err(StreamError::DuplicateSlot(players[0].slot.get()));
        }
        for player in &players {
            for (_, joint) in player.joints.iter() {
                joint.validate()?;
            }
        }
        Ok(Self { seq, t_ms, players })
    }

    pub fn empty(seq: u64, t_ms: u64) -> Self {
        Self {
            seq,
            t_ms,
            players: Vec::new(),
        }
    }

    pub fn players(&self) -> &[PlayerSkeleton] {
        &self.players
    }

    pub fn player(&self, slot: Slot) -> Option<&PlayerSkeleton> {
        self.players.iter().find(|p| p.slot == slot)
    }

    pub fn joint(&self, slot: Slot, id: JointId) -> Option<&Joint> {
        self.player(slot).map(|p| p.joints.get(id))
    }

    /// Overwrites one joint, inserting the player with a neutral pose when
    /// it is not present yet.
    pub fn set_joint(&mut self, slot: Slot, id: JointId, joint: Joint) -> Result<(), StreamError> {
        joint.validate()?;
        match self.players.iter_mut().find(|p| p.slot == slot) {
            Some(player) => *player.joints.get_mut(id) = joint,
            None => {
                let mut joints = Joints::neutral();
                *joints.get_mut(id) = joint;
                self.players.push(PlayerSkeleton { slot, joints });
                self.players.sort_by_key(|p| p.slot);
            }
        }
        Ok(())
    }

    /// Same content under a new sequence number and timestamp.
    pub fn restamped(&self, seq: u64, t_ms: u64) -> Self {
        Self {
            seq,
            t_ms,
            players: self.players.clone(),
        }
    }
}

#[derive(Debug, Error)]
pub enum StreamError {
    #[error("malformed record: {0}")]
    MalformedRecord(String),
    #[error("protocol version mismatch: expected {expected}, got {found}")]
    VersionMismatch { expected: u64, found: u64 },
    #[error("field `{field}` out of range: {value}")]
    RangeViolation { field: String, value: f64 },
    #[error("duplicate player slot {0}")]
    DuplicateSlot(u8),
    #[error("replay file has no header record")]
    MissingHeader,
    #[error("frame seq {seq} breaks stream monotonicity")]
    MonotonicityViolation { seq: u64 },
    #[error("motion script produces no frames")]
    EmptyScript,
    #[error("sample rate must be positive, got {0}")]
    InvalidRate(f64),
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<StreamError>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl StreamError {
    /// Strips line-number context.
    pub fn root(&self) -> &StreamError {
        match self {
            StreamError::AtLine { source, .. } => source.root(),
            other => other,
        }
    }
}

/// Checks the seq/t_ms ordering between consecutive frames.
pub fn check_monotonic(prev: &SkeletonFrame, next: &SkeletonFrame) -> Result<(), StreamError> {
    if next.seq <= prev.seq || next.t_ms < prev.t_ms {
        Err(StreamError::MonotonicityViolation { seq: next.seq })
    } else {
        Ok(())
    }
}
