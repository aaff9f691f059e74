//! Paddle targets from tracked joints and from the computer opponent.

use serde::{Deserialize, Serialize};

use super::{BodyPart, GameTuning, MatchPhase, MatchState, PlayerCount, Side};
use crate::skeleton_stream::{JointId, PlayerSkeleton, SkeletonFrame, Slot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum InputSource {
    Joint,
    Ai,
    Emulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideInput {
    /// Desired paddle center; `None` holds the current position.
    pub target: Option<f64>,
    pub source: InputSource,
}

impl SideInput {
    pub const AI: SideInput = SideInput {
        target: None,
        source: InputSource::Ai,
    };

    pub fn joint(target: Option<f64>) -> Self {
        Self {
            target,
            source: InputSource::Joint,
        }
    }

    pub fn emulated(target: f64) -> Self {
        Self {
            target: Some(target),
            source: InputSource::Emulated,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PaddleInputs {
    pub left: SideInput,
    pub right: SideInput,
}

impl PaddleInputs {
    pub fn hold() -> Self {
        Self {
            left: SideInput::joint(None),
            right: SideInput::joint(None),
        }
    }

    pub fn get(&self, side: Side) -> &SideInput {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    /// Reads both paddles from a frame whose slots are already mapped to
    /// sides. The right side is the computer in one-player matches.
    pub fn from_frame(frame: &SkeletonFrame, state: &MatchState) -> Self {
        let body = state.config.body_part;
        let left = SideInput::joint(paddle_target_from_joint(frame, Side::Left, body, &state.tuning));
        let right = match state.config.num_players {
            PlayerCount::One => SideInput::AI,
            PlayerCount::Two => {
                SideInput::joint(paddle_target_from_joint(frame, Side::Right, body, &state.tuning))
            }
        };
        Self { left, right }
    }

    /// One-player matches always hand the right paddle to the computer.
    pub(super) fn normalized(&self, players: PlayerCount) -> Self {
        match players {
            PlayerCount::One => Self {
                left: self.left,
                right: SideInput::AI,
            },
            PlayerCount::Two => *self,
        }
    }
}

fn slot_for(side: Side) -> Slot {
    match side {
        Side::Left => Slot::FIRST,
        Side::Right => Slot::SECOND,
    }
}

/// The hand nearer the middle of the screen for a player on `side`.
fn inner_hand(side: Side) -> JointId {
    match side {
        Side::Left => JointId::HandRight,
        Side::Right => JointId::HandLeft,
    }
}

/// Paddle center requested by the player on `side`, or `None` when that
/// player or joint is missing or untracked.
///
/// Slot 0 plays left and slot 1 plays right. The joint height is mapped
/// from the body part's interaction box onto the paddle's travel range.
pub fn paddle_target_from_joint(
    frame: &SkeletonFrame,
    side: Side,
    body_part: BodyPart,
    tuning: &GameTuning,
) -> Option<f64> {
    let joint_id = match body_part {
        BodyPart::Head => JointId::Head,
        BodyPart::Hand => inner_hand(side),
    };
    let joint = frame.joint(slot_for(side), joint_id)?;
    if !joint.is_tracked() {
        return None;
    }
    let half_h = tuning.half_height(body_part);
    let frac = tuning.body_box(body_part).fraction_y(joint.y);
    Some(half_h + (1.0 - 2.0 * half_h) * frac)
}

/// Where the computer wants its paddle: on the ball's height while the ball
/// approaches, back to center otherwise.
pub fn ai_paddle_target(state: &MatchState, side: Side) -> f64 {
    let approaching = match side {
        Side::Left => state.ball.vel.x < 0.0,
        Side::Right => state.ball.vel.x > 0.0,
    };
    if state.phase == MatchPhase::Rally && approaching {
        state.ball.pos.y
    } else {
        0.5
    }
}

/// Sensor slot to field side assignment, fixed at match start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideMap {
    pub left: Slot,
    pub right: Slot,
}

impl Default for SideMap {
    fn default() -> Self {
        Self {
            left: Slot::FIRST,
            right: Slot::SECOND,
        }
    }
}

impl SideMap {
    /// Orders players by head `x`: the leftmost player takes the left
    /// paddle. A lone player always plays left.
    pub fn from_frame(frame: &SkeletonFrame) -> Self {
        match frame.players() {
            [only] => Self {
                left: only.slot,
                right: if only.slot == Slot::FIRST {
                    Slot::SECOND
                } else {
                    Slot::FIRST
                },
            },
            [a, b] => {
                let (l, r) = if a.joints.head.x <= b.joints.head.x {
                    (a, b)
                } else {
                    (b, a)
                };
                Self {
                    left: l.slot,
                    right: r.slot,
                }
            }
            _ => Self::default(),
        }
    }

    /// Relabels players so the left player becomes slot 0 and the right
    /// player slot 1.
    pub fn apply(&self, frame: &SkeletonFrame) -> SkeletonFrame {
        if *self == Self::default() {
            return frame.clone();
        }
        let mut players: Vec<PlayerSkeleton> = frame
            .players()
            .iter()
            .map(|p| PlayerSkeleton {
                slot: if p.slot == self.left {
                    Slot::FIRST
                } else {
                    Slot::SECOND
                },
                joints: p.joints,
            })
            .collect();
        players.sort_by_key(|p| p.slot);
        SkeletonFrame::new(frame.seq, frame.t_ms, players).expect("relabeling keeps slots unique")
    }
}
