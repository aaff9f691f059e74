//! Deterministic synthetic joint streams driven by simple waveforms.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{Joint, JointId, Joints, PlayerSkeleton, SkeletonFrame, Slot, StreamError};

/// Time profile of a single coordinate. Times are in milliseconds from
/// stream start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Waveform {
    Constant {
        value: f64,
    },
    /// Straight ramp from `start` at t = 0 to `end` at the script duration.
    Linear {
        start: f64,
        end: f64,
    },
    Sine {
        amplitude: f64,
        period_ms: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        offset: f64,
    },
}

impl Waveform {
    pub fn sample(&self, t_ms: f64, duration_ms: f64) -> f64 {
        match *self {
            Waveform::Constant { value } => value,
            Waveform::Linear { start, end } => {
                if duration_ms <= 0.0 {
                    start
                } else {
                    start + (end - start) * (t_ms / duration_ms)
                }
            }
            Waveform::Sine {
                amplitude,
                period_ms,
                phase,
                offset,
            } => offset + amplitude * (TAU * t_ms / period_ms + phase).sin(),
        }
    }
}

/// Per-coordinate waveforms for one joint. Unset coordinates hold the
/// neutral pose value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct JointMotion {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Waveform>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Waveform>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Waveform>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Waveform>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptPlayer {
    pub slot: Slot,
    #[serde(default)]
    pub joints: BTreeMap<JointId, JointMotion>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionScript {
    pub duration_ms: u64,
    pub players: Vec<ScriptPlayer>,
}

impl MotionScript {
    /// Single player with one animated joint.
    pub fn single(duration_ms: u64, slot: Slot, joint: JointId, motion: JointMotion) -> Self {
        Self {
            duration_ms,
            players: vec![ScriptPlayer {
                slot,
                joints: BTreeMap::from([(joint, motion)]),
            }],
        }
    }

    pub fn frame_count(&self, rate_hz: f64) -> usize {
        (self.duration_ms as f64 * rate_hz / 1000.0).floor() as usize
    }

    fn sample_player(&self, player: &ScriptPlayer, t_ms: f64) -> Joints {
        let duration = self.duration_ms as f64;
        let mut joints = Joints::neutral();
        for (id, motion) in &player.joints {
            let base = *joints.get(*id);
            let eval = |w: &Option<Waveform>, default: f64| {
                w.as_ref().map_or(default, |w| w.sample(t_ms, duration))
            };
            *joints.get_mut(*id) = Joint::clamped(
                eval(&motion.x, base.x),
                eval(&motion.y, base.y),
                eval(&motion.z, base.z),
                eval(&motion.c, base.c),
            );
        }
        joints
    }
}

/// Samples `script` at `rate_hz`. Frame `i` is stamped
/// `t_ms = floor(i * 1000 / rate_hz)` and waveforms are evaluated at that
/// stamp, so the output is a pure function of its inputs.
pub fn synth_frames(script: &MotionScript, rate_hz: f64) -> Result<Vec<SkeletonFrame>, StreamError> {
    if !(rate_hz.is_finite() && rate_hz > 0.0) {
        return Err(StreamError::InvalidRate(rate_hz));
    }
    let count = script.frame_count(rate_hz);
    if count == 0 || script.players.is_empty() {
        return Err(StreamError::EmptyScript);
    }
    let mut slots: Vec<Slot> = script.players.iter().map(|p| p.slot).collect();
    slots.sort();
    if let Some(w) = slots.windows(2).find(|w| w[0] == w[1]) {
        return Err(StreamError::DuplicateSlot(w[0].get()));
    }
    if slots.len() > 2 {
        return Err(StreamError::RangeViolation {
            field: "players".into(),
            value: slots.len() as f64,
        });
    }

    (0..count)
        .map(|i| {
            let t_ms = (i as f64 * 1000.0 / rate_hz).floor() as u64;
            let players = script
                .players
                .iter()
                .map(|p| PlayerSkeleton {
                    slot: p.slot,
                    joints: script.sample_player(p, t_ms as f64),
                })
                .collect();
            SkeletonFrame::new(i as u64, t_ms, players)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hand_y(w: Waveform, duration_ms: u64) -> MotionScript {
        MotionScript::single(
            duration_ms,
            Slot::FIRST,
            JointId::HandRight,
            JointMotion {
                y: Some(w),
                ..Default::default()
            },
        )
    }

    #[test]
    fn constant_script_at_60hz() {
        let frames = synth_frames(&hand_y(Waveform::Constant { value: 0.2 }, 1000), 60.0).unwrap();
        assert_eq!(frames.len(), 60);
        // floor(i * 1000 / 60) by hand
        let expected_t: [u64; 7] = [0, 16, 33, 50, 66, 83, 100];
        for (f, t) in frames.iter().zip(expected_t) {
            assert_eq!(f.t_ms, t);
        }
        assert_eq!(frames[59].t_ms, 983);
        let first = frames[0].players()[0].joints;
        assert!(frames.iter().all(|f| f.players()[0].joints == first));
        assert_eq!(first.hand_right.y, 0.2);
    }

    #[test]
    fn linear_ramp_crosses_zero_midway() {
        let frames = synth_frames(
            &hand_y(Waveform::Linear { start: -1.0, end: 1.0 }, 1000),
            60.0,
        )
        .unwrap();
        let mid = frames
            .iter()
            .min_by_key(|f| (f.t_ms as i64 - 500).abs())
            .unwrap();
        let y = mid.joint(Slot::FIRST, JointId::HandRight).unwrap().y;
        assert!(y.abs() <= 2.0 / 60.0, "y = {y} at t = {}", mid.t_ms);
    }

    #[test]
    fn sine_is_clamped() {
        let frames = synth_frames(
            &hand_y(
                Waveform::Sine {
                    amplitude: 2.0,
                    period_ms: 1000.0,
                    phase: 0.0,
                    offset: 0.0,
                },
                2000,
            ),
            60.0,
        )
        .unwrap();
        let ys: Vec<f64> = frames
            .iter()
            .map(|f| f.joint(Slot::FIRST, JointId::HandRight).unwrap().y)
            .collect();
        assert!(ys.iter().all(|y| (-1.0..=1.0).contains(y)));
        assert!(ys.contains(&1.0));
        assert!(ys.iter().any(|&y| y == -1.0));
    }

    #[test]
    fn empty_scripts_are_rejected() {
        assert!(matches!(
            synth_frames(&hand_y(Waveform::Constant { value: 0.0 }, 0), 60.0),
            Err(StreamError::EmptyScript)
        ));
        let none = MotionScript {
            duration_ms: 1000,
            players: vec![],
        };
        assert!(matches!(synth_frames(&none, 60.0), Err(StreamError::EmptyScript)));
        assert!(matches!(
            synth_frames(&hand_y(Waveform::Constant { value: 0.0 }, 1000), 0.0),
            Err(StreamError::InvalidRate(_))
        ));
    }

    #[test]
    fn script_json_shape() {
        let json = r#"{"duration_ms":500,"players":[{"slot":0,"joints":{"HAND_RIGHT":{"y":{"kind":"sine","amplitude":0.5,"period_ms":1000}}}}]}"#;
        let script: MotionScript = serde_json::from_str(json).unwrap();
        assert_eq!(script.players[0].slot, Slot::FIRST);
        assert_eq!(synth_frames(&script, 30.0).unwrap().len(), 15);
    }
}
