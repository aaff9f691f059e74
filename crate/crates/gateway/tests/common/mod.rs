#![allow(dead_code)]

use std::collections::BTreeMap;

use avg_core::menu_flow::OptionId;
use avg_core::skeleton_stream::{
    synth_frames, JointId, JointMotion, MotionScript, ScriptPlayer, SkeletonFrame, Slot, Waveform,
};
use avg_pong::{ClientEvent, LoggedEvent};

pub fn constant(value: f64) -> Option<Waveform> {
    Some(Waveform::Constant { value })
}

/// One player whose joint holds still at `(x, y)`.
pub fn still_joint(duration_ms: u64, slot: Slot, joint: JointId, x: f64, y: f64) -> MotionScript {
    MotionScript::single(
        duration_ms,
        slot,
        joint,
        JointMotion {
            x: constant(x),
            y: constant(y),
            ..Default::default()
        },
    )
}

/// One player swinging `joint` up and down around `y = 0`.
pub fn swinging_joint(duration_ms: u64, slot: Slot, joint: JointId, amplitude: f64, period_ms: f64) -> MotionScript {
    MotionScript {
        duration_ms,
        players: vec![ScriptPlayer {
            slot,
            joints: BTreeMap::from([(
                joint,
                JointMotion {
                    y: Some(Waveform::Sine {
                        amplitude,
                        period_ms,
                        phase: 0.0,
                        offset: 0.0,
                    }),
                    ..Default::default()
                },
            )]),
        }],
    }
}

pub fn frames(script: &MotionScript, rate_hz: f64) -> Vec<SkeletonFrame> {
    synth_frames(script, rate_hz).expect("test scripts are valid")
}

/// Menu overrides that configure a match on tick `tick`.
pub fn menu_picks(tick: u64, options: &[OptionId]) -> Vec<LoggedEvent> {
    options
        .iter()
        .map(|&option| LoggedEvent {
            tick,
            event: ClientEvent::MenuOverride { option },
        })
        .collect()
}

pub fn one_player(difficulty: OptionId, body: OptionId) -> Vec<LoggedEvent> {
    menu_picks(0, &[OptionId::Start, OptionId::OnePlayer, difficulty, body])
}
