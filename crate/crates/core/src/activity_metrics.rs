//! Movement summaries of joint streams: how far and how often each tracked
//! joint moved. Distances are in sensor-box units, in the `(x, y)` plane.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::skeleton_stream::{JointId, SkeletonFrame, Slot};

pub const DEFAULT_SPEED_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointActivity {
    pub slot: Slot,
    pub joint: JointId,
    pub samples: usize,
    pub path_length: f64,
    /// Path length over the whole session duration, in units per second.
    pub mean_speed: f64,
    /// Share of inter-sample intervals faster than the threshold.
    pub active_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivityReport {
    pub duration_ms: u64,
    pub speed_threshold: f64,
    /// Sorted by slot, then joint.
    pub joints: Vec<JointActivity>,
}

impl ActivityReport {
    pub fn get(&self, slot: Slot, joint: JointId) -> Option<&JointActivity> {
        self.joints
            .iter()
            .find(|j| j.slot == slot && j.joint == joint)
    }

    fn keys(&self) -> Vec<(Slot, JointId)> {
        self.joints.iter().map(|j| (j.slot, j.joint)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("need at least two frames, got {0}")]
    TooFewFrames(usize),
    #[error("frame timestamps go backwards at seq {0}")]
    NonMonotonic(u64),
    #[error("reports cover different joints")]
    KeyMismatch,
}

#[derive(Default)]
struct Acc {
    samples: usize,
    path: f64,
    active: usize,
    last: Option<(u64, f64, f64)>,
}

pub fn summarize(frames: &[SkeletonFrame], speed_threshold: f64) -> Result<ActivityReport, MetricsError> {
    if frames.len() < 2 {
        return Err(MetricsError::TooFewFrames(frames.len()));
    }
    if let Some(w) = frames.windows(2).find(|w| w[1].t_ms < w[0].t_ms) {
        return Err(MetricsError::NonMonotonic(w[1].seq));
    }

    let mut acc: BTreeMap<(Slot, JointId), Acc> = BTreeMap::new();
    for frame in frames {
        for player in frame.players() {
            for (id, joint) in player.joints.iter() {
                let a = acc.entry((player.slot, id)).or_default();
                a.samples += 1;
                if let Some((t0, x0, y0)) = a.last {
                    let d = (joint.x - x0).hypot(joint.y - y0);
                    a.path += d;
                    let dt_s = (frame.t_ms - t0) as f64 / 1000.0;
                    let fast = if dt_s > 0.0 {
                        d / dt_s > speed_threshold
                    } else {
                        d > 0.0
                    };
                    if fast {
                        a.active += 1;
                    }
                }
                a.last = Some((frame.t_ms, joint.x, joint.y));
            }
        }
    }

    let duration_ms = frames[frames.len() - 1].t_ms - frames[0].t_ms;
    let duration_s = duration_ms as f64 / 1000.0;
    let joints = acc
        .into_iter()
        .map(|((slot, joint), a)| JointActivity {
            slot,
            joint,
            samples: a.samples,
            path_length: a.path,
            mean_speed: if duration_s > 0.0 { a.path / duration_s } else { 0.0 },
            active_fraction: if a.samples > 1 {
                a.active as f64 / (a.samples - 1) as f64
            } else {
                0.0
            },
        })
        .collect();
    Ok(ActivityReport {
        duration_ms,
        speed_threshold,
        joints,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivityRatio {
    pub slot: Slot,
    pub joint: JointId,
    /// `b / a`; `None` when `a` is zero.
    pub path_ratio: Option<f64>,
    pub active_ratio: Option<f64>,
}

/// Per-joint ratios of `b` relative to `a`.
pub fn compare(a: &ActivityReport, b: &ActivityReport) -> Result<Vec<ActivityRatio>, MetricsError> {
    if a.keys() != b.keys() {
        return Err(MetricsError::KeyMismatch);
    }
    let ratio = |num: f64, den: f64| (den != 0.0).then(|| num / den);
    Ok(a.joints
        .iter()
        .zip(&b.joints)
        .map(|(ja, jb)| ActivityRatio {
            slot: ja.slot,
            joint: ja.joint,
            path_ratio: ratio(jb.path_length, ja.path_length),
            active_ratio: ratio(jb.active_fraction, ja.active_fraction),
        })
        .collect())
}
