use std::collections::BTreeMap;

use super::{Joint, JointId, PlayerSkeleton, SkeletonFrame, Slot};

pub const DEFAULT_SMOOTHING_ALPHA: f64 = 0.5;

/// Joints reported below this confidence are treated as dropouts.
pub const UNTRACKED_CONFIDENCE: f64 = 0.2;

/// Exponential smoothing of one joint. `c` is taken from `next` unchanged.
pub fn smooth(prev: &Joint, next: &Joint, alpha: f64) -> Joint {
    debug_assert!(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
    let mix = |a: f64, b: f64| alpha * b + (1.0 - alpha) * a;
    Joint {
        x: mix(prev.x, next.x),
        y: mix(prev.y, next.y),
        z: mix(prev.z, next.z),
        c: next.c,
    }
}

/// Per-joint smoothing with dropout hold.
///
/// Tracked samples are blended into the last good value. Untracked samples
/// (`c` below [`UNTRACKED_CONFIDENCE`]) keep the last good coordinates but
/// carry the low confidence through, so consumers can still tell the joint
/// is lost.
#[derive(Debug, Clone)]
pub struct FrameFilter {
    alpha: f64,
    last_good: BTreeMap<(Slot, JointId), Joint>,
}

impl FrameFilter {
    pub fn new(alpha: f64) -> Self {
        assert!(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
        Self {
            alpha,
            last_good: BTreeMap::new(),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn reset(&mut self) {
        self.last_good.clear();
    }

    pub fn apply(&mut self, frame: &SkeletonFrame) -> SkeletonFrame {
        let mut players = Vec::with_capacity(frame.players().len());
        for player in frame.players() {
            let mut joints = player.joints;
            for id in JointId::ALL {
                let raw = *player.joints.get(id);
                let key = (player.slot, id);
                let out = match (raw.is_tracked(), self.last_good.get(&key)) {
                    (true, Some(prev)) => smooth(prev, &raw, self.alpha),
                    (true, None) => raw,
                    (false, Some(prev)) => Joint { c: raw.c, ..*prev },
                    (false, None) => raw,
                };
                if raw.is_tracked() {
                    self.last_good.insert(key, out);
                }
                *joints.get_mut(id) = out;
            }
            players.push(PlayerSkeleton {
                slot: player.slot,
                joints,
            });
        }
        SkeletonFrame::new(frame.seq, frame.t_ms, players)
            .expect("filtered joints are convex combinations of valid joints")
    }
}

impl Default for FrameFilter {
    fn default() -> Self {
        Self::new(DEFAULT_SMOOTHING_ALPHA)
    }
}
