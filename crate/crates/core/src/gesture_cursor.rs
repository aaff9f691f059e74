//! Hands-free pointer: a tracked hand drives a screen cursor and holding the
//! cursor over a target for the dwell threshold selects it.
//!
//! Screen space is `(u, v)` in `[0, 1]²` with `v` growing downward, so a
//! raised hand moves the cursor up.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::menu_flow::OptionId;
use crate::skeleton_stream::{Joint, JointId, SkeletonFrame, Slot};

pub const DEFAULT_DWELL_MS: f64 = 1500.0;
pub const DEFAULT_LOST_AFTER_MS: f64 = 1000.0;

/// Slack for accumulated floating-point dwell time.
const DWELL_EPS_MS: f64 = 1e-6;

/// Sub-range of sensor space that maps onto a unit target range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionBox {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl InteractionBox {
    /// Comfortable arm reach for menu pointing.
    pub const CURSOR: InteractionBox = InteractionBox {
        x_min: -0.6,
        x_max: 0.6,
        y_min: -0.4,
        y_max: 0.6,
    };

    pub const FULL: InteractionBox = InteractionBox {
        x_min: -1.0,
        x_max: 1.0,
        y_min: -1.0,
        y_max: 1.0,
    };

    pub fn is_degenerate(&self) -> bool {
        !(self.x_max > self.x_min && self.y_max > self.y_min)
    }

    /// Horizontal position as a clamped fraction of the box width.
    pub fn fraction_x(&self, x: f64) -> f64 {
        ((x - self.x_min) / (self.x_max - self.x_min)).clamp(0.0, 1.0)
    }

    /// Vertical position as a clamped fraction of the box height, 0 at the
    /// bottom.
    pub fn fraction_y(&self, y: f64) -> f64 {
        ((y - self.y_min) / (self.y_max - self.y_min)).clamp(0.0, 1.0)
    }
}

impl Default for InteractionBox {
    fn default() -> Self {
        Self::CURSOR
    }
}

pub fn map_hand_to_screen(joint: &Joint, bx: &InteractionBox) -> (f64, f64) {
    debug_assert!(!bx.is_degenerate());
    (bx.fraction_x(joint.x), 1.0 - bx.fraction_y(joint.y))
}

/// Closed screen-space rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub u_min: f64,
    pub v_min: f64,
    pub u_max: f64,
    pub v_max: f64,
}

impl Rect {
    pub const fn new(u_min: f64, v_min: f64, u_max: f64, v_max: f64) -> Self {
        Self {
            u_min,
            v_min,
            u_max,
            v_max,
        }
    }

    pub fn contains(&self, (u, v): (f64, f64)) -> bool {
        u >= self.u_min && u <= self.u_max && v >= self.v_min && v <= self.v_max
    }

    /// Closed rectangles intersect, shared edges included.
    pub fn intersects(&self, other: &Rect) -> bool {
        self.u_min <= other.u_max
            && other.u_min <= self.u_max
            && self.v_min <= other.v_max
            && other.v_min <= self.v_max
    }

    fn is_valid(&self) -> bool {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        self.u_max > self.u_min
            && self.v_max > self.v_min
            && unit(self.u_min)
            && unit(self.u_max)
            && unit(self.v_min)
            && unit(self.v_max)
    }

    pub fn center(&self) -> (f64, f64) {
        (
            0.5 * (self.u_min + self.u_max),
            0.5 * (self.v_min + self.v_max),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub id: OptionId,
    pub rect: Rect,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CursorError {
    #[error("controlling hand untracked for more than the loss timeout")]
    NoTrackedHand(CursorState),
    #[error("target {0:?} is degenerate or leaves the screen")]
    InvalidTarget(OptionId),
    #[error("targets {0:?} and {1:?} overlap")]
    OverlappingTargets(OptionId, OptionId),
    #[error("target id {0:?} used twice")]
    DuplicateTarget(OptionId),
}

/// Rejects degenerate, overlapping or duplicate targets.
pub fn validate_targets(targets: &[Target]) -> Result<(), CursorError> {
    for (i, a) in targets.iter().enumerate() {
        if !a.rect.is_valid() {
            return Err(CursorError::InvalidTarget(a.id));
        }
        for b in &targets[i + 1..] {
            if a.id == b.id {
                return Err(CursorError::DuplicateTarget(a.id));
            }
            if a.rect.intersects(&b.rect) {
                return Err(CursorError::OverlappingTargets(a.id, b.id));
            }
        }
    }
    Ok(())
}

/// Id of the target containing `pos`. Targets are assumed non-overlapping.
pub fn hit_test(pos: (f64, f64), targets: &[Target]) -> Option<OptionId> {
    targets.iter().find(|t| t.rect.contains(pos)).map(|t| t.id)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CursorConfig {
    pub slot: Slot,
    pub hand: JointId,
    pub dwell_ms: f64,
    pub lost_after_ms: f64,
    pub interaction_box: InteractionBox,
}

impl Default for CursorConfig {
    fn default() -> Self {
        Self {
            slot: Slot::FIRST,
            hand: JointId::HandRight,
            dwell_ms: DEFAULT_DWELL_MS,
            lost_after_ms: DEFAULT_LOST_AFTER_MS,
            interaction_box: InteractionBox::CURSOR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CursorState {
    pub pos: (f64, f64),
    pub visible: bool,
    pub hovered: Option<OptionId>,
    pub dwell_ms: f64,
    /// Set only on the update that selects.
    pub emitted: Option<OptionId>,
    /// Latched after a selection until the hover run ends.
    pub fired: bool,
    pub untracked_ms: f64,
}

impl Default for CursorState {
    fn default() -> Self {
        Self {
            pos: (0.5, 0.5),
            visible: false,
            hovered: None,
            dwell_ms: 0.0,
            emitted: None,
            fired: false,
            untracked_ms: 0.0,
        }
    }
}

impl CursorState {
    /// Clears hover progress, e.g. when the menu changes under the cursor.
    pub fn reset_dwell(&mut self) {
        self.hovered = None;
        self.dwell_ms = 0.0;
        self.fired = false;
        self.emitted = None;
    }

    /// Fraction of the dwell threshold reached, for progress rings.
    pub fn progress(&self, cfg: &CursorConfig) -> f64 {
        (self.dwell_ms / cfg.dwell_ms).clamp(0.0, 1.0)
    }
}

/// Advances the cursor by one update.
///
/// Each update spent over the same target adds `dt_ms`, the entering update
/// included. When the total reaches `cfg.dwell_ms` the target is emitted once;
/// further selection requires leaving the target. A controlling hand that
/// stays untracked for longer than `cfg.lost_after_ms` hides the cursor and
/// yields [`CursorError::NoTrackedHand`] carrying the hidden state.
pub fn update_cursor(
    state: &CursorState,
    frame: &SkeletonFrame,
    targets: &[Target],
    dt_ms: f64,
    cfg: &CursorConfig,
) -> Result<CursorState, CursorError> {
    debug_assert!(dt_ms > 0.0);
    let mut next = state.clone();
    next.emitted = None;

    match frame.joint(cfg.slot, cfg.hand).filter(|j| j.is_tracked()) {
        Some(hand) => {
            next.pos = map_hand_to_screen(hand, &cfg.interaction_box);
            next.visible = true;
            next.untracked_ms = 0.0;
        }
        None => {
            next.untracked_ms += dt_ms;
            if next.untracked_ms > cfg.lost_after_ms {
                next.visible = false;
                next.reset_dwell();
                return Err(CursorError::NoTrackedHand(next));
            }
        }
    }

    let hit = if next.visible {
        hit_test(next.pos, targets)
    } else {
        None
    };
    if hit != next.hovered {
        next.hovered = hit;
        next.dwell_ms = 0.0;
        next.fired = false;
    }
    if next.fired {
        next.dwell_ms = 0.0;
    } else if next.hovered.is_some() {
        next.dwell_ms += dt_ms;
        if next.dwell_ms + DWELL_EPS_MS >= cfg.dwell_ms {
            next.emitted = next.hovered;
            next.fired = true;
        }
    }
    Ok(next)
}
