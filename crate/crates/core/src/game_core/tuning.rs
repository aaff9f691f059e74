use serde::{Deserialize, Serialize};

use super::{BodyPart, Difficulty};
use crate::gesture_cursor::InteractionBox;

/// Gameplay constants. Every field can be overridden from a JSON config
/// file; missing fields keep their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GameTuning {
    pub tick_hz: f64,
    pub base_speed_easy: f64,
    pub base_speed_hard: f64,
    /// Rally speed multiplier per paddle hit.
    pub hit_acceleration: f64,
    /// Rally speed cap as a multiple of the base speed.
    pub max_speed_factor: f64,
    pub half_height_hand: f64,
    pub half_height_head: f64,
    pub max_deflection_deg: f64,
    pub lives: u32,
    pub serve_delay_ms: f64,
    pub max_serve_angle_deg: f64,
    pub human_paddle_speed: f64,
    pub ai_speed_easy: f64,
    pub ai_speed_hard: f64,
    pub ai_deadband: f64,
    /// Distance of each paddle face from its goal line.
    pub paddle_inset: f64,
    /// Sensor range mapped onto paddle travel when playing with a hand.
    pub hand_box: InteractionBox,
    /// Sensor range mapped onto paddle travel when playing with the head.
    pub head_box: InteractionBox,
}

impl Default for GameTuning {
    fn default() -> Self {
        Self {
            tick_hz: 60.0,
            base_speed_easy: 0.50,
            base_speed_hard: 0.80,
            hit_acceleration: 1.05,
            max_speed_factor: 2.0,
            half_height_hand: 0.10,
            half_height_head: 0.06,
            max_deflection_deg: 60.0,
            lives: 3,
            serve_delay_ms: 1000.0,
            max_serve_angle_deg: 30.0,
            human_paddle_speed: 3.0,
            ai_speed_easy: 0.40,
            ai_speed_hard: 0.70,
            ai_deadband: 0.02,
            paddle_inset: 0.05,
            hand_box: InteractionBox {
                x_min: -0.6,
                x_max: 0.6,
                y_min: -0.5,
                y_max: 0.5,
            },
            head_box: InteractionBox {
                x_min: -0.6,
                x_max: 0.6,
                y_min: 0.5,
                y_max: 1.0,
            },
        }
    }
}

impl GameTuning {
    pub fn dt(&self) -> f64 {
        1.0 / self.tick_hz
    }

    pub fn base_speed(&self, difficulty: Difficulty) -> f64 {
        match difficulty {
            Difficulty::Easy => self.base_speed_easy,
            Difficulty::Hard => self.base_speed_hard,
        }
    }

    pub fn max_speed(&self, difficulty: Difficulty) -> f64 {
        self.max_speed_factor * self.base_speed(difficulty)
    }

    pub fn ai_speed(&self, difficulty: Difficulty) -> f64 {
        match difficulty {
            Difficulty::Easy => self.ai_speed_easy,
            Difficulty::Hard => self.ai_speed_hard,
        }
    }

    pub fn half_height(&self, body_part: BodyPart) -> f64 {
        match body_part {
            BodyPart::Hand => self.half_height_hand,
            BodyPart::Head => self.half_height_head,
        }
    }

    pub fn body_box(&self, body_part: BodyPart) -> &InteractionBox {
        match body_part {
            BodyPart::Hand => &self.hand_box,
            BodyPart::Head => &self.head_box,
        }
    }

    pub fn serve_delay_ticks(&self) -> u32 {
        ((self.serve_delay_ms * self.tick_hz / 1000.0).round() as u32).max(1)
    }

    pub fn face_x(&self, side: super::Side) -> f64 {
        match side {
            super::Side::Left => self.paddle_inset,
            super::Side::Right => 1.0 - self.paddle_inset,
        }
    }
}
