//! Optional JSON config file: gameplay constants plus a few session knobs.

use std::path::Path;

use avg_core::activity_metrics::DEFAULT_SPEED_THRESHOLD;
use avg_core::game_core::GameTuning;
use avg_core::gesture_cursor::{CursorConfig, DEFAULT_DWELL_MS};
use avg_core::skeleton_stream::DEFAULT_SMOOTHING_ALPHA;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SessionConfig {
    #[serde(flatten)]
    pub tuning: GameTuning,
    pub dwell_ms: f64,
    pub smoothing_alpha: f64,
    pub speed_threshold: f64,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            tuning: GameTuning::default(),
            dwell_ms: DEFAULT_DWELL_MS,
            smoothing_alpha: DEFAULT_SMOOTHING_ALPHA,
            speed_threshold: DEFAULT_SPEED_THRESHOLD,
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid config: {0}")]
    Parse(String),
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("config value `{0}` out of range")]
    OutOfRange(&'static str),
}

impl SessionConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let raw: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let obj = raw
            .as_object()
            .ok_or_else(|| ConfigError::Parse("config must be a JSON object".into()))?;
        let cfg: SessionConfig =
            serde_json::from_value(raw.clone()).map_err(|e| ConfigError::Parse(e.to_string()))?;
        // flattened structs cannot deny unknown fields, so compare key sets
        let known = serde_json::to_value(&cfg).expect("config serializes");
        if let Some(key) = obj.keys().find(|k| known.get(k.as_str()).is_none()) {
            return Err(ConfigError::UnknownKey(key.clone()));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let t = &self.tuning;
        let positive = |v: f64| v.is_finite() && v > 0.0;
        let checks: [(&'static str, bool); 12] = [
            ("tick_hz", positive(t.tick_hz)),
            ("base_speed_easy", positive(t.base_speed_easy)),
            ("base_speed_hard", positive(t.base_speed_hard)),
            ("hit_acceleration", t.hit_acceleration >= 1.0),
            ("max_speed_factor", t.max_speed_factor >= 1.0),
            ("half_height_hand", positive(t.half_height_hand) && t.half_height_hand < 0.5),
            ("half_height_head", positive(t.half_height_head) && t.half_height_head < 0.5),
            ("lives", t.lives > 0),
            ("paddle_inset", t.paddle_inset >= 0.0 && t.paddle_inset < 0.5),
            ("dwell_ms", positive(self.dwell_ms)),
            (
                "smoothing_alpha",
                self.smoothing_alpha > 0.0 && self.smoothing_alpha <= 1.0,
            ),
            ("speed_threshold", self.speed_threshold >= 0.0),
        ];
        match checks.iter().find(|(_, ok)| !ok) {
            Some((name, _)) => Err(ConfigError::OutOfRange(name)),
            None => Ok(()),
        }
    }

    pub fn cursor(&self) -> CursorConfig {
        CursorConfig {
            dwell_ms: self.dwell_ms,
            ..CursorConfig::default()
        }
    }
}
