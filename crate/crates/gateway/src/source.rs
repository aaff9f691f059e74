//! Frame sources selected on the command line.

use std::collections::VecDeque;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use avg_core::skeleton_stream::live::LiveSource;
use avg_core::skeleton_stream::{open_replay, synth_frames, MotionScript, SkeletonFrame, StreamError};
use thiserror::Error;
use tracing::warn;

/// Frame rate of synthetic sources unless overridden.
pub const DEFAULT_SYNTH_RATE_HZ: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceSpec {
    Replay(PathBuf),
    Synth(PathBuf),
    Tcp(String),
}

impl FromStr for SourceSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| format!("expected replay:<path>, synth:<script.json> or tcp:<host:port>, got `{s}`"))?;
        if rest.is_empty() {
            return Err(format!("empty {kind} source"));
        }
        match kind {
            "replay" => Ok(SourceSpec::Replay(rest.into())),
            "synth" => Ok(SourceSpec::Synth(rest.into())),
            "tcp" => Ok(SourceSpec::Tcp(rest.to_string())),
            other => Err(format!("unknown source kind `{other}`")),
        }
    }
}

impl fmt::Display for SourceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceSpec::Replay(p) => write!(f, "replay:{}", p.display()),
            SourceSpec::Synth(p) => write!(f, "synth:{}", p.display()),
            SourceSpec::Tcp(a) => write!(f, "tcp:{a}"),
        }
    }
}

#[derive(Debug, Error)]
#[error("source {spec} unavailable: {reason}")]
pub struct SourceUnavailable {
    pub spec: String,
    pub reason: String,
}

pub trait FrameSource: Send {
    /// Frames due by stream time `now_ms`, in stream order.
    fn poll(&mut self, now_ms: u64) -> Vec<SkeletonFrame>;

    /// True once no further frames will arrive.
    fn exhausted(&self) -> bool;
}

/// A finite, pre-loaded frame sequence released by its own timestamps,
/// measured from the start of the stream.
#[derive(Debug, Clone, Default)]
pub struct ScriptedSource {
    frames: VecDeque<SkeletonFrame>,
}

impl ScriptedSource {
    pub fn new(frames: Vec<SkeletonFrame>) -> Self {
        Self {
            frames: frames.into(),
        }
    }
}

impl FrameSource for ScriptedSource {
    fn poll(&mut self, now_ms: u64) -> Vec<SkeletonFrame> {
        let mut out = Vec::new();
        while self.frames.front().is_some_and(|f| f.t_ms <= now_ms) {
            out.extend(self.frames.pop_front());
        }
        out
    }

    fn exhausted(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Frames from a sensor bridge, released as soon as they arrive.
pub struct TcpSource {
    live: LiveSource,
    open: bool,
}

impl FrameSource for TcpSource {
    fn poll(&mut self, _now_ms: u64) -> Vec<SkeletonFrame> {
        let (items, open) = self.live.drain();
        self.open = open;
        items
            .into_iter()
            .filter_map(|item| match item {
                Ok(frame) => Some(frame),
                Err(e) => {
                    warn!(error = %e, "dropping bad frame from sensor");
                    None
                }
            })
            .collect()
    }

    fn exhausted(&self) -> bool {
        !self.open
    }
}

fn unavailable(spec: &SourceSpec, e: impl fmt::Display) -> SourceUnavailable {
    SourceUnavailable {
        spec: spec.to_string(),
        reason: e.to_string(),
    }
}

/// Loads a motion script and renders it at `rate_hz`.
pub fn load_synth(path: &std::path::Path, rate_hz: f64) -> Result<Vec<SkeletonFrame>, StreamError> {
    let text = std::fs::read_to_string(path)?;
    let script: MotionScript =
        serde_json::from_str(&text).map_err(|e| StreamError::MalformedRecord(e.to_string()))?;
    synth_frames(&script, rate_hz)
}

/// Opens a source. Live sources get three connection attempts one second
/// apart.
pub fn open_source(spec: &SourceSpec, synth_rate_hz: f64) -> Result<Box<dyn FrameSource>, SourceUnavailable> {
    match spec {
        SourceSpec::Replay(path) => {
            let replay = open_replay(path).map_err(|e| unavailable(spec, e))?;
            Ok(Box::new(ScriptedSource::new(replay.frames)))
        }
        SourceSpec::Synth(path) => {
            let frames = load_synth(path, synth_rate_hz).map_err(|e| unavailable(spec, e))?;
            Ok(Box::new(ScriptedSource::new(frames)))
        }
        SourceSpec::Tcp(addr) => {
            let live = LiveSource::connect(addr.as_str()).map_err(|e| unavailable(spec, e))?;
            Ok(Box::new(TcpSource { live, open: true }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_source_specs() {
        assert_eq!(
            "replay:/tmp/a.jsonl".parse::<SourceSpec>().unwrap(),
            SourceSpec::Replay("/tmp/a.jsonl".into())
        );
        assert_eq!(
            "synth:s.json".parse::<SourceSpec>().unwrap(),
            SourceSpec::Synth("s.json".into())
        );
        assert_eq!(
            "tcp:127.0.0.1:9000".parse::<SourceSpec>().unwrap(),
            SourceSpec::Tcp("127.0.0.1:9000".into())
        );
        for bad in ["", "replay", "replay:", "udp:x", "file:/x"] {
            assert!(bad.parse::<SourceSpec>().is_err(), "{bad}");
        }
        assert_eq!(SourceSpec::Tcp("h:1".into()).to_string(), "tcp:h:1");
    }

    #[test]
    fn scripted_source_releases_by_time() {
        let frames: Vec<_> = (0..5).map(|i| SkeletonFrame::empty(i, i * 33)).collect();
        let mut s = ScriptedSource::new(frames);
        assert_eq!(s.poll(0).len(), 1);
        assert_eq!(s.poll(16).len(), 0);
        assert_eq!(s.poll(70).len(), 2);
        assert!(!s.exhausted());
        assert_eq!(s.poll(1000).len(), 2);
        assert!(s.exhausted());
    }

    #[test]
    fn missing_files_are_unavailable() {
        let err = open_source(&SourceSpec::Replay("/nonexistent/r.jsonl".into()), 30.0)
            .err()
            .unwrap();
        assert!(err.spec.starts_with("replay:"));
        assert!(open_source(&SourceSpec::Synth("/nonexistent/s.json".into()), 30.0).is_err());
    }
}
