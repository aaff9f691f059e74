//! Session recordings on disk: a replay file of consumed frames and a JSON
//! lines log of client inputs, one `{"tick":N,"event":{...}}` per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use avg_core::skeleton_stream::{write_replay, ReplayHeader, StreamError};
use thiserror::Error;

use crate::engine::{LoggedEvent, Recording};

#[derive(Debug, Error)]
pub enum EventLogError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {reason}")]
    Invalid { line: usize, reason: String },
}

pub fn read_event_log(path: impl AsRef<Path>) -> Result<Vec<LoggedEvent>, EventLogError> {
    parse_event_log(BufReader::new(File::open(path)?))
}

/// Reads an event log. Ticks must not decrease and only input events
/// (emulated joints and menu overrides) are allowed.
pub fn parse_event_log(reader: impl BufRead) -> Result<Vec<LoggedEvent>, EventLogError> {
    let mut out: Vec<LoggedEvent> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let invalid = |reason: String| EventLogError::Invalid { line: i + 1, reason };
        let entry: LoggedEvent = serde_json::from_str(&line).map_err(|e| invalid(e.to_string()))?;
        crate::protocol::ClientEvent::parse(&entry.event.to_json())
            .map_err(|e| invalid(e.to_string()))?;
        if !entry.event.is_input() {
            return Err(invalid(format!("{:?} is not an input event", entry.event)));
        }
        if out.last().is_some_and(|prev| prev.tick > entry.tick) {
            return Err(invalid(format!("tick {} goes backwards", entry.tick)));
        }
        out.push(entry);
    }
    Ok(out)
}

pub fn write_event_log(writer: impl Write, events: &[LoggedEvent]) -> std::io::Result<()> {
    let mut w = BufWriter::new(writer);
    for e in events {
        serde_json::to_writer(&mut w, e)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

/// Writes the frames of a recording as a replay file.
pub fn save_replay(path: impl AsRef<Path>, recording: &Recording, rate_hz: f64) -> Result<(), StreamError> {
    write_replay(File::create(path)?, &ReplayHeader { rate_hz }, &recording.frames)
}

/// Event log path stored next to a replay: `run.jsonl` → `run.events.jsonl`.
pub fn events_path_for(replay: &Path) -> std::path::PathBuf {
    let stem = replay.file_stem().unwrap_or_default().to_string_lossy();
    replay.with_file_name(format!("{stem}.events.jsonl"))
}
