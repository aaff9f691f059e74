//! Replay files: a header record followed by one frame record per line.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::codec::check_version;
use super::{check_monotonic, encode_frame, parse_frame, SkeletonFrame, StreamError, PROTOCOL_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplayHeader {
    pub rate_hz: f64,
}

#[derive(Serialize, Deserialize)]
struct WireHeader {
    v: u64,
    kind: String,
    rate_hz: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Replay {
    pub header: ReplayHeader,
    pub frames: Vec<SkeletonFrame>,
}

fn at_line(line: usize) -> impl FnOnce(StreamError) -> StreamError {
    move |e| StreamError::AtLine {
        line,
        source: Box::new(e),
    }
}

fn parse_header(line: &str) -> Result<ReplayHeader, StreamError> {
    let value: Value = serde_json::from_str(line).map_err(|_| StreamError::MissingHeader)?;
    if value.get("kind").and_then(Value::as_str) != Some("replay") {
        return Err(StreamError::MissingHeader);
    }
    check_version(&value)?;
    let header: WireHeader =
        serde_json::from_value(value).map_err(|e| StreamError::MalformedRecord(e.to_string()))?;
    if !(header.rate_hz.is_finite() && header.rate_hz > 0.0) {
        return Err(StreamError::InvalidRate(header.rate_hz));
    }
    Ok(ReplayHeader {
        rate_hz: header.rate_hz,
    })
}

/// Reads a replay stream, validating every record and seq/t_ms ordering.
pub fn read_replay<R: BufRead>(reader: R) -> Result<Replay, StreamError> {
    let mut lines = reader
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !matches!(l, Ok(s) if s.trim().is_empty()));

    let header = match lines.next() {
        Some((n, line)) => parse_header(&line?).map_err(|e| match e {
            StreamError::MissingHeader => e,
            other => at_line(n)(other),
        })?,
        None => return Err(StreamError::MissingHeader),
    };

    let mut frames: Vec<SkeletonFrame> = Vec::new();
    for (n, line) in lines {
        let frame = parse_frame(&line?).map_err(at_line(n))?;
        if let Some(prev) = frames.last() {
            check_monotonic(prev, &frame).map_err(at_line(n))?;
        }
        frames.push(frame);
    }
    Ok(Replay { header, frames })
}

pub fn open_replay(path: impl AsRef<Path>) -> Result<Replay, StreamError> {
    let file = File::open(path)?;
    read_replay(BufReader::new(file))
}

/// Writes a header and frames, one LF-terminated record per line.
pub fn write_replay<W: Write>(
    mut out: W,
    header: &ReplayHeader,
    frames: &[SkeletonFrame],
) -> Result<(), StreamError> {
    let wire = WireHeader {
        v: PROTOCOL_VERSION,
        kind: "replay".into(),
        rate_hz: header.rate_hz,
    };
    serde_json::to_writer(&mut out, &wire).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    for frame in frames {
        out.write_all(encode_frame(frame).as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}
