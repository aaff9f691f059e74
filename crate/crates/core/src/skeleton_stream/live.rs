//! Live frames over TCP using the same line protocol as replay files.
//!
//! A reader thread owns the socket and forwards decoded frames, in arrival
//! order, to a single consumer over a channel.

use std::io::{BufRead, BufReader};
use std::net::{TcpStream, ToSocketAddrs};
use std::sync::mpsc::{self, Receiver, TryRecvError};
use std::thread::{self, JoinHandle};
use std::time::Duration;

use tracing::{debug, warn};

use super::{check_monotonic, parse_frame, SkeletonFrame, StreamError};

pub const CONNECT_ATTEMPTS: u32 = 3;
pub const RETRY_DELAY: Duration = Duration::from_secs(1);

pub struct LiveSource {
    rx: Receiver<Result<SkeletonFrame, StreamError>>,
    reader: Option<JoinHandle<()>>,
}

impl LiveSource {
    /// Connects with the default retry policy.
    pub fn connect(addr: impl ToSocketAddrs + Clone) -> Result<Self, StreamError> {
        Self::connect_with_retry(addr, CONNECT_ATTEMPTS, RETRY_DELAY)
    }

    pub fn connect_with_retry(
        addr: impl ToSocketAddrs + Clone,
        attempts: u32,
        delay: Duration,
    ) -> Result<Self, StreamError> {
        let mut last_err = None;
        for attempt in 1..=attempts.max(1) {
            match TcpStream::connect(addr.clone()) {
                Ok(stream) => return Ok(Self::from_stream(stream)),
                Err(e) => {
                    warn!(attempt, error = %e, "sensor source connect failed");
                    last_err = Some(e);
                    if attempt < attempts {
                        thread::sleep(delay);
                    }
                }
            }
        }
        Err(StreamError::Io(last_err.expect("at least one attempt")))
    }

    pub fn from_stream(stream: TcpStream) -> Self {
        let (tx, rx) = mpsc::channel();
        let reader = thread::spawn(move || {
            let mut last: Option<SkeletonFrame> = None;
            for (i, line) in BufReader::new(stream).lines().enumerate() {
                let line = match line {
                    Ok(l) => l,
                    Err(e) => {
                        let _ = tx.send(Err(StreamError::Io(e)));
                        return;
                    }
                };
                if line.trim().is_empty() {
                    continue;
                }
                // an optional header record may precede the frames
                if i == 0 && line.contains("\"kind\"") {
                    debug!("skipping live stream header");
                    continue;
                }
                let item = parse_frame(&line).and_then(|frame| {
                    if let Some(prev) = &last {
                        check_monotonic(prev, &frame)?;
                    }
                    Ok(frame)
                });
                if let Ok(frame) = &item {
                    last = Some(frame.clone());
                }
                if tx.send(item).is_err() {
                    return;
                }
            }
        });
        Self {
            rx,
            reader: Some(reader),
        }
    }

    /// Drains every frame received so far. The boolean is false once the
    /// connection has closed and all frames have been consumed.
    pub fn drain(&self) -> (Vec<Result<SkeletonFrame, StreamError>>, bool) {
        let mut out = Vec::new();
        loop {
            match self.rx.try_recv() {
                Ok(item) => out.push(item),
                Err(TryRecvError::Empty) => return (out, true),
                Err(TryRecvError::Disconnected) => return (out, false),
            }
        }
    }

    /// Blocks for the next item; `None` once the stream has ended.
    pub fn recv(&self) -> Option<Result<SkeletonFrame, StreamError>> {
        self.rx.recv().ok()
    }
}

impl Drop for LiveSource {
    fn drop(&mut self) {
        // The reader exits on its own at EOF or when the channel is closed;
        // a blocked read is left to finish with the socket.
        if let Some(handle) = self.reader.take() {
            if handle.is_finished() {
                let _ = handle.join();
            }
        }
    }
}
