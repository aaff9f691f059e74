//! Session gateway for the motion-controlled Pong exergame: the fixed-tick
//! engine loop that ties joint sources, dwell menus and the match together,
//! the WebSocket snapshot broadcast, session recording and the CLI.

pub mod cli;
pub mod config;
pub mod engine;
pub mod protocol;
pub mod record;
pub mod server;
pub mod simulate;
pub mod source;

pub use config::SessionConfig;
pub use engine::{Engine, LoggedEvent, Recording};
pub use protocol::{snapshot_hash, ClientEvent, ServerMessage, Snapshot};
