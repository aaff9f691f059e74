//! Core logic for a motion-controlled Pong exergame.
//!
//! Everything here is deterministic and single-threaded except the live TCP
//! frame source. The engine loop and network front end live in the
//! `avg-pong` crate.

pub mod skeleton_stream;
pub mod gesture_cursor;
pub mod menu_flow;
pub mod game_core;
pub mod activity_metrics;
