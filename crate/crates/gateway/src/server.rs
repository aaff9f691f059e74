//! WebSocket gateway. A single engine task owns the session and runs on a
//! fixed-rate timer; connection tasks only exchange messages with it.
//!
//! Each client has a bounded outbound queue. The engine never waits on a
//! client: when a queue is full the client is dropped and its socket closed.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use futures_util::{SinkExt, StreamExt};
use serde::Serialize;
use tokio::net::{TcpListener, TcpStream};
use tokio::sync::{mpsc, oneshot, watch};
use tokio::task::JoinHandle;
use tokio::time::{interval, MissedTickBehavior};
use tokio_tungstenite::tungstenite::Message;
use tracing::{debug, info, warn};

use crate::config::SessionConfig;
use crate::engine::{Engine, Recording};
use crate::protocol::{ClientEvent, MatchResult, ServerMessage};
use crate::source::FrameSource;

/// Snapshots a client may have queued before it is dropped: two seconds
/// of ticks at 60 Hz.
pub const CLIENT_QUEUE_CAPACITY: usize = 120;

/// Kernel send buffer per client socket. Kept small so a client that stops
/// reading fills its queue quickly instead of hiding in socket buffers.
pub const SEND_BUFFER_BYTES: usize = 8 * 1024;

/// How long a new connection has to send its hello.
pub const HELLO_TIMEOUT: Duration = Duration::from_secs(5);

const REPLY_QUEUE_CAPACITY: usize = 32;

#[derive(Debug, Clone)]
pub struct ServerOptions {
    pub config: SessionConfig,
    pub seed: u64,
    pub queue_capacity: usize,
    pub send_buffer_bytes: Option<usize>,
}

impl ServerOptions {
    pub fn new(config: SessionConfig, seed: u64) -> Self {
        Self {
            config,
            seed,
            queue_capacity: CLIENT_QUEUE_CAPACITY,
            send_buffer_bytes: Some(SEND_BUFFER_BYTES),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ClientStats {
    pub id: u64,
    pub peer: String,
    pub snapshots_queued: u64,
    /// Time since server start at which the outbound queue overflowed.
    pub saturated_at: Option<Duration>,
    pub saturated_tick: Option<u64>,
    /// Time since server start at which the connection was torn down.
    pub closed_at: Option<Duration>,
    pub close_reason: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ServerStats {
    pub ticks: u64,
    pub elapsed: Duration,
    /// Largest distance, in ticks, between when a tick ran and when it was
    /// due.
    pub max_drift_ticks: f64,
    pub clients: Vec<ClientStats>,
}

#[derive(Debug)]
pub struct ServerOutcome {
    pub stats: ServerStats,
    pub recording: Recording,
    pub results: Vec<MatchResult>,
}

enum Control {
    Join {
        id: u64,
        peer: SocketAddr,
        snapshots: mpsc::Sender<Arc<str>>,
        kill: watch::Sender<bool>,
    },
    Input(ClientEvent),
    Closed {
        id: u64,
        reason: String,
        at: Instant,
    },
}

struct Client {
    snapshots: mpsc::Sender<Arc<str>>,
    _kill: watch::Sender<bool>,
}

pub struct ServerHandle {
    pub local_addr: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    engine: JoinHandle<ServerOutcome>,
    acceptor: JoinHandle<()>,
}

impl ServerHandle {
    /// Stops the engine loop and returns what the session produced.
    pub async fn shutdown(mut self) -> ServerOutcome {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        self.acceptor.abort();
        self.engine.await.expect("engine task panicked")
    }
}

/// Starts the engine and accept loops on an already bound listener.
pub fn start(listener: TcpListener, source: Box<dyn FrameSource>, options: ServerOptions) -> ServerHandle {
    let local_addr = listener.local_addr().expect("bound listener has an address");
    let (control_tx, control_rx) = mpsc::unbounded_channel();
    let (shutdown_tx, shutdown_rx) = oneshot::channel();
    let started = Instant::now();
    let tick_hz = options.config.tuning.tick_hz;

    let engine = tokio::spawn(engine_loop(source, options.clone(), control_rx, shutdown_rx, started));
    let acceptor = tokio::spawn(accept_loop(listener, control_tx, options, tick_hz));
    info!(%local_addr, "gateway listening");
    ServerHandle {
        local_addr,
        shutdown: Some(shutdown_tx),
        engine,
        acceptor,
    }
}

async fn engine_loop(
    mut source: Box<dyn FrameSource>,
    options: ServerOptions,
    mut control: mpsc::UnboundedReceiver<Control>,
    mut shutdown: oneshot::Receiver<()>,
    started: Instant,
) -> ServerOutcome {
    let hz = options.config.tuning.tick_hz;
    let mut engine = Engine::new(options.config, options.seed);
    let mut clients: BTreeMap<u64, Client> = BTreeMap::new();
    let mut stats: BTreeMap<u64, ClientStats> = BTreeMap::new();
    let mut due = Vec::new();
    let mut max_drift = 0.0f64;

    let mut timer = interval(Duration::from_secs_f64(1.0 / hz));
    timer.set_missed_tick_behavior(MissedTickBehavior::Burst);
    let first = Instant::now();

    loop {
        tokio::select! {
            biased;
            _ = &mut shutdown => break,
            _ = timer.tick() => {}
        }
        let tick = engine.tick();
        let drift = first.elapsed().as_secs_f64() * hz - tick as f64;
        max_drift = max_drift.max(drift.abs());

        due.clear();
        while let Ok(msg) = control.try_recv() {
            match msg {
                Control::Join {
                    id,
                    peer,
                    snapshots,
                    kill,
                } => {
                    info!(id, %peer, "client joined");
                    stats.insert(
                        id,
                        ClientStats {
                            id,
                            peer: peer.to_string(),
                            ..Default::default()
                        },
                    );
                    clients.insert(
                        id,
                        Client {
                            snapshots,
                            _kill: kill,
                        },
                    );
                }
                Control::Input(event) => due.push(event),
                Control::Closed { id, reason, at } => {
                    clients.remove(&id);
                    if let Some(s) = stats.get_mut(&id) {
                        s.closed_at.get_or_insert(at - started);
                        s.close_reason.get_or_insert(reason);
                    }
                }
            }
        }

        let frames = source.poll(engine.now_ms());
        let snapshot = engine.step(&frames, &due);
        let text: Arc<str> = snapshot.to_json().into();

        let mut dropped = Vec::new();
        for (id, client) in &clients {
            let s = stats.get_mut(id).expect("stats exist for every client");
            match client.snapshots.try_send(text.clone()) {
                Ok(()) => s.snapshots_queued += 1,
                Err(mpsc::error::TrySendError::Full(_)) => {
                    warn!(id, tick, "client queue full, disconnecting");
                    s.saturated_at = Some(started.elapsed());
                    s.saturated_tick = Some(tick);
                    dropped.push(*id);
                }
                Err(mpsc::error::TrySendError::Closed(_)) => dropped.push(*id),
            }
        }
        // dropping the kill sender tears the connection down
        for id in dropped {
            clients.remove(&id);
        }
    }

    // let connection tasks report their close times
    drop(clients);
    tokio::time::sleep(Duration::from_millis(50)).await;
    while let Ok(msg) = control.try_recv() {
        if let Control::Closed { id, reason, at } = msg {
            if let Some(s) = stats.get_mut(&id) {
                s.closed_at.get_or_insert(at - started);
                s.close_reason.get_or_insert(reason);
            }
        }
    }

    ServerOutcome {
        stats: ServerStats {
            ticks: engine.tick(),
            elapsed: started.elapsed(),
            max_drift_ticks: max_drift,
            clients: stats.into_values().collect(),
        },
        results: engine.results().to_vec(),
        recording: engine.take_recording(),
    }
}

async fn accept_loop(
    listener: TcpListener,
    control: mpsc::UnboundedSender<Control>,
    options: ServerOptions,
    tick_hz: f64,
) {
    let mut next_id = 0u64;
    loop {
        let (stream, peer) = match listener.accept().await {
            Ok(conn) => conn,
            Err(e) => {
                warn!(error = %e, "accept failed");
                continue;
            }
        };
        next_id += 1;
        let id = next_id;
        let control = control.clone();
        let options = options.clone();
        tokio::spawn(async move {
            if let Err(reason) = serve_client(id, stream, peer, control.clone(), &options, tick_hz).await {
                debug!(id, %reason, "connection ended before joining");
            }
        });
    }
}

async fn serve_client(
    id: u64,
    stream: TcpStream,
    peer: SocketAddr,
    control: mpsc::UnboundedSender<Control>,
    options: &ServerOptions,
    tick_hz: f64,
) -> Result<(), String> {
    let _ = stream.set_nodelay(true);
    if let Some(bytes) = options.send_buffer_bytes {
        if let Err(e) = socket2::SockRef::from(&stream).set_send_buffer_size(bytes) {
            warn!(error = %e, "cannot shrink socket send buffer");
        }
    }
    let ws = tokio_tungstenite::accept_async(stream)
        .await
        .map_err(|e| e.to_string())?;
    let (mut sink, mut incoming) = ws.split();

    sink.send(Message::Text(ServerMessage::hello(tick_hz).to_json()))
        .await
        .map_err(|e| e.to_string())?;
    let hello = tokio::time::timeout(HELLO_TIMEOUT, incoming.next())
        .await
        .map_err(|_| "no hello".to_string())?;
    let hello_err = match hello {
        Some(Ok(Message::Text(text))) => match ClientEvent::parse(&text) {
            Ok(ClientEvent::Hello { .. }) => None,
            Ok(other) => Some(format!("expected hello, got {other:?}")),
            Err(e) => Some(e.to_string()),
        },
        Some(Ok(other)) => Some(format!("expected hello, got {other:?}")),
        Some(Err(e)) => return Err(e.to_string()),
        None => return Err("closed before hello".into()),
    };
    if let Some(message) = hello_err {
        let _ = sink.send(Message::Text(ServerMessage::Error { message: message.clone() }.to_json())).await;
        let _ = sink.close().await;
        return Err(message);
    }

    let (snap_tx, mut snap_rx) = mpsc::channel::<Arc<str>>(options.queue_capacity);
    let (reply_tx, mut reply_rx) = mpsc::channel::<String>(REPLY_QUEUE_CAPACITY);
    let (kill_tx, mut kill_rx) = watch::channel(false);
    control
        .send(Control::Join {
            id,
            peer,
            snapshots: snap_tx,
            kill: kill_tx,
        })
        .map_err(|_| "engine stopped".to_string())?;

    let writer = async {
        loop {
            let text: String = tokio::select! {
                biased;
                reply = reply_rx.recv() => match reply {
                    Some(r) => r,
                    None => return "reply channel closed".to_string(),
                },
                snap = snap_rx.recv() => match snap {
                    Some(s) => s.to_string(),
                    None => return "dropped by engine".to_string(),
                },
            };
            if let Err(e) = sink.send(Message::Text(text)).await {
                return format!("send failed: {e}");
            }
        }
    };

    let reader = async {
        while let Some(msg) = incoming.next().await {
            let text = match msg {
                Ok(Message::Text(t)) => t,
                Ok(Message::Close(_)) => return "client closed".to_string(),
                Ok(Message::Binary(_)) => {
                    let _ = reply_tx.try_send(
                        ServerMessage::Error {
                            message: "binary messages are not supported".into(),
                        }
                        .to_json(),
                    );
                    continue;
                }
                Ok(_) => continue,
                Err(e) => return format!("read failed: {e}"),
            };
            match ClientEvent::parse(&text) {
                Ok(ClientEvent::Ping) => {
                    let _ = reply_tx.try_send(ServerMessage::Pong.to_json());
                }
                Ok(ClientEvent::Hello { .. }) => {}
                Ok(event) => {
                    if control.send(Control::Input(event)).is_err() {
                        return "engine stopped".to_string();
                    }
                }
                Err(e) => {
                    let _ = reply_tx.try_send(ServerMessage::Error { message: e.to_string() }.to_json());
                }
            }
        }
        "connection closed".to_string()
    };

    let reason = tokio::select! {
        r = writer => r,
        r = reader => r,
        _ = kill_rx.changed() => "dropped by engine".to_string(),
    };
    drop(sink);
    drop(incoming);
    let at = Instant::now();
    info!(id, %reason, "client disconnected");
    let _ = control.send(Control::Closed { id, reason, at });
    Ok(())
}
