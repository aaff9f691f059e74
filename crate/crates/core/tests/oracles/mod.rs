//! Independent reference checks shared by the integration tests and the
//! acceptance runner. Nothing here calls back into the code under test to
//! compute an expected value.
#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use avg_core::game_core::{
    new_match, step, BodyPart, Difficulty, GameTuning, MatchConfig, MatchPhase, MatchState,
    PaddleInputs, PlayerCount, Side, SideInput,
};
use avg_core::gesture_cursor::{update_cursor, CursorConfig, CursorError, CursorState, Target};
use avg_core::menu_flow::{advance, menu_targets, OptionId, PhaseTag, SessionEvent, SessionState};
use avg_core::skeleton_stream::{
    encode_frame, parse_frame, Joint, JointId, Joints, PlayerSkeleton, SkeletonFrame, Slot,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------- codec

pub fn random_joint(rng: &mut impl Rng) -> Joint {
    Joint::new(
        rng.gen_range(-1.0..=1.0),
        rng.gen_range(-1.0..=1.0),
        rng.gen_range(0.0..8.0),
        rng.gen_range(0.0..=1.0),
    )
}

pub fn random_frame(rng: &mut impl Rng, seq: u64) -> SkeletonFrame {
    let mut players = Vec::new();
    for slot in [0u8, 1] {
        if rng.gen_bool(0.7) {
            players.push(PlayerSkeleton {
                slot: Slot::new(slot).unwrap(),
                joints: Joints {
                    head: random_joint(rng),
                    hand_left: random_joint(rng),
                    hand_right: random_joint(rng),
                },
            });
        }
    }
    SkeletonFrame::new(seq, rng.gen_range(0..u64::MAX / 2), players).unwrap()
}

#[derive(Debug, Default)]
pub struct CodecSummary {
    pub round_trips: usize,
    pub mutations_rejected: usize,
}

/// Out-of-range replacements for one numeric field of a joint.
const BAD_VALUES: [(&str, f64); 8] = [
    ("x", 1.000001),
    ("x", -1.5),
    ("y", 2.0),
    ("y", -1.0001),
    ("z", -0.01),
    ("c", 1.01),
    ("c", -0.2),
    ("x", 1e300),
];

/// Encodes and decodes `n` random frames, then corrupts each one in a way
/// the protocol forbids and expects the decoder to refuse it.
pub fn codec_check(n: usize, seed: u64) -> Result<CodecSummary, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summary = CodecSummary::default();
    for i in 0..n {
        let frame = random_frame(&mut rng, i as u64);
        let line = encode_frame(&frame);
        let back = parse_frame(&line).map_err(|e| format!("frame {i}: {e}"))?;
        if back != frame {
            return Err(format!("frame {i} changed in transit: {line}"));
        }
        summary.round_trips += 1;

        let mut value: serde_json::Value = serde_json::from_str(&line).unwrap();
        let mutation = if frame.players().is_empty() {
            // only the envelope can be broken
            if rng.gen_bool(0.5) {
                value["v"] = 2.into();
                "v=2".to_string()
            } else {
                value["players"] = serde_json::json!([{"slot": 2, "joints": {}}]);
                "slot=2".to_string()
            }
        } else {
            let p = rng.gen_range(0..frame.players().len());
            match rng.gen_range(0..10) {
                0 => {
                    value["players"][p]["slot"] = 2.into();
                    "slot=2".to_string()
                }
                1 => {
                    value["v"] = 0.into();
                    "v=0".to_string()
                }
                _ => {
                    let joint = JointId::ALL[rng.gen_range(0..3)].as_str();
                    let (field, bad) = BAD_VALUES[rng.gen_range(0..BAD_VALUES.len())];
                    value["players"][p]["joints"][joint][field] = serde_json::json!(bad);
                    format!("{joint}.{field}={bad}")
                }
            }
        };
        let corrupted = serde_json::to_string(&value).unwrap();
        if parse_frame(&corrupted).is_ok() {
            return Err(format!("frame {i}: mutation {mutation} accepted: {corrupted}"));
        }
        summary.mutations_rejected += 1;
    }
    Ok(summary)
}

// ---------------------------------------------------------------- dwell

/// One cursor update as seen by the oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HandStep {
    /// Hand tracked; the cursor is over this target (or over nothing).
    Over(Option<OptionId>),
    /// Hand momentarily untracked; the cursor stays where it was.
    Untracked,
}

/// Selections expected from a run-length count: a hover run of `k`
/// updates has dwelt `k * dt` and fires once when that reaches the
/// threshold. `dt_ms` is the exact rational `num / den`.
pub fn expected_selections(
    steps: &[HandStep],
    dt_num: u64,
    dt_den: u64,
    dwell_ms: u64,
) -> Vec<(usize, OptionId)> {
    let mut out = Vec::new();
    let mut current: Option<OptionId> = None;
    let mut run = 0u64;
    let mut fired = false;
    for (i, s) in steps.iter().enumerate() {
        let over = match s {
            HandStep::Over(t) => *t,
            HandStep::Untracked => current,
        };
        if over != current {
            current = over;
            run = 0;
            fired = false;
        }
        if let Some(t) = current {
            run += 1;
            if !fired && run * dt_num >= dwell_ms * dt_den {
                out.push((i, t));
                fired = true;
            }
        }
    }
    out
}

const LEFT_C: (f64, f64) = (0.26, 0.5);
const RIGHT_C: (f64, f64) = (0.74, 0.5);
const GAP: (f64, f64) = (0.5, 0.5);

/// Hand position that puts the default cursor at screen point `(u, v)`.
fn hand_at((u, v): (f64, f64)) -> Joint {
    Joint::new(-0.6 + 1.2 * u, -0.4 + (1.0 - v), 2.0, 1.0)
}

fn dwell_frame(step: HandStep, seq: u64, a: OptionId, b: OptionId) -> SkeletonFrame {
    let hand = match step {
        HandStep::Over(Some(t)) if t == a => hand_at(LEFT_C),
        HandStep::Over(Some(t)) if t == b => hand_at(RIGHT_C),
        HandStep::Over(_) => hand_at(GAP),
        HandStep::Untracked => Joint::new(0.0, 0.0, 2.0, 0.05),
    };
    let mut f = SkeletonFrame::empty(seq, seq * 16);
    f.set_joint(Slot::FIRST, JointId::HandRight, hand).unwrap();
    f
}

pub fn random_hover_sequence(rng: &mut impl Rng, a: OptionId, b: OptionId) -> Vec<HandStep> {
    let mut steps = Vec::new();
    let len = rng.gen_range(20..400);
    while steps.len() < len {
        let choice = match rng.gen_range(0..3) {
            0 => Some(a),
            1 => Some(b),
            _ => None,
        };
        let run = rng.gen_range(1..200);
        for _ in 0..run {
            // short tracking blips, far below the lost-hand timeout
            if rng.gen_bool(0.03) {
                for _ in 0..rng.gen_range(1..=3) {
                    steps.push(HandStep::Untracked);
                }
            }
            steps.push(HandStep::Over(choice));
        }
    }
    steps.truncate(len);
    steps
}

/// Frame intervals used by the dwell check, as exact `num / den` ms.
pub const DWELL_RATES: [(u64, u64); 5] = [(1000, 60), (1000, 30), (10, 1), (25, 1), (50, 1)];

/// Runs `n` random hover sequences through `update_cursor` and compares
/// its selections with [`expected_selections`].
pub fn dwell_check(n: usize, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = CursorConfig::default();
    let (a, b) = (OptionId::OnePlayer, OptionId::TwoPlayers);
    let targets: Vec<Target> = {
        let s = advance(
            &SessionState::new(0, GameTuning::default()),
            SessionEvent::Select {
                option: OptionId::Start,
            },
        )
        .unwrap();
        menu_targets(&s)
    };
    let mut total = 0;
    for case in 0..n {
        let (num, den) = DWELL_RATES[rng.gen_range(0..DWELL_RATES.len())];
        let dt = num as f64 / den as f64;
        let steps = random_hover_sequence(&mut rng, a, b);
        let expected = expected_selections(&steps, num, den, cfg.dwell_ms as u64);
        let mut state = CursorState::default();
        let mut got = Vec::new();
        for (i, s) in steps.iter().enumerate() {
            let frame = dwell_frame(*s, i as u64, a, b);
            state = match update_cursor(&state, &frame, &targets, dt, &cfg) {
                Ok(next) => next,
                Err(CursorError::NoTrackedHand(_)) => {
                    return Err(format!("case {case}: hand lost at step {i}"))
                }
                Err(e) => return Err(format!("case {case}: {e}")),
            };
            if let Some(t) = state.emitted {
                got.push((i, t));
            }
        }
        if got != expected {
            return Err(format!(
                "case {case} (dt {num}/{den}): expected {expected:?}, got {got:?}"
            ));
        }
        total += got.len();
    }
    Ok(total)
}

// ---------------------------------------------------------------- menu

pub fn menu_alphabet() -> Vec<SessionEvent> {
    let mut events: Vec<SessionEvent> = OptionId::ALL
        .iter()
        .map(|&option| SessionEvent::Select { option })
        .collect();
    events.push(SessionEvent::CountdownElapsed);
    for winner in [Side::Left, Side::Right] {
        let mut score = avg_core::game_core::Score::default();
        *score.get_mut(winner) = 3;
        events.push(SessionEvent::MatchEnded { winner, score });
    }
    events.push(SessionEvent::Rematch);
    events.push(SessionEvent::Quit);
    events
}

/// Observer of accepted events: how far along the ordered selection
/// sequence the session is since it last sat on the title screen, and what
/// was chosen at each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
struct OrderMonitor {
    stage: u8,
    players: Option<PlayerCount>,
    difficulty: Option<Difficulty>,
    body: Option<BodyPart>,
}

impl OrderMonitor {
    /// Updates the monitor with an accepted event; `Err` when the event was
    /// accepted out of order.
    fn accept(mut self, event: SessionEvent, to: PhaseTag) -> Result<Self, String> {
        use OptionId as O;
        if let SessionEvent::Select { option } = event {
            match (self.stage, option) {
                (0, O::Start) => self.stage = 1,
                (1, O::OnePlayer) => (self.stage, self.players) = (2, Some(PlayerCount::One)),
                (1, O::TwoPlayers) => (self.stage, self.players) = (2, Some(PlayerCount::Two)),
                (2, O::Easy) => (self.stage, self.difficulty) = (3, Some(Difficulty::Easy)),
                (2, O::Hard) => (self.stage, self.difficulty) = (3, Some(Difficulty::Hard)),
                (3, O::Hand) => (self.stage, self.body) = (4, Some(BodyPart::Hand)),
                (3, O::Head) => (self.stage, self.body) = (4, Some(BodyPart::Head)),
                (4, O::Rematch | O::Quit) => {}
                (stage, option) => {
                    return Err(format!("{option:?} accepted at stage {stage}"));
                }
            }
        }
        if to == PhaseTag::Title {
            self = Self::default();
        }
        Ok(self)
    }
}

#[derive(Debug, Default)]
pub struct MenuSummary {
    pub states: usize,
    pub transitions: usize,
    /// Number of distinct event sequences covered, of every length up to
    /// the bound.
    pub sequences: u128,
    pub playing_reached: bool,
    pub literal_sequences: usize,
}

fn menu_key(s: &SessionState, m: OrderMonitor) -> (PhaseTag, avg_core::game_core::ConfigDraft, OrderMonitor) {
    (s.tag(), s.draft(), m)
}

/// Checks every event sequence up to `max_len` long.
///
/// The state space is explored breadth first, merging states that agree on
/// phase, chosen settings and the order monitor (the next move depends on
/// nothing else), and the number of sequences reaching each merged state is
/// counted so the result covers all `|alphabet|^k` sequences. Sequences up to
/// `literal_len` are additionally replayed one by one from the start.
pub fn menu_check(max_len: usize, literal_len: usize) -> Result<MenuSummary, String> {
    let alphabet = menu_alphabet();
    let tuning = GameTuning::default();
    let start = SessionState::new(0, tuning.clone());
    let mut summary = MenuSummary::default();

    let mut layer: HashMap<_, (SessionState, OrderMonitor, u128)> = HashMap::new();
    layer.insert(
        menu_key(&start, OrderMonitor::default()),
        (start.clone(), OrderMonitor::default(), 1),
    );
    let mut seen = std::collections::HashSet::new();
    summary.sequences = 1;

    for depth in 0..max_len {
        let mut next: HashMap<_, (SessionState, OrderMonitor, u128)> = HashMap::new();
        for (key, (state, monitor, count)) in &layer {
            if seen.insert(*key) {
                summary.states += 1;
            }
            for &event in &alphabet {
                let (succ, mon) = match advance(state, event) {
                    Err(ignored) => {
                        if ignored.phase != state.tag() {
                            return Err(format!("ignored event reports wrong phase: {ignored:?}"));
                        }
                        (state.clone(), *monitor)
                    }
                    Ok(succ) => {
                        summary.transitions += 1;
                        let from = state.tag();
                        let to = succ.tag();
                        let mon = monitor
                            .accept(event, to)
                            .map_err(|e| format!("depth {depth}: {e}"))?;
                        check_edge(from, to, &state.draft(), &succ, &mon)
                            .map_err(|e| format!("depth {depth}, {event:?}: {e}"))?;
                        if to == PhaseTag::Playing {
                            summary.playing_reached = true;
                        }
                        (succ, mon)
                    }
                };
                let k = menu_key(&succ, mon);
                next.entry(k).or_insert_with(|| (succ, mon, 0)).2 += count;
            }
        }
        summary.sequences += next.values().map(|v| v.2).sum::<u128>();
        layer = next;
    }
    for key in layer.keys() {
        if seen.insert(*key) {
            summary.states += 1;
        }
    }
    if !summary.playing_reached {
        return Err("Playing never reached".into());
    }

    // literal replay of every short sequence
    let mut queue: VecDeque<(SessionState, OrderMonitor, usize)> = VecDeque::new();
    queue.push_back((start, OrderMonitor::default(), 0));
    while let Some((state, monitor, len)) = queue.pop_front() {
        summary.literal_sequences += 1;
        if len == literal_len {
            continue;
        }
        for &event in &alphabet {
            match advance(&state, event) {
                Err(_) => queue.push_back((state.clone(), monitor, len + 1)),
                Ok(succ) => {
                    let mon = monitor.accept(event, succ.tag())?;
                    check_edge(state.tag(), succ.tag(), &state.draft(), &succ, &mon)?;
                    queue.push_back((succ, mon, len + 1));
                }
            }
        }
    }
    Ok(summary)
}

fn check_edge(
    from: PhaseTag,
    to: PhaseTag,
    before: &avg_core::game_core::ConfigDraft,
    succ: &SessionState,
    mon: &OrderMonitor,
) -> Result<(), String> {
    use PhaseTag as T;
    let allowed: &[T] = match from {
        T::Title => &[T::SelectPlayers],
        T::SelectPlayers => &[T::SelectDifficulty],
        T::SelectDifficulty => &[T::SelectBodyPart],
        T::SelectBodyPart => &[T::Countdown],
        T::Countdown => &[T::Playing],
        T::Playing => &[T::MatchOver],
        T::MatchOver => &[T::Countdown, T::Title],
    };
    if !allowed.contains(&to) {
        return Err(format!("illegal edge {from:?} -> {to:?}"));
    }
    if to == T::Playing {
        if mon.stage != 4 {
            return Err(format!("Playing entered at stage {}", mon.stage));
        }
        let cfg = succ.game().map(|g| g.config).ok_or("Playing without a match")?;
        let chosen = MatchConfig {
            num_players: mon.players.unwrap(),
            difficulty: mon.difficulty.unwrap(),
            body_part: mon.body.unwrap(),
        };
        if cfg != chosen {
            return Err(format!("match config {cfg:?} differs from selections {chosen:?}"));
        }
    }
    if from == T::MatchOver && to == T::Countdown && succ.draft() != *before {
        return Err("rematch changed the configuration".into());
    }
    Ok(())
}

// ---------------------------------------------------------------- pong

/// Triangle-wave fold of an unfolded coordinate into `[0, 1]`.
pub fn fold(y: f64) -> f64 {
    let m = y.rem_euclid(2.0);
    if m > 1.0 {
        2.0 - m
    } else {
        m
    }
}

#[derive(Debug, Default, Clone)]
pub struct TickAudit {
    pub rally_ticks: usize,
    pub paddle_crossings: usize,
    pub tunneling: usize,
}

/// Checks one transition against the match invariants. The expected paddle
/// hit is recomputed from the previous ball state and the paddles as they
/// stand after this tick's move.
pub fn audit_tick(prev: &MatchState, next: &MatchState, audit: &mut TickAudit) -> Result<(), String> {
    let t = &next.tuning;
    let lives = t.lives;
    let ctx = || format!("tick {}", next.tick);

    if matches!(next.phase, MatchPhase::Rally) {
        audit.rally_ticks += 1;
        let speed = next.ball.vel.x.hypot(next.ball.vel.y);
        if (speed - next.rally_speed).abs() > 1e-9 {
            return Err(format!("{}: |vel| {speed} != rally_speed {}", ctx(), next.rally_speed));
        }
    }
    let (bx, by) = (next.ball.pos.x, next.ball.pos.y);
    if !(0.0..=1.0).contains(&bx) || !(0.0..=1.0).contains(&by) {
        return Err(format!("{}: ball outside field at ({bx}, {by})", ctx()));
    }
    for p in [&next.left, &next.right] {
        if p.y - p.half_h < -1e-12 || p.y + p.half_h > 1.0 + 1e-12 {
            return Err(format!("{}: paddle {:?} leaves field at {}", ctx(), p.side, p.y));
        }
    }
    for side in [Side::Left, Side::Right] {
        if next.score.get(side) + next.lives.get(side.opponent()) != lives {
            return Err(format!("{}: score/lives out of balance", ctx()));
        }
    }
    let points = |s: &MatchState| s.score.left + s.score.right;
    if points(next) > points(prev) + 1 {
        return Err(format!("{}: two points in one tick", ctx()));
    }

    if prev.phase == MatchPhase::Rally && prev.ball.vel.x != 0.0 {
        let dt = 1.0 / t.tick_hz;
        let b = prev.ball;
        let side = if b.vel.x > 0.0 { Side::Right } else { Side::Left };
        let face = if side == Side::Right {
            1.0 - t.paddle_inset
        } else {
            t.paddle_inset
        };
        let x1 = b.pos.x + b.vel.x * dt;
        let crosses = (b.pos.x - face) * (x1 - face) < 0.0 || (b.pos.x == face && x1 != face);
        if crosses {
            audit.paddle_crossings += 1;
            let s = (face - b.pos.x) / (x1 - b.pos.x);
            let y_hit = fold(b.pos.y + b.vel.y * dt * s);
            let paddle = next.paddle(side);
            let miss = (y_hit - paddle.y).abs() - paddle.half_h;
            let reflected = next.phase == MatchPhase::Rally
                && next.ball.vel.x.signum() != b.vel.x.signum()
                && points(next) == points(prev);
            if miss < -1e-9 && !reflected {
                audit.tunneling += 1;
                return Err(format!(
                    "{}: ball crossed {side:?} paddle at y {y_hit} (paddle {}) without bouncing",
                    ctx(),
                    paddle.y
                ));
            }
            if miss > 1e-9 && reflected {
                return Err(format!("{}: bounce off {side:?} paddle that was not there", ctx()));
            }
        }
    }
    Ok(())
}

/// Paddle target that follows a sine wave, as a scripted stand-in for a
/// player.
#[derive(Debug, Clone, Copy)]
pub struct SineScript {
    pub amplitude: f64,
    pub period_ticks: f64,
    pub phase: f64,
}

impl SineScript {
    pub fn random(rng: &mut impl Rng) -> Self {
        Self {
            amplitude: rng.gen_range(0.0..0.45),
            period_ticks: rng.gen_range(30.0..600.0),
            phase: rng.gen_range(0.0..std::f64::consts::TAU),
        }
    }

    pub fn at(&self, tick: u64) -> f64 {
        0.5 + self.amplitude
            * (std::f64::consts::TAU * tick as f64 / self.period_ticks + self.phase).sin()
    }
}

#[derive(Debug, Default)]
pub struct PhysicsSummary {
    pub matches: usize,
    pub ticks: u64,
    pub audit: TickAudit,
}

pub fn random_config(rng: &mut impl Rng) -> MatchConfig {
    MatchConfig {
        num_players: if rng.gen_bool(0.5) { PlayerCount::One } else { PlayerCount::Two },
        difficulty: if rng.gen_bool(0.5) { Difficulty::Easy } else { Difficulty::Hard },
        body_part: if rng.gen_bool(0.5) { BodyPart::Hand } else { BodyPart::Head },
    }
}

/// Plays `n` matches with random seeds, settings and sine-scripted players
/// to the end, auditing every tick.
pub fn physics_check(n: usize, seed: u64) -> Result<PhysicsSummary, String> {
    const MAX_TICKS: u64 = 60 * 60 * 30;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tuning = GameTuning::default();
    let mut summary = PhysicsSummary::default();
    for m in 0..n {
        let config = random_config(&mut rng);
        let match_seed: u64 = rng.gen();
        let left = SineScript::random(&mut rng);
        let right = SineScript::random(&mut rng);
        let mut state = new_match(config, match_seed, &tuning);
        while !state.is_over() {
            let inputs = PaddleInputs {
                left: SideInput::joint(Some(left.at(state.tick))),
                right: SideInput::joint(Some(right.at(state.tick))),
            };
            let next = step(&state, &inputs).map_err(|e| e.to_string())?;
            audit_tick(&state, &next, &mut summary.audit)
                .map_err(|e| format!("match {m} (seed {match_seed}, {config:?}): {e}"))?;
            state = next;
            if state.tick > MAX_TICKS {
                return Err(format!("match {m} did not finish"));
            }
        }
        let winner = state.winner().unwrap();
        if *state.score.get(winner) != tuning.lives || *state.lives.get(winner.opponent()) != 0 {
            return Err(format!("match {m}: winner {winner:?} with score {:?}", state.score));
        }
        summary.ticks += state.tick;
        summary.matches += 1;
    }
    Ok(summary)
}

// ---------------------------------------------------------------- goal time

/// Tick at which a flat serve from the center scores against an absent
/// paddle: the serve delay, then the first whole number of ticks whose
/// travel exceeds the half field. `speed` is the exact fraction
/// `speed_num / speed_den` field widths per second.
pub fn flat_serve_goal_tick(serve_delay_ticks: u64, tick_hz: u64, speed_num: u64, speed_den: u64) -> u64 {
    // ticks k with k * speed / hz > 1/2  <=>  2 * k * speed_num > hz * speed_den
    let k = (tick_hz * speed_den) / (2 * speed_num) + 1;
    serve_delay_ticks + k
}

// ---------------------------------------------------------------- AI reach

/// Whether a paddle starting at `paddle_y` that moves at most `ai_speed`
/// per second can cover a ball crossing its face. The paddle moves before
/// the ball on every tick, including the crossing one.
#[allow(clippy::too_many_arguments)]
pub fn ai_can_reach(
    ball: (f64, f64),
    angle_deg: f64,
    speed: f64,
    face_x: f64,
    paddle_y: f64,
    half_h: f64,
    ai_speed: f64,
    tick_hz: f64,
) -> (bool, f64, f64) {
    let (vx, vy) = (speed * angle_deg.to_radians().cos(), speed * angle_deg.to_radians().sin());
    let flight = (face_x - ball.0) / vx;
    let ticks = (flight * tick_hz).ceil();
    let arrive = fold(ball.1 + vy * flight);
    let needed = ((arrive - paddle_y).abs() - half_h).max(0.0);
    let reach = ai_speed * ticks / tick_hz;
    (reach >= needed, needed, reach)
}

// ---------------------------------------------------------------- arc length

/// Arc length of `f` over `[0, duration_s]` sampled at `rate_hz`.
pub fn arc_length(f: impl Fn(f64) -> f64, duration_s: f64, rate_hz: f64) -> f64 {
    let n = (duration_s * rate_hz).round() as usize;
    (0..n)
        .map(|i| {
            let t0 = i as f64 / rate_hz;
            let t1 = (i + 1) as f64 / rate_hz;
            (f(t1) - f(t0)).abs()
        })
        .sum()
}
