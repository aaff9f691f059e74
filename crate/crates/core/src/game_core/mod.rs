//! Fixed-timestep Pong driven by tracked joints.
//!
//! The field is the unit square with `y` growing upward. The left paddle
//! face sits at `x = paddle_inset`, the right one at `x = 1 - paddle_inset`.
//! A ball leaving through `x < 0` or `x > 1` is a goal for the opposite
//! side. Every scored point costs the conceding side one life, so
//! `score.left + lives.right == lives_per_match` holds for the whole match.
//!
//! [`step`] is a pure function of the state and the paddle inputs: replaying
//! the same inputs from the same `(config, seed)` yields the same states bit
//! for bit.

mod input;
mod physics;
mod tuning;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use input::{
    ai_paddle_target, paddle_target_from_joint, InputSource, PaddleInputs, SideInput, SideMap,
};
pub use physics::{detect_goal, fold_into_field, move_paddle, reflect_off_paddle};
pub use tuning::GameTuning;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opponent(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    /// `+1` for the left side (which sends the ball toward `+x`), `-1` otherwise.
    pub fn outward(self) -> f64 {
        match self {
            Side::Left => 1.0,
            Side::Right => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PlayerCount {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Difficulty {
    Easy,
    Hard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BodyPart {
    Hand,
    Head,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatchConfig {
    pub num_players: PlayerCount,
    pub difficulty: Difficulty,
    pub body_part: BodyPart,
}

/// Match settings as they are collected by the menus.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConfigDraft {
    pub num_players: Option<PlayerCount>,
    pub difficulty: Option<Difficulty>,
    pub body_part: Option<BodyPart>,
}

impl ConfigDraft {
    pub fn complete(&self) -> Result<MatchConfig, GameError> {
        match (self.num_players, self.difficulty, self.body_part) {
            (Some(num_players), Some(difficulty), Some(body_part)) => Ok(MatchConfig {
                num_players,
                difficulty,
                body_part,
            }),
            _ => Err(GameError::IncompleteConfig),
        }
    }
}

impl From<MatchConfig> for ConfigDraft {
    fn from(c: MatchConfig) -> Self {
        Self {
            num_players: Some(c.num_players),
            difficulty: Some(c.difficulty),
            body_part: Some(c.body_part),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub pos: Vec2,
    pub vel: Vec2,
}

impl Ball {
    pub fn at_center() -> Self {
        Self {
            pos: Vec2::new(0.5, 0.5),
            vel: Vec2::new(0.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Paddle {
    pub side: Side,
    pub y: f64,
    pub half_h: f64,
}

impl Paddle {
    pub fn centered(side: Side, half_h: f64) -> Self {
        Self { side, y: 0.5, half_h }
    }

    pub fn top(&self) -> f64 {
        self.y + self.half_h
    }

    pub fn bottom(&self) -> f64 {
        self.y - self.half_h
    }
}

/// A pair of per-side counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PerSide<T> {
    pub left: T,
    pub right: T,
}

impl<T> PerSide<T> {
    pub fn get(&self, side: Side) -> &T {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn get_mut(&mut self, side: Side) -> &mut T {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
        }
    }
}

pub type Score = PerSide<u32>;
pub type Lives = PerSide<u32>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MatchPhase {
    /// `server` launches the ball toward the opponent when the countdown ends.
    Serving { server: Side, remaining_ticks: u32 },
    Rally,
    Over { winner: Side },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchState {
    pub config: MatchConfig,
    pub ball: Ball,
    pub left: Paddle,
    pub right: Paddle,
    pub score: Score,
    pub lives: Lives,
    pub rally_speed: f64,
    pub phase: MatchPhase,
    pub tick: u64,
    pub seed: u64,
    /// Number of serves launched so far; indexes the serve-angle sequence.
    pub serves: u64,
    #[serde(skip)]
    pub tuning: GameTuning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("match configuration is incomplete")]
    IncompleteConfig,
    #[error("match is already over")]
    MatchAlreadyOver,
}

/// Fresh match: full lives, centered paddles, ball waiting at center. The
/// first server is `LEFT` for even seeds and `RIGHT` for odd ones.
pub fn new_match(config: MatchConfig, seed: u64, tuning: &GameTuning) -> MatchState {
    let half_h = tuning.half_height(config.body_part);
    let server = if seed.is_multiple_of(2) { Side::Left } else { Side::Right };
    let lives = tuning.lives;
    MatchState {
        config,
        ball: Ball::at_center(),
        left: Paddle::centered(Side::Left, half_h),
        right: Paddle::centered(Side::Right, half_h),
        score: Score::default(),
        lives: Lives {
            left: lives,
            right: lives,
        },
        rally_speed: tuning.base_speed(config.difficulty),
        phase: MatchPhase::Serving {
            server,
            remaining_ticks: tuning.serve_delay_ticks(),
        },
        tick: 0,
        seed,
        serves: 0,
        tuning: tuning.clone(),
    }
}

impl MatchState {
    pub fn paddle(&self, side: Side) -> &Paddle {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn paddle_mut(&mut self, side: Side) -> &mut Paddle {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
        }
    }

    pub fn base_speed(&self) -> f64 {
        self.tuning.base_speed(self.config.difficulty)
    }

    pub fn is_over(&self) -> bool {
        matches!(self.phase, MatchPhase::Over { .. })
    }

    pub fn winner(&self) -> Option<Side> {
        match self.phase {
            MatchPhase::Over { winner } => Some(winner),
            _ => None,
        }
    }

    pub fn dt(&self) -> f64 {
        self.tuning.dt()
    }
}

/// Advances the match by one fixed tick.
pub fn step(state: &MatchState, inputs: &PaddleInputs) -> Result<MatchState, GameError> {
    if state.is_over() {
        return Err(GameError::MatchAlreadyOver);
    }
    let tuning = &state.tuning;
    let dt = tuning.dt();
    let inputs = inputs.normalized(state.config.num_players);

    let mut next = state.clone();
    next.tick += 1;

    for side in [Side::Left, Side::Right] {
        let input = inputs.get(side);
        let paddle = *state.paddle(side);
        let moved = match input.source {
            InputSource::Ai => {
                let target = ai_paddle_target(state, side);
                if (target - paddle.y).abs() < tuning.ai_deadband {
                    paddle
                } else {
                    move_paddle(&paddle, target, tuning.ai_speed(state.config.difficulty), dt)
                }
            }
            InputSource::Joint | InputSource::Emulated => match input.target {
                Some(target) => move_paddle(&paddle, target, tuning.human_paddle_speed, dt),
                None => paddle,
            },
        };
        *next.paddle_mut(side) = moved;
    }

    match state.phase {
        MatchPhase::Serving {
            server,
            remaining_ticks,
        } => {
            if remaining_ticks > 1 {
                next.phase = MatchPhase::Serving {
                    server,
                    remaining_ticks: remaining_ticks - 1,
                };
            } else {
                launch(&mut next, server);
            }
        }
        MatchPhase::Rally => {
            physics::advance_ball(&mut next, dt);
            if let Some(scorer) = detect_goal(&next) {
                next = apply_goal(&next, scorer);
            }
        }
        MatchPhase::Over { .. } => unreachable!("checked above"),
    }
    Ok(next)
}

/// Serve angle for serve number `index`, uniform in `±max_serve_angle_deg`.
pub fn serve_angle(seed: u64, index: u64, tuning: &GameTuning) -> f64 {
    use rand::{Rng, SeedableRng};
    let max = tuning.max_serve_angle_deg.to_radians();
    if max <= 0.0 {
        return 0.0;
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng.gen_range(-max..=max)
}

fn launch(state: &mut MatchState, server: Side) {
    let angle = serve_angle(state.seed, state.serves, &state.tuning);
    let speed = state.rally_speed;
    state.ball = Ball {
        pos: Vec2::new(0.5, 0.5),
        vel: Vec2::new(server.outward() * speed * angle.cos(), speed * angle.sin()),
    };
    state.serves += 1;
    state.phase = MatchPhase::Rally;
}

/// Books a point for `scorer`, then either ends the match or has the
/// conceding side serve after the serve delay.
pub fn apply_goal(state: &MatchState, scorer: Side) -> MatchState {
    let mut next = state.clone();
    let loser = scorer.opponent();
    *next.score.get_mut(scorer) += 1;
    let lives = next.lives.get_mut(loser);
    *lives = lives.saturating_sub(1);
    next.ball = Ball::at_center();
    next.rally_speed = next.base_speed();
    next.phase = if *next.lives.get(loser) == 0 {
        MatchPhase::Over { winner: scorer }
    } else {
        MatchPhase::Serving {
            server: loser,
            remaining_ticks: next.tuning.serve_delay_ticks(),
        }
    };
    next
}
