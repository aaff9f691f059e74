//! Session flow: title, the three setup menus, countdown, match and
//! scoreboard, with rematch or quit at the end.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game_core::{
    new_match, BodyPart, ConfigDraft, Difficulty, GameTuning, MatchConfig, MatchState, PlayerCount,
    Score, Side,
};
use crate::gesture_cursor::{Rect, Target};

pub const COUNTDOWN_MS: f64 = 3000.0;

/// Menu options, one per on-screen target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OptionId {
    Start,
    OnePlayer,
    TwoPlayers,
    Easy,
    Hard,
    Hand,
    Head,
    Rematch,
    Quit,
}

impl OptionId {
    pub const ALL: [OptionId; 9] = [
        OptionId::Start,
        OptionId::OnePlayer,
        OptionId::TwoPlayers,
        OptionId::Easy,
        OptionId::Hard,
        OptionId::Hand,
        OptionId::Head,
        OptionId::Rematch,
        OptionId::Quit,
    ];
}

#[derive(Debug, Clone, PartialEq)]
pub enum SessionPhase {
    Title,
    SelectPlayers,
    SelectDifficulty {
        num_players: PlayerCount,
    },
    SelectBodyPart {
        num_players: PlayerCount,
        difficulty: Difficulty,
    },
    Countdown {
        config: MatchConfig,
        remaining_ms: f64,
    },
    Playing {
        config: MatchConfig,
        game: Box<MatchState>,
    },
    MatchOver {
        config: MatchConfig,
        score: Score,
        winner: Side,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PhaseTag {
    Title,
    SelectPlayers,
    SelectDifficulty,
    SelectBodyPart,
    Countdown,
    Playing,
    MatchOver,
}

impl PhaseTag {
    pub fn is_menu(self) -> bool {
        matches!(
            self,
            PhaseTag::Title
                | PhaseTag::SelectPlayers
                | PhaseTag::SelectDifficulty
                | PhaseTag::SelectBodyPart
                | PhaseTag::MatchOver
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SessionEvent {
    Select { option: OptionId },
    CountdownElapsed,
    MatchEnded { winner: Side, score: Score },
    Rematch,
    Quit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("event {event:?} ignored in phase {phase:?}")]
pub struct IgnoredEvent {
    pub phase: PhaseTag,
    pub event: SessionEvent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionState {
    pub phase: SessionPhase,
    /// Session seed; match `n` is seeded with `seed + n`.
    pub seed: u64,
    pub matches_started: u64,
    pub tuning: GameTuning,
}

impl SessionState {
    pub fn new(seed: u64, tuning: GameTuning) -> Self {
        Self {
            phase: SessionPhase::Title,
            seed,
            matches_started: 0,
            tuning,
        }
    }

    pub fn tag(&self) -> PhaseTag {
        match self.phase {
            SessionPhase::Title => PhaseTag::Title,
            SessionPhase::SelectPlayers => PhaseTag::SelectPlayers,
            SessionPhase::SelectDifficulty { .. } => PhaseTag::SelectDifficulty,
            SessionPhase::SelectBodyPart { .. } => PhaseTag::SelectBodyPart,
            SessionPhase::Countdown { .. } => PhaseTag::Countdown,
            SessionPhase::Playing { .. } => PhaseTag::Playing,
            SessionPhase::MatchOver { .. } => PhaseTag::MatchOver,
        }
    }

    /// Settings chosen so far.
    pub fn draft(&self) -> ConfigDraft {
        match &self.phase {
            SessionPhase::Title | SessionPhase::SelectPlayers => ConfigDraft::default(),
            SessionPhase::SelectDifficulty { num_players } => ConfigDraft {
                num_players: Some(*num_players),
                ..Default::default()
            },
            SessionPhase::SelectBodyPart {
                num_players,
                difficulty,
            } => ConfigDraft {
                num_players: Some(*num_players),
                difficulty: Some(*difficulty),
                body_part: None,
            },
            SessionPhase::Countdown { config, .. }
            | SessionPhase::Playing { config, .. }
            | SessionPhase::MatchOver { config, .. } => (*config).into(),
        }
    }

    pub fn game(&self) -> Option<&MatchState> {
        match &self.phase {
            SessionPhase::Playing { game, .. } => Some(game),
            _ => None,
        }
    }

    /// Counts the countdown down by `dt_ms`. Returns true once it has run
    /// out; the caller then feeds [`SessionEvent::CountdownElapsed`].
    pub fn tick_countdown(&mut self, dt_ms: f64) -> bool {
        match &mut self.phase {
            SessionPhase::Countdown { remaining_ms, .. } => {
                *remaining_ms = (*remaining_ms - dt_ms).max(0.0);
                *remaining_ms <= 1e-6
            }
            _ => false,
        }
    }

    fn with_phase(&self, phase: SessionPhase) -> Self {
        Self {
            phase,
            ..self.clone()
        }
    }
}

/// Applies one event. Events that are not legal in the current phase leave
/// the state untouched and come back as [`IgnoredEvent`].
pub fn advance(state: &SessionState, event: SessionEvent) -> Result<SessionState, IgnoredEvent> {
    use OptionId as O;
    use SessionEvent as E;
    use SessionPhase as P;

    let ignored = || IgnoredEvent {
        phase: state.tag(),
        event,
    };
    let countdown = |config: MatchConfig| P::Countdown {
        config,
        remaining_ms: COUNTDOWN_MS,
    };

    let next = match (&state.phase, event) {
        (P::Title, E::Select { option: O::Start }) => state.with_phase(P::SelectPlayers),

        (P::SelectPlayers, E::Select { option }) => {
            let num_players = match option {
                O::OnePlayer => PlayerCount::One,
                O::TwoPlayers => PlayerCount::Two,
                _ => return Err(ignored()),
            };
            state.with_phase(P::SelectDifficulty { num_players })
        }

        (P::SelectDifficulty { num_players }, E::Select { option }) => {
            let difficulty = match option {
                O::Easy => Difficulty::Easy,
                O::Hard => Difficulty::Hard,
                _ => return Err(ignored()),
            };
            state.with_phase(P::SelectBodyPart {
                num_players: *num_players,
                difficulty,
            })
        }

        (
            P::SelectBodyPart {
                num_players,
                difficulty,
            },
            E::Select { option },
        ) => {
            let body_part = match option {
                O::Hand => BodyPart::Hand,
                O::Head => BodyPart::Head,
                _ => return Err(ignored()),
            };
            state.with_phase(countdown(MatchConfig {
                num_players: *num_players,
                difficulty: *difficulty,
                body_part,
            }))
        }

        (P::Countdown { config, .. }, E::CountdownElapsed) => {
            let seed = state.seed.wrapping_add(state.matches_started);
            let game = new_match(*config, seed, &state.tuning);
            let mut next = state.with_phase(P::Playing {
                config: *config,
                game: Box::new(game),
            });
            next.matches_started += 1;
            next
        }

        (P::Playing { config, .. }, E::MatchEnded { winner, score }) => {
            state.with_phase(P::MatchOver {
                config: *config,
                score,
                winner,
            })
        }

        (P::MatchOver { config, .. }, E::Rematch | E::Select { option: O::Rematch }) => {
            state.with_phase(countdown(*config))
        }

        (P::MatchOver { .. }, E::Quit | E::Select { option: O::Quit }) => {
            state.with_phase(P::Title)
        }

        _ => return Err(ignored()),
    };
    Ok(next)
}

const SINGLE: Rect = Rect::new(0.30, 0.35, 0.70, 0.65);
const LEFT_BOX: Rect = Rect::new(0.08, 0.35, 0.44, 0.65);
const RIGHT_BOX: Rect = Rect::new(0.56, 0.35, 0.92, 0.65);

fn pair(a: OptionId, b: OptionId) -> Vec<Target> {
    vec![
        Target {
            id: a,
            rect: LEFT_BOX,
        },
        Target {
            id: b,
            rect: RIGHT_BOX,
        },
    ]
}

/// On-screen targets for the current phase; empty outside menus.
pub fn menu_targets(state: &SessionState) -> Vec<Target> {
    use OptionId as O;
    match state.tag() {
        PhaseTag::Title => vec![Target {
            id: O::Start,
            rect: SINGLE,
        }],
        PhaseTag::SelectPlayers => pair(O::OnePlayer, O::TwoPlayers),
        PhaseTag::SelectDifficulty => pair(O::Easy, O::Hard),
        PhaseTag::SelectBodyPart => pair(O::Hand, O::Head),
        PhaseTag::MatchOver => pair(O::Rematch, O::Quit),
        PhaseTag::Countdown | PhaseTag::Playing => Vec::new(),
    }
}
