use std::collections::HashMap;

use super::card::Card;
use super::deck::Deck;
use super::state::{GameState, Player};
use crate::error::Result;

/// Trick cap for a single interactive match.
pub const DEFAULT_MATCH_MAX_TRICKS: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrickResult {
    pub next_state: GameState,
    pub winner: Player,
    /// Cards in the order they were played; the winner appended them to their bottom in this order.
    pub pile: Deck,
    pub moves: usize,
    /// The loser's deck is empty after the trick.
    pub terminal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatchOutcome {
    Terminated {
        winner: Player,
        tricks: u64,
    },
    /// The state after `transient` tricks recurs after `transient + period` tricks.
    Looped {
        transient: u64,
        period: u64,
    },
    BudgetExceeded {
        tricks_played: u64,
    },
}

impl MatchOutcome {
    pub fn is_loop(&self) -> bool {
        matches!(self, MatchOutcome::Looped { .. })
    }
}

impl std::fmt::Display for MatchOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MatchOutcome::Terminated { winner, tricks } => {
                write!(f, "Terminated winner={winner} tricks={tricks}")
            }
            MatchOutcome::Looped { transient, period } => {
                write!(f, "Looped transient={transient} period={period}")
            }
            MatchOutcome::BudgetExceeded { tricks_played } => {
                write!(f, "BudgetExceeded tricks_played={tricks_played}")
            }
        }
    }
}

/// Plays one trick in place. `pile` is cleared and receives the cards in play order.
/// Returns the winner and whether the loser has run out of cards.
pub(crate) fn trick_in_place(state: &mut GameState, pile: &mut Vec<Card>) -> (Player, bool) {
    pile.clear();
    let mut mover = state.leader;
    // (challenger, cards the responder still has to flip)
    let mut challenge: Option<(Player, u8)> = None;
    let winner = loop {
        let Some(card) = state.deck_mut(mover).pop_top() else {
            break mover.other();
        };
        pile.push(card);
        if card.is_special() {
            challenge = Some((mover, card.rank()));
            mover = mover.other();
        } else if let Some((challenger, remaining)) = challenge.as_mut() {
            *remaining -= 1;
            if *remaining == 0 {
                break *challenger;
            }
        } else {
            mover = mover.other();
        }
    };
    state.deck_mut(winner).extend_bottom(pile.iter().copied());
    state.leader = winner;
    (winner, state.deck(winner.other()).is_empty())
}

/// Executes one trick from a playable state.
pub fn play_trick(state: &GameState) -> Result<TrickResult> {
    state.check_playable()?;
    let mut next_state = state.clone();
    let mut pile = Vec::new();
    let (winner, terminal) = trick_in_place(&mut next_state, &mut pile);
    Ok(TrickResult {
        next_state,
        winner,
        moves: pile.len(),
        pile: pile.into(),
        terminal,
    })
}

/// Plays tricks until a deck empties, a trick-boundary state repeats (when
/// `detect_loops` is set), or `max_tricks` tricks have been played.
pub fn play_match(initial: &GameState, max_tricks: u64, detect_loops: bool) -> Result<MatchOutcome> {
    initial.check_playable()?;
    let mut runner = MatchRunner::new(initial.clone(), detect_loops);
    Ok(runner.run(max_tricks))
}

/// Step-wise match execution with optional recurrence detection.
pub(crate) struct MatchRunner {
    pub(crate) state: GameState,
    pub(crate) tricks: u64,
    pile: Vec<Card>,
    seen: Option<HashMap<Vec<u8>, u64>>,
    key: Vec<u8>,
}

pub(crate) enum Step {
    Continue,
    Done(MatchOutcome),
}

impl MatchRunner {
    pub(crate) fn new(state: GameState, detect_loops: bool) -> MatchRunner {
        let mut runner = MatchRunner {
            state,
            tricks: 0,
            pile: Vec::with_capacity(64),
            seen: detect_loops.then(HashMap::new),
            key: Vec::new(),
        };
        if let Some(seen) = runner.seen.as_mut() {
            runner.state.encode_into(&mut runner.key);
            seen.insert(runner.key.clone(), 0);
        }
        runner
    }

    pub(crate) fn step(&mut self) -> Step {
        let (winner, terminal) = trick_in_place(&mut self.state, &mut self.pile);
        self.tricks += 1;
        if terminal {
            return Step::Done(MatchOutcome::Terminated {
                winner,
                tricks: self.tricks,
            });
        }
        if let Some(seen) = self.seen.as_mut() {
            self.state.encode_into(&mut self.key);
            if let Some(&first) = seen.get(&self.key) {
                return Step::Done(MatchOutcome::Looped {
                    transient: first,
                    period: self.tricks - first,
                });
            }
            seen.insert(self.key.clone(), self.tricks);
        }
        Step::Continue
    }

    pub(crate) fn run(&mut self, max_tricks: u64) -> MatchOutcome {
        while self.tricks < max_tricks {
            if let Step::Done(outcome) = self.step() {
                return outcome;
            }
        }
        MatchOutcome::BudgetExceeded {
            tricks_played: self.tricks,
        }
    }
}
