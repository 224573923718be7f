//! Deterministic engine, Monte Carlo simulator and loop-search toolkit for
//! Beggar-My-Neighbour played with `N` cards and special ranks `1..=R`.

pub mod analyzer;
pub mod backward;
pub mod cycles;
pub mod engine;
pub mod error;
pub mod factory;
pub mod simulator;
pub mod stats;

pub use engine::{
    play_match, play_trick, Card, Deck, GameState, MatchOutcome, Player, Settings, TrickResult,
};
pub use error::{Error, Result};
