use std::fmt;

use super::deck::Deck;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Player {
    A,
    B,
}

impl Player {
    #[inline]
    pub fn other(self) -> Player {
        match self {
            Player::A => Player::B,
            Player::B => Player::A,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::A => "A",
            Player::B => "B",
        })
    }
}

impl std::str::FromStr for Player {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Player, String> {
        match s.trim() {
            "A" | "a" => Ok(Player::A),
            "B" | "b" => Ok(Player::B),
            other => Err(format!("unknown player {other:?}, expected A or B")),
        }
    }
}

/// Trick-boundary state: both decks plus the player who leads the next trick.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameState {
    pub deck_a: Deck,
    pub deck_b: Deck,
    pub leader: Player,
}

impl GameState {
    pub fn new(deck_a: Deck, deck_b: Deck, leader: Player) -> GameState {
        GameState {
            deck_a,
            deck_b,
            leader,
        }
    }

    /// Parses both decks; player A leads.
    pub fn parse(deck_a: &str, deck_b: &str) -> Result<GameState> {
        Ok(GameState::new(
            Deck::parse(deck_a)?,
            Deck::parse(deck_b)?,
            Player::A,
        ))
    }

    pub fn deck(&self, player: Player) -> &Deck {
        match player {
            Player::A => &self.deck_a,
            Player::B => &self.deck_b,
        }
    }

    pub fn deck_mut(&mut self, player: Player) -> &mut Deck {
        match player {
            Player::A => &mut self.deck_a,
            Player::B => &mut self.deck_b,
        }
    }

    pub fn is_playable(&self) -> bool {
        !self.deck_a.is_empty() && !self.deck_b.is_empty()
    }

    pub fn check_playable(&self) -> Result<()> {
        if self.deck_a.is_empty() {
            Err(Error::Unplayable(Player::A))
        } else if self.deck_b.is_empty() {
            Err(Error::Unplayable(Player::B))
        } else {
            Ok(())
        }
    }

    pub fn total_cards(&self) -> usize {
        self.deck_a.len() + self.deck_b.len()
    }

    pub fn is_balanced(&self) -> bool {
        self.deck_a.len() == self.deck_b.len()
    }

    /// Relabels the players so that A leads. States already led by A are returned unchanged.
    pub fn standardized(&self) -> GameState {
        match self.leader {
            Player::A => self.clone(),
            Player::B => GameState::new(self.deck_b.clone(), self.deck_a.clone(), Player::A),
        }
    }

    /// Injective byte encoding: leader byte, little-endian length of deck A, then the
    /// ranks of deck A and deck B from top to bottom.
    pub fn canonical_encoding(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(5 + self.total_cards());
        self.encode_into(&mut out);
        out
    }

    pub(crate) fn encode_into(&self, out: &mut Vec<u8>) {
        out.clear();
        out.push(match self.leader {
            Player::A => 0,
            Player::B => 1,
        });
        out.extend_from_slice(&(self.deck_a.len() as u32).to_le_bytes());
        out.extend(self.deck_a.iter().map(|c| c.rank()));
        out.extend(self.deck_b.iter().map(|c| c.rank()));
    }
}

impl fmt::Display for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A={} B={} leader={}", self.deck_a, self.deck_b, self.leader)
    }
}

/// See [`GameState::canonical_encoding`].
pub fn canonical_encoding(state: &GameState) -> Vec<u8> {
    state.canonical_encoding()
}
