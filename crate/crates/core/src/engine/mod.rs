//! Cards, decks, trick-boundary states and the deterministic trick rule.
//!
//! A trick starts with the leader flipping the top card. Players alternate
//! while ordinary cards are flipped. A special of rank `r` forces the
//! opponent to flip up to `r` cards: `r` ordinaries in a row hand the trick
//! to the challenger, while a special flipped during the response reverses
//! the roles and restarts the count. The winner puts the pile under their
//! deck in the order it was played. A player who must flip from an empty
//! deck loses the pile and the match.

mod card;
mod deck;
mod state;
mod trick;

pub use card::{Card, Settings, MAX_RANK_LIMIT, SUITS};
pub use deck::{format_deck, parse_deck, Deck};
pub use state::{canonical_encoding, GameState, Player};
pub use trick::{play_match, play_trick, MatchOutcome, TrickResult, DEFAULT_MATCH_MAX_TRICKS};

pub(crate) use trick::{trick_in_place, MatchRunner, Step};
